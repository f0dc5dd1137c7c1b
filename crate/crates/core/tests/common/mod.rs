//! Oracles shared by the integration tests. Nothing here calls the library's
//! own spectral routines.
#![allow(dead_code)]

use fieldmetro::operator::{CMatrix, CVector};
use fieldmetro::C64;

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out
}

pub fn paulis() -> [CMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// `e^{iθ φ·σ} = cos(θξ) + i sin(θξ) η·σ`.
pub fn rodrigues(theta: f64, phi: [f64; 3]) -> CMatrix {
    let xi = phi.iter().map(|p| p * p).sum::<f64>().sqrt();
    let mut m = CMatrix::identity(2, 2) * C64::new((theta * xi).cos(), 0.0);
    if xi > 0.0 {
        let s = paulis();
        for k in 0..3 {
            m += &s[k] * C64::new(0.0, (theta * xi).sin() * phi[k] / xi);
        }
    }
    m
}

/// `∫₀¹ e^{iαh} σ_k e^{-iαh} dα` by quadrature; `k` in 1..=3.
pub fn a_quadrature(phi: [f64; 3], k: usize, nodes: usize) -> CMatrix {
    let s = &paulis()[k - 1];
    gauss_legendre(nodes)
        .into_iter()
        .fold(CMatrix::zeros(2, 2), |acc, (a, w)| {
            acc + rodrigues(a, phi) * s * rodrigues(-a, phi) * C64::new(w, 0.0)
        })
}

/// `∫₀¹∫₀¹ e^{i(α-β)h} σ_k e^{-i(α-β)h} dα dβ` by a product rule.
pub fn w_quadrature(phi: [f64; 3], k: usize, nodes: usize) -> CMatrix {
    let s = &paulis()[k - 1];
    let gl = gauss_legendre(nodes);
    let mut acc = CMatrix::zeros(2, 2);
    for &(a, wa) in &gl {
        for &(b, wb) in &gl {
            acc += rodrigues(a - b, phi) * s * rodrigues(b - a, phi) * C64::new(wa * wb, 0.0);
        }
    }
    acc
}

/// `|local>^{⊗n}` by repeated Kronecker products.
pub fn kron_power(local: &[C64; 2], n: usize) -> CVector {
    let l = CVector::from_column_slice(local);
    (0..n).fold(CVector::from_element(1, C64::new(1.0, 0.0)), |acc, _| acc.kronecker(&l))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Uniformly random field with `|φ| ≤ r`.
pub fn random_field(rng: &mut impl rand::Rng, r: f64) -> [f64; 3] {
    loop {
        let v = [0; 3].map(|_| rng.gen_range(-r..=r));
        if v.iter().map(|x| x * x).sum::<f64>() <= r * r {
            return v;
        }
    }
}
