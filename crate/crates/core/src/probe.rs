//! Probe states built from superpositions of uniform product states: GHZ
//! states along each axis and the three-axis GHZ superposition.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;

use crate::engine;
use crate::error::{Error, Result};
use crate::operator::{check_dense_cap, CMatrix, CVector, DensityMatrix, PureState, C64, ONE, ZERO};
use crate::tolerances::Tolerances;

/// Phase grid searched for admissible GHZ phases.
pub const PHASE_GRID: [f64; 4] = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];

/// One term `weight · |local>^{⊗N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductTerm {
    pub weight: C64,
    pub local: [C64; 2],
}

/// `Σ_j w_j |α_j>^{⊗N}`: every term is the same single-qubit state on all sites.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductStateSuperposition {
    n_sites: usize,
    terms: Vec<ProductTerm>,
    normalized: bool,
}

impl ProductStateSuperposition {
    /// Local states must have unit norm; the result is not flagged normalized.
    pub fn new(n_sites: usize, terms: Vec<ProductTerm>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParameters("n_sites must be positive".into()));
        }
        for t in &terms {
            let n2 = t.local[0].norm_sqr() + t.local[1].norm_sqr();
            if (n2 - 1.0).abs() > Tolerances::default().norm {
                return Err(Error::NotNormalized(n2));
            }
        }
        Ok(Self {
            n_sites,
            terms,
            normalized: false,
        })
    }

    /// Single product state `|local>^{⊗N}`.
    pub fn product(n_sites: usize, local: [C64; 2]) -> Result<Self> {
        let mut s = Self::new(n_sites, vec![ProductTerm { weight: ONE, local }])?;
        s.normalized = true;
        Ok(s)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `<s|s>` from the exact Gram matrix of the terms.
    pub fn norm_squared(&self) -> f64 {
        engine::overlap(self, self).expect("same register").re
    }

    /// Rescales the weights so that `<s|s> = 1`.
    pub fn normalize(mut self) -> Result<Self> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0) {
            return Err(Error::NotNormalized(n2));
        }
        let scale = 1.0 / n2.sqrt();
        for t in &mut self.terms {
            t.weight *= scale;
        }
        self.normalized = true;
        Ok(self)
    }

    pub(crate) fn with_terms(&self, terms: Vec<ProductTerm>) -> Self {
        Self {
            n_sites: self.n_sites,
            terms,
            normalized: self.normalized,
        }
    }

    pub(crate) fn mark_normalized(mut self) -> Self {
        self.normalized = true;
        self
    }
}

/// Eigenvector of `σ_k` with eigenvalue `sign` (±1). The first nonzero
/// component is real and positive.
pub fn local_eigenvector(k: usize, plus: bool) -> [C64; 2] {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let sign = if plus { 1.0 } else { -1.0 };
    match k {
        1 => [s, s * sign],
        2 => [s, C64::new(0.0, sign * FRAC_1_SQRT_2)],
        3 => {
            if plus {
                [ONE, ZERO]
            } else {
                [ZERO, ONE]
            }
        }
        _ => panic!("direction must be 1, 2 or 3"),
    }
}

fn check_direction(k: usize) -> Result<()> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(Error::ParameterIndex { index: k, d: 3 })
    }
}

/// `(|φ_k^+>^{⊗N} + e^{iδ}|φ_k^->^{⊗N})/√2`.
pub fn ghz_state(k: usize, n_sites: usize, delta: f64) -> Result<ProductStateSuperposition> {
    check_direction(k)?;
    let w = C64::new(FRAC_1_SQRT_2, 0.0);
    let s = ProductStateSuperposition::new(
        n_sites,
        vec![
            ProductTerm {
                weight: w,
                local: local_eigenvector(k, true),
            },
            ProductTerm {
                weight: w * C64::from_polar(1.0, delta),
                local: local_eigenvector(k, false),
            },
        ],
    )?;
    // the two branches are orthogonal on every site
    Ok(s.mark_normalized())
}

/// `M` with `1 = M² [6 + 4((1+i)/2)^N + 4((1-i)/2)^N + 10(1/√2)^N
/// + 2(-1/√2)^N + 2(i/√2)^N + 2(-i/√2)^N]`.
pub fn probe_normalization(n_sites: usize) -> Result<f64> {
    let n = n_sites as i32;
    let p = |re: f64, im: f64| C64::new(re, im).powi(n);
    let r = FRAC_1_SQRT_2;
    let bracket = C64::new(6.0, 0.0)
        + p(0.5, 0.5) * 4.0
        + p(0.5, -0.5) * 4.0
        + p(r, 0.0) * 10.0
        + p(-r, 0.0) * 2.0
        + p(0.0, r) * 2.0
        + p(0.0, -r) * 2.0;
    if !(bracket.re > 0.0) {
        return Err(Error::NonPositiveNormalization(bracket.re));
    }
    Ok(1.0 / bracket.re.sqrt())
}

/// `𝒩 (e^{iδ1}|Φ1> + e^{iδ2}|Φ2> + e^{iδ3}|Φ3>)`, normalized through the
/// exact 6×6 Gram matrix of its product terms.
pub fn triple_ghz_probe(n_sites: usize, deltas: [f64; 3]) -> Result<ProductStateSuperposition> {
    if n_sites < 2 {
        return Err(Error::InvalidParameters(format!(
            "triple-GHZ probe needs N >= 2, got {n_sites}"
        )));
    }
    let w = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut terms = Vec::with_capacity(6);
    for (k, &delta) in (1..=3).zip(&deltas) {
        let phase = C64::from_polar(1.0, delta);
        for plus in [true, false] {
            terms.push(ProductTerm {
                weight: w * phase,
                local: local_eigenvector(k, plus),
            });
        }
    }
    ProductStateSuperposition::new(n_sites, terms)?.normalize()
}

/// Two-site marginal `(1/4) 1⊗1 + (1/12) Σ_k σ_k⊗σ_k` of the probe, with a
/// flag telling whether it is exact for this `N` (`N ≡ 0 mod 8`).
#[derive(Debug, Clone)]
pub struct ProbeRdm2 {
    pub rho: DensityMatrix,
    pub exact: bool,
}

pub fn probe_rdm2(n_sites: usize) -> Result<ProbeRdm2> {
    if n_sites < 2 {
        return Err(Error::InvalidParameters("two-site marginal needs N >= 2".into()));
    }
    let paulis = crate::operator::pauli_operators();
    let mut m = CMatrix::identity(4, 4).unscale(4.0);
    for s in &paulis[..3] {
        m += s.entries().kronecker(s.entries()).unscale(12.0);
    }
    Ok(ProbeRdm2 {
        rho: DensityMatrix::new(m)?,
        exact: n_sites % 8 == 0,
    })
}

/// `Σ_j w_j ⊗ α_j` as a dense vector, whether or not it is normalized.
pub fn dense_amplitudes(s: &ProductStateSuperposition) -> Result<CVector> {
    check_dense_cap(s.n_sites())?;
    let dim = 1usize << s.n_sites();
    let mut out = CVector::zeros(dim);
    for t in s.terms() {
        // amplitude of basis index i is w · Π_sites local[bit]
        let mut prod = CVector::from_element(1, t.weight);
        let l = CVector::from_column_slice(&t.local);
        for _ in 0..s.n_sites() {
            prod = prod.kronecker(&l);
        }
        out += prod;
    }
    Ok(out)
}

/// Dense statevector of a normalized superposition.
pub fn dense_statevector(s: &ProductStateSuperposition) -> Result<PureState> {
    let amps = dense_amplitudes(s)?;
    if !s.is_normalized() {
        return Err(Error::NotNormalized(amps.norm_squared()));
    }
    PureState::new(amps)
}

fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// First phases on [`PHASE_GRID`]³ (lexicographic order) for which the probe's
/// single-site marginal is `1/2` within `tol`.
pub fn admissible_probe_phases(n_sites: usize, tol: f64) -> Option<[f64; 3]> {
    let half = DMatrix::<C64>::identity(2, 2).unscale(2.0);
    grid_phases().find(|&deltas| {
        triple_ghz_probe(n_sites, deltas)
            .and_then(|p| engine::single_site_marginal(&p))
            .map(|rho| max_dev(rho.entries(), &half) <= tol)
            .unwrap_or(false)
    })
}

/// All points of [`PHASE_GRID`]³ in lexicographic order.
pub fn grid_phases() -> impl Iterator<Item = [f64; 3]> {
    (0..64).map(|i| {
        [
            PHASE_GRID[i / 16],
            PHASE_GRID[(i / 4) % 4],
            PHASE_GRID[i % 4],
        ]
    })
}

/// Phases used for the probe at `N`: zero when admissible, otherwise the
/// first admissible grid point, otherwise zero.
pub fn default_probe_phases(n_sites: usize) -> [f64; 3] {
    admissible_probe_phases(n_sites, 1e-10).unwrap_or([0.0; 3])
}
