//! Dense complex linear algebra for qubit registers.
//!
//! Site 0 is the leftmost (most significant) tensor factor: in a register of
//! `n` qubits, site `s` is bit `n - 1 - s` of the basis index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// A dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity to 1e-12 and stores the exactly symmetrized matrix.
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::with_tolerance(entries, Tolerances::default().hermitian)
    }

    pub fn with_tolerance(entries: CMatrix, tol: f64) -> Result<Self> {
        check_square(&entries)?;
        let dev = hermitian_deviation(&entries);
        if !(dev <= tol) {
            return Err(Error::NotHermitian(dev));
        }
        let sym = (&entries + entries.adjoint()).scale(0.5);
        Ok(Self { entries: sym })
    }

    /// Builds a Hermitian operator from a real-valued matrix given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::new(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Real linear combination; stays Hermitian.
    pub fn scale(&self, a: f64) -> Self {
        Self {
            entries: self.entries.scale(a),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    /// `<v|H|v>` for an arbitrary vector.
    pub fn expectation(&self, v: &CVector) -> C64 {
        v.dotc(&(&self.entries * v))
    }
}

/// A dense unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    entries: CMatrix,
}

impl UnitaryOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        check_square(&entries)?;
        let n = entries.nrows();
        let dev = max_abs(&(&entries * entries.adjoint() - CMatrix::identity(n, n)));
        if !(dev <= Tolerances::default().unitary) {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    /// Product `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries * &other.entries,
        }
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let n2 = amplitudes.norm_squared();
        if amplitudes.is_empty() || !((n2 - 1.0).abs() <= Tolerances::default().norm) {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.norm();
        if !(n > 0.0) {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(n),
        })
    }

    /// Computational basis state `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Self { amplitudes: v }
    }

    /// `|local>^{⊗n}` for a normalized single-qubit state.
    pub fn product(local: [C64; 2], n_sites: usize) -> Result<Self> {
        let mut v = CVector::from_element(1, ONE);
        let l = CVector::from_column_slice(&local);
        for _ in 0..n_sites {
            v = v.kronecker(&l);
        }
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// Number of qubits, if the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let tol = Tolerances::default();
        let h = HermitianOperator::with_tolerance(entries, tol.hermitian)
            .map_err(|e| Error::InvalidDensityMatrix(e.to_string()))?;
        let tr = h.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let (values, _) = eig_raw(h.entries())?;
        let min = values.first().copied().unwrap_or(0.0);
        if min < tol.min_eigenvalue {
            return Err(Error::InvalidDensityMatrix(format!(
                "min eigenvalue {min:e}"
            )));
        }
        Ok(Self {
            entries: h.into_entries(),
        })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        Self {
            entries: a * a.adjoint(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_raw(&self.entries)?.0)
    }

    /// `Tr[ρ X]`.
    pub fn expect(&self, op: &CMatrix) -> C64 {
        (&self.entries * op).trace()
    }

    /// Trace over one factor of a two-qubit state; `keep` is 0 or 1.
    pub fn partial_trace_pair(&self, keep: usize) -> Result<DensityMatrix> {
        if self.dim() != 4 || keep > 1 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: self.dim(),
            });
        }
        let mut out = CMatrix::zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = ZERO;
                for t in 0..2 {
                    let (i, j) = if keep == 0 {
                        (2 * a + t, 2 * b + t)
                    } else {
                        (2 * t + a, 2 * t + b)
                    };
                    acc += self.entries[(i, j)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix { entries: out })
    }
}

/// The unnormalized Pauli matrices `σ1, σ2, σ3` followed by the identity.
pub fn pauli_operators() -> [HermitianOperator; 4] {
    let z = ZERO;
    let o = ONE;
    let m = |a: [C64; 4]| HermitianOperator {
        entries: CMatrix::from_row_slice(2, 2, &a),
    };
    [
        m([z, o, o, z]),
        m([z, -I, I, z]),
        m([o, z, z, -o]),
        m([o, z, z, o]),
    ]
}

/// `σ_k` for `k` in 1..=3.
pub fn pauli(k: usize) -> HermitianOperator {
    assert!((1..=3).contains(&k), "Pauli index must be 1, 2 or 3");
    let [s1, s2, s3, _] = pauli_operators();
    match k {
        1 => s1,
        2 => s2,
        _ => s3,
    }
}

/// Eigen-decomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: UnitaryOperator,
}

fn eig_raw(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `H = V diag(λ) V†` with ascending `λ`.
pub fn hermitian_eig(h: &HermitianOperator) -> Result<Eigen> {
    let (values, vectors) = eig_raw(h.entries())?;
    Ok(Eigen {
        values,
        vectors: UnitaryOperator { entries: vectors },
    })
}

/// Applies `g` to the spectrum: `V diag(g(λ)) V†`.
pub(crate) fn spectral_map(eig: &Eigen, g: impl Fn(f64) -> C64) -> CMatrix {
    let v = eig.vectors.entries();
    let n = v.nrows();
    let mut scaled = v.clone();
    for (c, &lam) in eig.values.iter().enumerate() {
        let f = g(lam);
        for r in 0..n {
            scaled[(r, c)] *= f;
        }
    }
    scaled * v.adjoint()
}

/// `e^{-iH}`, computed in the eigenbasis of `H`.
pub fn unitary_from_hamiltonian(h: &HermitianOperator) -> Result<UnitaryOperator> {
    let eig = hermitian_eig(h)?;
    let u = spectral_map(&eig, |lam| C64::new(0.0, -lam).exp());
    UnitaryOperator::new(u)
}

fn check_dense(n_sites: usize) -> Result<()> {
    let cap = crate::tolerances::dense_cap();
    if n_sites > cap {
        return Err(Error::DenseCapExceeded { n_sites, cap });
    }
    Ok(())
}

pub(crate) fn check_dense_cap(n_sites: usize) -> Result<()> {
    check_dense(n_sites)
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` on `site`.
pub fn embed_local(
    op: &HermitianOperator,
    site: usize,
    n_sites: usize,
) -> Result<HermitianOperator> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: op.dim(),
        });
    }
    if site >= n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    check_dense(n_sites)?;
    let id = CMatrix::identity(2, 2);
    let mut out = CMatrix::identity(1, 1);
    for s in 0..n_sites {
        out = if s == site {
            out.kronecker(op.entries())
        } else {
            out.kronecker(&id)
        };
    }
    Ok(HermitianOperator { entries: out })
}

/// Applies a 2×2 matrix to one site of an `n_sites`-qubit vector, in place.
pub fn apply_on_site(v: &mut CVector, op: &CMatrix, site: usize, n_sites: usize) {
    debug_assert_eq!(v.len(), 1 << n_sites);
    let stride = 1usize << (n_sites - 1 - site);
    let (o00, o01, o10, o11) = (op[(0, 0)], op[(0, 1)], op[(1, 0)], op[(1, 1)]);
    let len = v.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let j = i + stride;
            let (a, b) = (v[i], v[j]);
            v[i] = o00 * a + o01 * b;
            v[j] = o10 * a + o11 * b;
        }
        base += 2 * stride;
    }
}

/// Applies `op^{⊗n}` in place.
pub fn apply_uniform(v: &mut CVector, op: &CMatrix, n_sites: usize) {
    for s in 0..n_sites {
        apply_on_site(v, op, s, n_sites);
    }
}

/// `Σ_n op^{[n]} |v>`.
pub fn apply_site_sum(v: &CVector, op: &CMatrix, n_sites: usize) -> CVector {
    let mut acc = CVector::zeros(v.len());
    for s in 0..n_sites {
        let mut w = v.clone();
        apply_on_site(&mut w, op, s, n_sites);
        acc += w;
    }
    acc
}

/// Reduced density matrix of `psi` on the given sites (one or two, ordered).
/// The first listed site is the leftmost factor of the result.
pub fn reduced_density_matrix(psi: &PureState, sites: &[usize]) -> Result<DensityMatrix> {
    let n = psi.n_qubits().ok_or(Error::DimensionMismatch {
        expected: psi.dim().next_power_of_two(),
        got: psi.dim(),
    })?;
    check_dense(n)?;
    if sites.is_empty() || sites.len() > 2 {
        return Err(Error::InvalidParameters(format!(
            "expected one or two sites, got {}",
            sites.len()
        )));
    }
    for &s in sites {
        if s >= n {
            return Err(Error::SiteOutOfRange { site: s, n_sites: n });
        }
    }
    if sites.len() == 2 && sites[0] == sites[1] {
        return Err(Error::RepeatedSites(sites.to_vec()));
    }
    let k = sites.len();
    let masks: Vec<usize> = sites.iter().map(|&s| 1usize << (n - 1 - s)).collect();
    let all_mask: usize = masks.iter().sum();
    let local_dim = 1usize << k;
    // offset of each local configuration within the full index
    let offsets: Vec<usize> = (0..local_dim)
        .map(|loc| {
            (0..k)
                .filter(|&b| loc & (1 << (k - 1 - b)) != 0)
                .map(|b| masks[b])
                .sum()
        })
        .collect();
    let a = psi.amplitudes();
    let mut rho = CMatrix::zeros(local_dim, local_dim);
    let mut buf = vec![ZERO; local_dim];
    for rest in 0..a.len() {
        if rest & all_mask != 0 {
            continue;
        }
        for (loc, off) in offsets.iter().enumerate() {
            buf[loc] = a[rest + off];
        }
        for i in 0..local_dim {
            if buf[i] == ZERO {
                continue;
            }
            for j in 0..local_dim {
                rho[(i, j)] += buf[i] * buf[j].conj();
            }
        }
    }
    DensityMatrix::new(rho)
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest elementwise modulus.
pub fn max_abs_entry(m: &CMatrix) -> f64 {
    max_abs(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    #[test]
    fn pauli_algebra() {
        let [s1, s2, s3, id] = pauli_operators();
        assert_eq!(s3.entries()[(0, 0)], ONE);
        assert_eq!(s3.entries()[(1, 1)], -ONE);
        assert_eq!((s1.entries() * s2.entries()).trace(), ZERO);
        assert!(close(
            &(s1.entries() * s2.entries()),
            &s3.entries().map(|z| z * I),
            0.0
        ));
        for s in [&s1, &s2, &s3] {
            assert!(close(&(s.entries() * s.entries()), id.entries(), 0.0));
        }
        for (k, a) in [&s1, &s2, &s3].iter().enumerate() {
            for (l, b) in [&s1, &s2, &s3].iter().enumerate() {
                let t = (a.entries() * b.entries()).trace();
                let want = if k == l { 2.0 } else { 0.0 };
                assert!((t - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn eig_of_paulis() {
        let e = hermitian_eig(&pauli(3)).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let e = hermitian_eig(&HermitianOperator::identity(2)).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let e = hermitian_eig(&pauli(1)).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        // eigenvector for -1 is (|0> - |1>)/sqrt2 up to phase
        let v = e.vectors.entries().column(0).into_owned();
        let want = CVector::from_vec(vec![
            C64::new(1.0 / 2f64.sqrt(), 0.0),
            C64::new(-1.0 / 2f64.sqrt(), 0.0),
        ]);
        assert!((v.dotc(&want).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs() {
        let h = HermitianOperator::new(CMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.3, -0.2),
                C64::new(0.0, 0.5),
                C64::new(0.3, 0.2),
                C64::new(-2.0, 0.0),
                C64::new(0.1, 0.0),
                C64::new(0.0, -0.5),
                C64::new(0.1, 0.0),
                C64::new(0.7, 0.0),
            ],
        ))
        .unwrap();
        let e = hermitian_eig(&h).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let rec = spectral_map(&e, |l| C64::new(l, 0.0));
        assert!(frobenius(&(rec - h.entries())) <= 3e-12);
    }

    #[test]
    fn exponentials() {
        let u = unitary_from_hamiltonian(&HermitianOperator::zeros(2)).unwrap();
        assert!(close(u.entries(), &CMatrix::identity(2, 2), 1e-15));

        let u = unitary_from_hamiltonian(&pauli(3).scale(PI / 2.0)).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[-I, ZERO, ZERO, I]);
        assert!(close(u.entries(), &want, 1e-14));

        let u = unitary_from_hamiltonian(&pauli(1).scale(PI)).unwrap();
        assert!(close(u.entries(), &-CMatrix::identity(2, 2), 1e-14));
    }

    #[test]
    fn embedding() {
        let s3 = pauli(3);
        assert_eq!(embed_local(&s3, 0, 1).unwrap(), s3);
        let e = embed_local(&s3, 0, 2).unwrap();
        assert!(close(
            e.entries(),
            &s3.entries().kronecker(&CMatrix::identity(2, 2)),
            0.0
        ));
        assert_eq!(embed_local(&pauli(1), 1, 3).unwrap().trace(), ZERO);
        assert!(matches!(
            embed_local(&s3, 3, 3),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            embed_local(&s3, 0, 40),
            Err(Error::DenseCapExceeded { .. })
        ));
    }

    #[test]
    fn sitewise_apply_matches_embedding() {
        let n = 4;
        let mut v = CVector::from_fn(1 << n, |i, _| C64::new(i as f64, (i * i) as f64 * 0.1));
        let op = pauli(2);
        let big = embed_local(&op, 2, n).unwrap();
        let want = big.entries() * &v;
        apply_on_site(&mut v, op.entries(), 2, n);
        assert!((v - want).norm() < 1e-12);
    }

    #[test]
    fn reduced_states() {
        let psi = PureState::basis(4, 0);
        let r = reduced_density_matrix(&psi, &[0]).unwrap();
        assert_eq!(r.entries()[(0, 0)], ONE);
        assert_eq!(r.entries()[(1, 1)], ZERO);

        let s = 1.0 / 2f64.sqrt();
        let mut a = CVector::zeros(16);
        a[0] = C64::new(s, 0.0);
        a[15] = C64::new(s, 0.0);
        let ghz = PureState::new(a).unwrap();
        let r = reduced_density_matrix(&ghz, &[0]).unwrap();
        assert!(close(r.entries(), &CMatrix::identity(2, 2).unscale(2.0), 1e-15));

        let mut a = CVector::zeros(4);
        a[0] = C64::new(s, 0.0);
        a[3] = C64::new(s, 0.0);
        let ghz2 = PureState::new(a).unwrap();
        let r = reduced_density_matrix(&ghz2, &[0, 1]).unwrap();
        assert!(close(r.entries(), DensityMatrix::from_pure(&ghz2).entries(), 1e-15));

        assert!(matches!(
            reduced_density_matrix(&ghz2, &[1, 1]),
            Err(Error::RepeatedSites(_))
        ));
        assert!(reduced_density_matrix(&ghz2, &[2]).is_err());
    }

    #[test]
    fn site_order_in_pair_marginal() {
        // |0>|1>: rho on (1, 0) must be |1><1| ⊗ |0><0|
        let psi = PureState::basis(4, 1);
        let r = reduced_density_matrix(&psi, &[1, 0]).unwrap();
        assert_eq!(r.entries()[(2, 2)], ONE);
        let r = reduced_density_matrix(&psi, &[0, 1]).unwrap();
        assert_eq!(r.entries()[(1, 1)], ONE);
    }

    #[test]
    fn validation_rejects_bad_input() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian(_))));
        assert!(PureState::new(CVector::from_element(2, ONE)).is_err());
        let bad = CMatrix::from_row_slice(2, 2, &[C64::new(1.5, 0.0), ZERO, ZERO, C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(bad).is_err());
    }
}
