//! Quantum Fisher information for unitary families `U(φ) = e^{-i Σ_k φ_k H_k}`
//! with `H_k = Σ_n h_k^{[n]}`.
//!
//! Parameter indices in this module are zero-based for a generic
//! [`GeneratorSet`]; field directions (`1..=3`) are used where a function is
//! specific to the magnetic generators.

use nalgebra::{DMatrix, DVector};

use crate::classical::{Povm, PovmElement};
use crate::error::{Error, Result};
use crate::hamiltonian::{a_local, a_local_field, one_minus_sinc2, sinc2, FieldParams, GeneratorSet};
use crate::operator::{
    apply_site_sum, apply_uniform, check_dense_cap, hermitian_eig, unitary_from_hamiltonian,
    CMatrix, CVector, DensityMatrix, HermitianOperator, PureState, C64, I,
};
use crate::tolerances::Tolerances;

/// Largest register for which full `2^N × 2^N` SLD matrices are built.
pub const SLD_MATRIX_CAP: usize = 10;

/// Real symmetric positive semidefinite `d×d` information matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    entries: DMatrix<f64>,
}

impl FisherMatrix {
    /// Validates symmetry (1e-10, relative to the largest entry when above
    /// one) and positivity (eigenvalues ≥ -1e-8 on the same scale).
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let scale = entries.amax().max(1.0);
        let asym = (&entries - entries.transpose()).amax();
        if asym > 1e-10 * scale {
            return Err(Error::InvalidParameters(format!(
                "Fisher matrix not symmetric ({asym:e})"
            )));
        }
        let fm = Self::symmetrized(entries);
        let min = fm.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -1e-8 * scale {
            return Err(Error::InvalidParameters(format!(
                "Fisher matrix not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(fm)
    }

    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let entries = (&m + m.transpose()) * 0.5;
        Self { entries }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            entries: DMatrix::identity(d, d),
        }
    }

    pub fn d(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[(k, l)]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Number of eigenvalues above `rel_tol · λmax`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let ev = self.eigenvalues();
        let max = ev.last().copied().unwrap_or(0.0);
        if max <= 0.0 {
            return 0;
        }
        ev.iter().filter(|&&l| l > rel_tol * max).count()
    }

    /// Inverse through the eigendecomposition; rank deficiency is an error
    /// naming the null directions.
    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        let tol = Tolerances::default().rank;
        let eig = self.entries.clone().symmetric_eigen();
        let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let null: Vec<Vec<f64>> = (0..self.d())
            .filter(|&i| !(max > 0.0) || eig.eigenvalues[i] <= tol * max)
            .map(|i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect();
        if !null.is_empty() {
            return Err(Error::RankDeficient {
                null_directions: null,
            });
        }
        let inv_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l));
        Ok(&eig.eigenvectors * inv_diag * eig.eigenvectors.transpose())
    }

    /// Largest elementwise relative deviation from `other`, scaled by the
    /// largest entry of `other`.
    pub fn relative_deviation(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).amax() / other.entries.amax().max(f64::MIN_POSITIVE)
    }
}

/// `Tr[F^{-1}]`: the minimal total variance `Σ_k Δφ_k²`.
pub fn total_variance(fim: &FisherMatrix) -> Result<f64> {
    Ok(fim.inverse()?.trace())
}

fn check_register(psi: &PureState, n_sites: usize) -> Result<()> {
    check_dense_cap(n_sites)?;
    if psi.dim() != 1usize << n_sites {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_sites,
            got: psi.dim(),
        });
    }
    Ok(())
}

fn check_qubits(gens: &GeneratorSet) -> Result<()> {
    if gens.local_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: gens.local_dim(),
        });
    }
    Ok(())
}

/// Dense vectors `A_k|ψ>` with `A_k = Σ_n a_k^{[n]}`.
pub(crate) fn a_vectors(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
) -> Result<Vec<CVector>> {
    check_qubits(gens)?;
    check_register(psi, n_sites)?;
    (0..gens.d())
        .map(|k| {
            let a = a_local(gens, params, k)?;
            Ok(apply_site_sum(psi.amplitudes(), a.entries(), n_sites))
        })
        .collect()
}

/// `4 Re[<A_k A_l> - <A_k><A_l>]` from dense statevector algebra.
pub fn qfim_dense(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
) -> Result<FisherMatrix> {
    let av = a_vectors(psi, gens, params, n_sites)?;
    Ok(correlation_qfim(psi.amplitudes(), &av))
}

fn correlation_qfim(psi: &CVector, av: &[CVector]) -> FisherMatrix {
    let d = av.len();
    let means: Vec<f64> = av.iter().map(|v| psi.dotc(v).re).collect();
    let m = DMatrix::from_fn(d, d, |k, l| 4.0 * (av[k].dotc(&av[l]).re - means[k] * means[l]));
    FisherMatrix::symmetrized(m)
}

/// `U(φ)|ψ>` for a uniform single-particle Hamiltonian.
pub(crate) fn evolve_dense(
    psi: &CVector,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
) -> Result<CVector> {
    let u = unitary_from_hamiltonian(&gens.hamiltonian(params)?)?;
    let mut v = psi.clone();
    apply_uniform(&mut v, u.entries(), n_sites);
    Ok(v)
}

/// QFIM from central finite differences of `U(φ)|ψ>`:
/// `4 Re[<∂_kψ|∂_lψ> - <∂_kψ|ψ><ψ|∂_lψ>]`.
pub fn qfim_fd_oracle(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
    step: f64,
) -> Result<FisherMatrix> {
    if !(1e-6..=1e-3).contains(&step) {
        return Err(Error::InvalidParameters(format!(
            "finite-difference step {step:e} outside [1e-6, 1e-3]"
        )));
    }
    check_qubits(gens)?;
    check_register(psi, n_sites)?;
    gens.check_params(params)?;
    let d = gens.d();
    let psi_phi = evolve_dense(psi.amplitudes(), gens, params, n_sites)?;
    let mut derivs = Vec::with_capacity(d);
    for k in 0..d {
        let mut plus = params.to_vec();
        let mut minus = params.to_vec();
        plus[k] += step;
        minus[k] -= step;
        let fp = evolve_dense(psi.amplitudes(), gens, &plus, n_sites)?;
        let fm = evolve_dense(psi.amplitudes(), gens, &minus, n_sites)?;
        derivs.push((fp - fm).unscale(2.0 * step));
    }
    let overlaps: Vec<C64> = derivs.iter().map(|dk| dk.dotc(&psi_phi)).collect();
    let m = DMatrix::from_fn(d, d, |k, l| {
        4.0 * (derivs[k].dotc(&derivs[l]) - overlaps[k] * overlaps[l].conj()).re
    });
    Ok(FisherMatrix::symmetrized(m))
}

/// Splits the QFIM of a permutation-invariant pure state into one- and
/// two-particle parts.
#[derive(Debug, Clone)]
pub struct ReducedQfim {
    /// `𝓘^{[1]}`.
    pub one_body: FisherMatrix,
    /// `𝓘^{[2]}` (may be indefinite; stored unsymmetrized-checked).
    pub two_body: DMatrix<f64>,
    /// `4N 𝓘^{[1]} + 4N(N-1) 𝓘^{[2]}`.
    pub total: FisherMatrix,
}

/// `𝓘 = 4N 𝓘^{[1]} + 4N(N-1) 𝓘^{[2]}` from the one- and two-site marginals.
pub fn qfim_reduced(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
) -> Result<ReducedQfim> {
    check_qubits(gens)?;
    if rho1.dim() != 2 || rho2.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho1.dim(),
        });
    }
    let tol = Tolerances::default().marginal_consistency;
    let dev = [0, 1]
        .iter()
        .map(|&keep| {
            rho2.partial_trace_pair(keep)
                .map(|r| (r.entries() - rho1.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if dev > tol {
        return Err(Error::InconsistentMarginals(dev));
    }
    let d = gens.d();
    let a: Vec<HermitianOperator> = (0..d)
        .map(|k| a_local(gens, params, k))
        .collect::<Result<_>>()?;
    let means: Vec<f64> = a.iter().map(|ak| rho1.expect(ak.entries()).re).collect();
    let one = DMatrix::from_fn(d, d, |k, l| {
        rho1.expect(&(a[k].entries() * a[l].entries())).re - means[k] * means[l]
    });
    let two = DMatrix::from_fn(d, d, |k, l| {
        rho2.expect(&a[k].entries().kronecker(a[l].entries())).re - means[k] * means[l]
    });
    let n = n_sites as f64;
    let total = &one * (4.0 * n) + &two * (4.0 * n * (n - 1.0));
    Ok(ReducedQfim {
        one_body: FisherMatrix::symmetrized(one),
        two_body: two,
        total: FisherMatrix::symmetrized(total),
    })
}

/// `(4/3) N(N+2) [(1 - sinc²ξ) η_k η_l + δ_kl sinc²ξ]`.
pub fn qfim_closed_form(params: &FieldParams, n_sites: usize) -> Result<FisherMatrix> {
    if n_sites < 2 {
        return Err(Error::InvalidParameters(format!(
            "closed-form QFIM needs N >= 2, got {n_sites}"
        )));
    }
    let n = n_sites as f64;
    let pref = 4.0 * n * (n + 2.0) / 3.0;
    let xi = params.xi();
    let s2 = sinc2(xi);
    let oms = one_minus_sinc2(xi);
    let eta = params.eta().unwrap_or([0.0; 3]);
    let m = DMatrix::from_fn(3, 3, |k, l| {
        let delta = if k == l { s2 } else { 0.0 };
        pref * (oms * eta[k] * eta[l] + delta)
    });
    Ok(FisherMatrix::symmetrized(m))
}

/// Eigenvalues `(λ1, λ2, λ3) = 4N(N+2)/3 · (1, sinc²ξ, sinc²ξ)`.
pub fn closed_form_eigenvalues(params: &FieldParams, n_sites: usize) -> [f64; 3] {
    let n = n_sites as f64;
    let l1 = 4.0 * n * (n + 2.0) / 3.0;
    let s2 = sinc2(params.xi());
    [l1, l1 * s2, l1 * s2]
}

/// `(3 + 6/sinc²ξ) / (4N(N+2))`.
pub fn simultaneous_variance_formula(params: &FieldParams, n_sites: usize) -> f64 {
    let n = n_sites as f64;
    (3.0 + 6.0 / sinc2(params.xi())) / (4.0 * n * (n + 2.0))
}

/// Total variances of the three strategies compared at fixed `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceTriple {
    /// Three blocks of `N/3` particles, each an optimal product state.
    pub sep_individual: f64,
    /// Three blocks of `N/3` particles, each a GHZ state along its axis.
    pub ent_individual: f64,
    /// All `N` particles in the three-axis GHZ probe.
    pub ent_simultaneous: f64,
}

/// `(λmax(a_k) - λmin(a_k))²` for direction `k` in 1..=3.
pub fn spectral_gap_squared(params: &FieldParams, k: usize) -> Result<f64> {
    let e = hermitian_eig(&a_local_field(params, k)?)?;
    let gap = e.values[e.values.len() - 1] - e.values[0];
    Ok(gap * gap)
}

pub fn scenario_variances(n_sites: usize, params: &FieldParams) -> Result<VarianceTriple> {
    if n_sites == 0 || n_sites % 3 != 0 {
        return Err(Error::NotDivisibleByThree(n_sites));
    }
    let block = (n_sites / 3) as f64;
    let mut sep = 0.0;
    let mut ind = 0.0;
    for k in 1..=3 {
        let g = spectral_gap_squared(params, k)?;
        sep += 1.0 / (block * g);
        ind += 1.0 / (block * block * g);
    }
    let sim = total_variance(&qfim_closed_form(params, n_sites)?)?;
    Ok(VarianceTriple {
        sep_individual: sep,
        ent_individual: ind,
        ent_simultaneous: sim,
    })
}

/// Probe class for single-parameter estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleParamStrategy {
    Product,
    Ghz,
}

/// Best single-parameter QFI for direction `k`: `N·g` (product) or `N²·g`
/// (GHZ), with `g = (λmax(a_k) - λmin(a_k))²`.
pub fn single_param_qfi(
    k: usize,
    n_sites: usize,
    strategy: SingleParamStrategy,
    params: &FieldParams,
) -> Result<f64> {
    let g = spectral_gap_squared(params, k)?;
    let n = n_sites as f64;
    Ok(match strategy {
        SingleParamStrategy::Product => n * g,
        SingleParamStrategy::Ghz => n * n * g,
    })
}

/// Optimal single-qubit probe for direction `k`: the equal superposition of
/// the extremal eigenvectors of `a_k`.
pub fn optimal_local_state(params: &FieldParams, k: usize) -> Result<[C64; 2]> {
    let e = hermitian_eig(&a_local_field(params, k)?)?;
    let v = e.vectors.entries();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok([(v[(0, 0)] + v[(0, 1)]) * s, (v[(1, 0)] + v[(1, 1)]) * s])
}

/// `L_k = 2i U [|ψ><ψ|, A_k] U†` as dense matrices.
pub fn build_slds(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
) -> Result<Vec<HermitianOperator>> {
    if n_sites > SLD_MATRIX_CAP {
        return Err(Error::DenseCapExceeded {
            n_sites,
            cap: SLD_MATRIX_CAP,
        });
    }
    let av = a_vectors(psi, gens, params, n_sites)?;
    let psi_phi = evolve_dense(psi.amplitudes(), gens, params, n_sites)?;
    av.iter()
        .map(|v| {
            let chi = evolve_dense(v, gens, params, n_sites)?;
            // 2i(|ψ_φ><χ| - |χ><ψ_φ|)
            let m: CMatrix = (&psi_phi * chi.adjoint() - &chi * psi_phi.adjoint()).map(|z| z * I * 2.0);
            HermitianOperator::new(m)
        })
        .collect()
}

/// `<ψ_φ|L_k L_l - L_l L_k|ψ_φ> = 8i Im<ψ|A_k A_l|ψ>`.
pub fn commutator_expectation(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
    k: usize,
    l: usize,
) -> Result<C64> {
    for idx in [k, l] {
        if idx >= gens.d() {
            return Err(Error::ParameterIndex { index: idx, d: gens.d() });
        }
    }
    let av = a_vectors(psi, gens, params, n_sites)?;
    Ok(C64::new(0.0, 8.0 * av[k].dotc(&av[l]).im))
}

/// Gramian of `{U|ψ>, U A_1|ψ>, …, U A_d|ψ>}`.
pub fn saturating_gramian(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
) -> Result<DMatrix<C64>> {
    let av = a_vectors(psi, gens, params, n_sites)?;
    let mut vs = vec![psi.amplitudes().clone()];
    vs.extend(av);
    let n = vs.len();
    Ok(DMatrix::from_fn(n, n, |i, j| vs[i].dotc(&vs[j])))
}

/// POVM saturating the quantum Cramér-Rao bound: Gram-Schmidt on
/// `{U|ψ>, U A_k|ψ>}` starting from `U|ψ>`, giving `d+1` rank-one
/// projectors and the complement (`d+2` elements).
pub fn optimal_povm(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
) -> Result<Povm> {
    let tol = Tolerances::default();
    let d = gens.d();
    let av = a_vectors(psi, gens, params, n_sites)?;
    for k in 0..d {
        for l in (k + 1)..d {
            let c = 8.0 * av[k].dotc(&av[l]).im;
            if c.abs() > tol.commutator {
                return Err(Error::NotAttainable {
                    k,
                    l,
                    magnitude: c.abs(),
                });
            }
        }
    }
    // Schur complement of the leading 1 in the Gramian is QFIM/4
    let means: Vec<f64> = av.iter().map(|v| psi.amplitudes().dotc(v).re).collect();
    let schur = DMatrix::from_fn(d, d, |k, l| av[k].dotc(&av[l]).re - means[k] * means[l]);
    let ev = FisherMatrix::symmetrized(schur).eigenvalues();
    let (min, max) = (ev[0], ev[d - 1]);
    if !(max > 0.0) || min <= tol.rank * max {
        return Err(Error::LinearlyDependent(min));
    }

    let mut raw = Vec::with_capacity(d + 1);
    raw.push(evolve_dense(psi.amplitudes(), gens, params, n_sites)?);
    for v in &av {
        raw.push(evolve_dense(v, gens, params, n_sites)?);
    }
    let basis = gram_schmidt(&raw)?;
    let mut elements: Vec<PovmElement> = basis.into_iter().map(PovmElement::DenseProjector).collect();
    elements.push(PovmElement::Complement);
    let mut labels = vec!["probe".to_string()];
    labels.extend((1..=d).map(|k| format!("e{k}")));
    labels.push("rest".into());
    Povm::from_parts(n_sites, elements, labels, None, true)
}

/// Modified Gram-Schmidt with a second pass whenever a vector loses more
/// than half its norm to the projections.
pub fn gram_schmidt(vectors: &[CVector]) -> Result<Vec<CVector>> {
    let mut basis: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let orig = v.norm();
        let mut w = v.clone();
        for pass in 0..2 {
            for e in &basis {
                let c = e.dotc(&w);
                w -= e * c;
            }
            if pass == 0 && w.norm() >= std::f64::consts::FRAC_1_SQRT_2 * orig {
                break;
            }
        }
        let n = w.norm();
        if !(n > 1e-8 * orig) {
            return Err(Error::LinearlyDependent(n / orig));
        }
        basis.push(w.unscale(n));
    }
    Ok(basis)
}

/// Offset at which the classical information of [`optimal_povm`] is
/// evaluated; at the construction point every outcome but one has zero
/// probability and zero gradient.
pub const SATURATION_OFFSET: f64 = 1e-6;

/// Classical FIM of a POVM built at `params`, evaluated at
/// `params + offset·(1,…,1)/√d`.
pub fn saturation_fim(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
    povm: &Povm,
    offset: f64,
) -> Result<crate::classical::ClassicalFim> {
    let d = gens.d() as f64;
    let shifted: Vec<f64> = params.iter().map(|p| p + offset / d.sqrt()).collect();
    let (p, g) = crate::classical::evaluate_dense_state(psi, gens, &shifted, povm, n_sites)?;
    Ok(crate::classical::classical_fim(&p, &g))
}

/// Numerical rank of the QFIM of `|φ>^{⊗N}` and the bound `2(D-1)`.
pub fn product_probe_rank_check(
    local_state: [C64; 2],
    gens: &GeneratorSet,
    params: &[f64],
    n_sites: usize,
) -> Result<(usize, usize)> {
    let psi = PureState::product(local_state, n_sites)?;
    let q = qfim_dense(&psi, gens, params, n_sites)?;
    Ok((q.rank(Tolerances::default().rank), 2 * (gens.local_dim() - 1)))
}

/// `d` unit vector along axis `k` (zero-based).
pub fn unit_vector(d: usize, k: usize) -> DVector<f64> {
    let mut v = DVector::zeros(d);
    v[k] = 1.0;
    v
}
