//! Realistic measurements and their classical Fisher information
//! `𝓕_kl = Σ_n ∂_k p(n|φ) ∂_l p(n|φ) / p(n|φ)`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::engine::{self, LocalDynamics};
use crate::error::{Error, Result};
use crate::operator::{apply_uniform, check_dense_cap, pauli, CMatrix, CVector, PureState, C64};
use crate::probe::{
    default_probe_phases, dense_amplitudes, dense_statevector, ghz_state, grid_phases,
    ProductStateSuperposition,
};
use crate::qfim::{a_vectors, evolve_dense, total_variance, FisherMatrix};
use crate::hamiltonian::GeneratorSet;
use crate::tolerances::Tolerances;

/// Registers up to this size are verified by diagonalizing every element.
pub const FULL_SPECTRUM_CAP: usize = 8;

/// Registers up to this size use the dense backend under [`Backend::Auto`].
pub const AUTO_DENSE_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Statevector algebra; limited by the dense cap.
    Dense,
    /// Transfer scalars on superpositions of product states; any `N`.
    Superposition,
    /// Dense up to [`AUTO_DENSE_MAX`] sites, superposition above.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PovmElement {
    /// `|Ψ><Ψ|` for a normalized superposition.
    Projector(ProductStateSuperposition),
    /// `|e><e|` for a unit statevector.
    DenseProjector(CVector),
    /// `(1 ± σ_k^{⊗N})/6`, direction `k` in 1..=3.
    PauliStringMix { direction: usize, plus: bool },
    /// Identity minus every other element.
    Complement,
}

/// A finite measurement on `N` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    n_sites: usize,
    elements: Vec<PovmElement>,
    labels: Vec<String>,
    deltas: Option<[f64; 3]>,
    orthonormal: bool,
}

impl Povm {
    /// `orthonormal` declares the projectors mutually orthogonal, so the
    /// complement is itself a projector.
    pub fn from_parts(
        n_sites: usize,
        elements: Vec<PovmElement>,
        labels: Vec<String>,
        deltas: Option<[f64; 3]>,
        orthonormal: bool,
    ) -> Result<Self> {
        if elements.len() != labels.len() {
            return Err(Error::InvalidPovm(format!(
                "{} elements but {} labels",
                elements.len(),
                labels.len()
            )));
        }
        let complements = elements
            .iter()
            .filter(|e| matches!(e, PovmElement::Complement))
            .count();
        if complements > 1 {
            return Err(Error::InvalidPovm("more than one complement".into()));
        }
        for e in &elements {
            match e {
                PovmElement::Projector(s) if s.n_sites() != n_sites => {
                    return Err(Error::DimensionMismatch {
                        expected: n_sites,
                        got: s.n_sites(),
                    })
                }
                PovmElement::DenseProjector(v) if v.len() != 1usize << n_sites => {
                    return Err(Error::DimensionMismatch {
                        expected: 1 << n_sites,
                        got: v.len(),
                    })
                }
                PovmElement::PauliStringMix { direction, .. } if !(1..=3).contains(direction) => {
                    return Err(Error::ParameterIndex {
                        index: *direction,
                        d: 3,
                    })
                }
                _ => {}
            }
        }
        Ok(Self {
            n_sites,
            elements,
            labels,
            deltas,
            orthonormal,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// GHZ phases used by the projector family.
    pub fn deltas(&self) -> Option<[f64; 3]> {
        self.deltas
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    fn supports_superposition(&self) -> bool {
        !self
            .elements
            .iter()
            .any(|e| matches!(e, PovmElement::DenseProjector(_)))
    }

    /// Every element as a dense `2^N × 2^N` matrix.
    pub fn dense_matrices(&self) -> Result<Vec<CMatrix>> {
        check_dense_cap(self.n_sites)?;
        let dim = 1usize << self.n_sites;
        let mut out: Vec<CMatrix> = Vec::with_capacity(self.len());
        let mut complement_at = None;
        for (i, e) in self.elements.iter().enumerate() {
            let m = match e {
                PovmElement::Projector(s) => {
                    let v = dense_amplitudes(s)?;
                    &v * v.adjoint()
                }
                PovmElement::DenseProjector(v) => v * v.adjoint(),
                PovmElement::PauliStringMix { direction, plus } => {
                    let sign = if *plus { 1.0 } else { -1.0 };
                    let s = pauli_string_matrix(*direction, self.n_sites);
                    (CMatrix::identity(dim, dim) + s * C64::new(sign, 0.0)).unscale(6.0)
                }
                PovmElement::Complement => {
                    complement_at = Some(i);
                    CMatrix::zeros(dim, dim)
                }
            };
            out.push(m);
        }
        if let Some(i) = complement_at {
            let sum = out.iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
            out[i] = CMatrix::identity(dim, dim) - sum;
        }
        Ok(out)
    }
}

/// Dense `σ_k^{⊗N}`.
pub fn pauli_string_matrix(k: usize, n_sites: usize) -> CMatrix {
    let dim = 1usize << n_sites;
    let s = pauli(k);
    let mut m = CMatrix::identity(dim, dim);
    for mut col in m.column_iter_mut() {
        let mut v: CVector = col.clone_owned();
        apply_uniform(&mut v, s.entries(), n_sites);
        col.copy_from(&v);
    }
    m
}

/// `(|φ_k^+>^{⊗N} + e^{iδ_k}|φ_k^->^{⊗N})/√2` for `k = 1, 2, 3` plus the
/// complement. The given phases are tried first; if they do not give a
/// positive complement, the phase grid is searched as offsets from them.
pub fn povm_ghz_projectors(n_sites: usize, deltas: [f64; 3]) -> Result<Povm> {
    match povm_ghz_projectors_strict(n_sites, deltas) {
        Err(Error::InvalidPovm(_)) => {}
        other => return other,
    }
    for offset in grid_phases() {
        let d = [0, 1, 2].map(|k| (deltas[k] + offset[k]).rem_euclid(TAU));
        if let Ok(p) = povm_ghz_projectors_strict(n_sites, d) {
            return Ok(p);
        }
    }
    Err(Error::InvalidPovm(format!(
        "no admissible GHZ phases on the grid for N = {n_sites}"
    )))
}

/// Starting phases for the GHZ projectors: each projector is antiphased to
/// the matching component of the probe, so that its probability moves at
/// first order in the field.
pub fn default_povm_phases(n_sites: usize) -> [f64; 3] {
    default_probe_phases(n_sites).map(|d| (d + PI).rem_euclid(TAU))
}

/// As [`povm_ghz_projectors`] without the search: invalid phases are an error.
pub fn povm_ghz_projectors_strict(n_sites: usize, deltas: [f64; 3]) -> Result<Povm> {
    if n_sites % 2 != 0 {
        return Err(Error::OddSites(n_sites));
    }
    let states = (1..=3)
        .map(|k| ghz_state(k, n_sites, deltas[k - 1]))
        .collect::<Result<Vec<_>>>()?;
    let lmax = ghz_gram_max_eigenvalue(&states)?;
    let tol = Tolerances::default().povm;
    if lmax > 1.0 + tol {
        return Err(Error::InvalidPovm(format!(
            "complement has eigenvalue {:e} for phases {deltas:?} at N = {n_sites}",
            1.0 - lmax
        )));
    }
    let mut elements: Vec<PovmElement> = states.into_iter().map(PovmElement::Projector).collect();
    elements.push(PovmElement::Complement);
    let labels = ["ghz1", "ghz2", "ghz3", "rest"].map(String::from).to_vec();
    Povm::from_parts(n_sites, elements, labels, Some(deltas), false)
}

/// Largest eigenvalue of the Gram matrix `<Ψ_k|Ψ_l>`; the complement of the
/// projectors is positive iff it is at most one.
pub fn ghz_gram_max_eigenvalue(states: &[ProductStateSuperposition]) -> Result<f64> {
    let n = states.len();
    let mut g = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = engine::overlap(&states[i], &states[j])?;
        }
    }
    let h = crate::operator::HermitianOperator::with_tolerance(g, 1e-9)?;
    let e = crate::operator::hermitian_eig(&h)?;
    Ok(e.values[n - 1])
}

/// `(1 ± σ_k^{⊗N})/6` for `k = 1, 2, 3`.
pub fn povm_pauli_strings(n_sites: usize) -> Result<Povm> {
    if n_sites == 0 {
        return Err(Error::InvalidParameters("n_sites must be positive".into()));
    }
    let mut elements = Vec::with_capacity(6);
    let mut labels = Vec::with_capacity(6);
    for (k, axis) in (1..=3).zip(["x", "y", "z"]) {
        for (plus, sign) in [(true, "+"), (false, "-")] {
            elements.push(PovmElement::PauliStringMix { direction: k, plus });
            labels.push(format!("{axis}{sign}"));
        }
    }
    Povm::from_parts(n_sites, elements, labels, None, false)
}

/// Outcome of a validity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmCheck {
    /// Smallest eigenvalue over all elements.
    pub min_eigenvalue: f64,
    /// Largest entry of `Σ Π - 1`.
    pub completeness_error: f64,
    /// Whether every element was diagonalized.
    pub full_spectrum: bool,
}

impl PovmCheck {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol && self.completeness_error <= tol
    }
}

/// Positivity and completeness from dense statevectors. Up to
/// [`FULL_SPECTRUM_CAP`] sites every element is diagonalized; above, the
/// projector families are reduced to the Gram matrix of their dense vectors
/// and the Pauli family to the involution `(σ_k^{⊗N})² = 1`.
pub fn verify_dense(povm: &Povm) -> Result<PovmCheck> {
    let n = povm.n_sites();
    check_dense_cap(n)?;
    if n <= FULL_SPECTRUM_CAP {
        let mats = povm.dense_matrices()?;
        let dim = 1usize << n;
        let mut min = f64::INFINITY;
        let mut sum = CMatrix::zeros(dim, dim);
        for m in &mats {
            let h = crate::operator::HermitianOperator::with_tolerance(m.clone(), 1e-9)?;
            let e = crate::operator::hermitian_eig(&h)?;
            min = min.min(e.values[0]);
            sum += m;
        }
        let err = crate::operator::max_abs_entry(&(sum - CMatrix::identity(dim, dim)));
        return Ok(PovmCheck {
            min_eigenvalue: min,
            completeness_error: err,
            full_spectrum: true,
        });
    }

    let mut vectors = Vec::new();
    // per direction: (number of + mixes, number of - mixes)
    let mut mixes = [(0i32, 0i32); 3];
    let mut min: f64 = 0.0;
    let mut has_complement = false;
    for e in povm.elements() {
        match e {
            PovmElement::Projector(s) => vectors.push(dense_amplitudes(s)?),
            PovmElement::DenseProjector(v) => vectors.push(v.clone()),
            PovmElement::PauliStringMix { direction, plus } => {
                // σ² = 1 and σ = σ† make (σ^{⊗N})² = 1, so (1 ± σ^{⊗N})/6 has
                // eigenvalues {0, 1/3}
                let s = pauli(*direction).into_entries();
                let dev = crate::operator::max_abs_entry(&(&s * &s - CMatrix::identity(2, 2)));
                min = min.min(-dev);
                let m = &mut mixes[direction - 1];
                if *plus {
                    m.0 += 1;
                } else {
                    m.1 += 1;
                }
            }
            PovmElement::Complement => has_complement = true,
        }
    }
    if has_complement && mixes.iter().any(|&(p, m)| p + m > 0) {
        return Err(Error::Unsupported(
            "complement of Pauli mixes above the full-spectrum cap".into(),
        ));
    }
    let completeness = if has_complement {
        // exact by construction
        0.0
    } else if vectors.is_empty() {
        let total: i32 = mixes.iter().map(|&(p, m)| p + m).sum();
        let string_part = mixes.iter().map(|&(p, m)| (p - m).abs()).max().unwrap_or(0);
        ((total as f64 / 6.0 - 1.0).abs()).max(string_part as f64 / 6.0)
    } else {
        // a few rank-one projectors cannot resolve the identity on 2^N
        1.0
    };
    if !vectors.is_empty() {
        let m = vectors.len();
        let g = DMatrix::from_fn(m, m, |i, j| vectors[i].dotc(&vectors[j]));
        for v in &vectors {
            min = min.min(-(v.norm_squared() - 1.0).abs());
        }
        if has_complement {
            // on span{v}, 1 - Σ|v><v| has eigenvalues 1 - λ(G); elsewhere 1
            let h = crate::operator::HermitianOperator::with_tolerance(g, 1e-9)?;
            let e = crate::operator::hermitian_eig(&h)?;
            min = min.min(1.0 - e.values[m - 1]);
        }
    }
    Ok(PovmCheck {
        min_eigenvalue: min,
        completeness_error: completeness,
        full_spectrum: false,
    })
}

/// `p(n|φ)`, clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    /// Entries must lie in `[-1e-12, 1 + 1e-12]` and sum to one within 1e-10.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        let slack = 1e-12;
        for (i, &p) in raw.iter().enumerate() {
            if !(p >= -slack && p <= 1.0 + slack) {
                return Err(Error::InvalidPovm(format!("outcome {i} has probability {p:e}")));
            }
        }
        let total: f64 = raw.iter().sum();
        if (total - 1.0).abs() > Tolerances::default().povm {
            return Err(Error::InvalidPovm(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            probs: raw.into_iter().map(|p| p.clamp(0.0, 1.0)).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `∂_k p(n|φ)`: one row per parameter, one column per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    entries: DMatrix<f64>,
}

impl Gradients {
    pub fn new(entries: DMatrix<f64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn d(&self) -> usize {
        self.entries.nrows()
    }

    pub fn outcomes(&self) -> usize {
        self.entries.ncols()
    }
}

fn resolve(backend: Backend, n_sites: usize, povm: &Povm) -> Backend {
    match backend {
        Backend::Auto if n_sites <= AUTO_DENSE_MAX || !povm.supports_superposition() => Backend::Dense,
        Backend::Auto => Backend::Superposition,
        b => b,
    }
}

/// Probabilities and analytic gradients of `povm` on `U(φ)|probe>`.
pub fn evaluate(
    probe: &ProductStateSuperposition,
    gens: &GeneratorSet,
    params: &[f64],
    povm: &Povm,
    backend: Backend,
) -> Result<(ProbabilityVector, Gradients)> {
    if probe.n_sites() != povm.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: povm.n_sites(),
            got: probe.n_sites(),
        });
    }
    match resolve(backend, probe.n_sites(), povm) {
        Backend::Dense => {
            let psi = dense_statevector(probe)?;
            evaluate_dense_state(&psi, gens, params, povm, probe.n_sites())
        }
        _ => evaluate_superposition(probe, gens, params, povm),
    }
}

pub fn outcome_probabilities(
    probe: &ProductStateSuperposition,
    gens: &GeneratorSet,
    params: &[f64],
    povm: &Povm,
    backend: Backend,
) -> Result<ProbabilityVector> {
    Ok(evaluate(probe, gens, params, povm, backend)?.0)
}

pub fn probability_gradients(
    probe: &ProductStateSuperposition,
    gens: &GeneratorSet,
    params: &[f64],
    povm: &Povm,
    backend: Backend,
) -> Result<Gradients> {
    Ok(evaluate(probe, gens, params, povm, backend)?.1)
}

/// Completes the complement column by subtraction and validates.
fn finish(
    mut probs: Vec<f64>,
    mut grads: DMatrix<f64>,
    complement: Option<usize>,
    orthonormal_rest: Option<(f64, Vec<f64>)>,
) -> Result<(ProbabilityVector, Gradients)> {
    if let Some(c) = complement {
        if let Some((p, g)) = orthonormal_rest {
            probs[c] = p;
            for (k, gk) in g.into_iter().enumerate() {
                grads[(k, c)] = gk;
            }
        } else {
            let others: f64 = probs.iter().enumerate().filter(|&(i, _)| i != c).map(|(_, p)| p).sum();
            probs[c] = 1.0 - others;
            for k in 0..grads.nrows() {
                let s: f64 = (0..grads.ncols()).filter(|&i| i != c).map(|i| grads[(k, i)]).sum();
                grads[(k, c)] = -s;
            }
        }
        if probs[c] < -Tolerances::default().povm {
            return Err(Error::InvalidPovm(format!(
                "complement probability {:e} is negative",
                probs[c]
            )));
        }
    }
    Ok((ProbabilityVector::new(probs)?, Gradients::new(grads)))
}

/// Dense backend on an arbitrary statevector.
pub fn evaluate_dense_state(
    psi: &PureState,
    gens: &GeneratorSet,
    params: &[f64],
    povm: &Povm,
    n_sites: usize,
) -> Result<(ProbabilityVector, Gradients)> {
    if povm.n_sites() != n_sites {
        return Err(Error::DimensionMismatch {
            expected: povm.n_sites(),
            got: n_sites,
        });
    }
    let av = a_vectors(psi, gens, params, n_sites)?;
    let psi_phi = evolve_dense(psi.amplitudes(), gens, params, n_sites)?;
    let chi: Vec<CVector> = av
        .iter()
        .map(|v| evolve_dense(v, gens, params, n_sites))
        .collect::<Result<_>>()?;
    let d = gens.d();
    let m = povm.len();
    let mut probs = vec![0.0; m];
    let mut grads = DMatrix::zeros(d, m);
    let mut complement = None;
    let mut projected: Vec<CVector> = Vec::new();
    for (i, e) in povm.elements().iter().enumerate() {
        let v = match e {
            PovmElement::Projector(s) => Some(dense_amplitudes(s)?),
            PovmElement::DenseProjector(v) => Some(v.clone()),
            PovmElement::PauliStringMix { direction, plus } => {
                let sign = if *plus { 1.0 } else { -1.0 };
                let s = pauli(*direction);
                let mut s_psi = psi_phi.clone();
                apply_uniform(&mut s_psi, s.entries(), n_sites);
                let ev = psi_phi.dotc(&s_psi).re;
                probs[i] = (1.0 + sign * ev) / 6.0;
                for k in 0..d {
                    // <ψ_φ|(1 ± S)|χ_k>, with S Hermitian
                    let z = psi_phi.dotc(&chi[k]) + s_psi.dotc(&chi[k]) * sign;
                    grads[(k, i)] = 2.0 * z.im / 6.0;
                }
                None
            }
            PovmElement::Complement => {
                complement = Some(i);
                None
            }
        };
        if let Some(v) = v {
            let c = v.dotc(&psi_phi);
            probs[i] = c.norm_sqr();
            for k in 0..d {
                grads[(k, i)] = 2.0 * (c.conj() * v.dotc(&chi[k])).im;
            }
            projected.push(v);
        }
    }
    let rest = match (complement, povm.is_orthonormal()) {
        (Some(_), true) => {
            let mut r = psi_phi.clone();
            for v in &projected {
                r -= v * v.dotc(&psi_phi);
            }
            let g = chi.iter().map(|c| 2.0 * r.dotc(c).im).collect();
            Some((r.norm_squared(), g))
        }
        _ => None,
    };
    finish(probs, grads, complement, rest)
}

fn evaluate_superposition(
    probe: &ProductStateSuperposition,
    gens: &GeneratorSet,
    params: &[f64],
    povm: &Povm,
) -> Result<(ProbabilityVector, Gradients)> {
    if !povm.supports_superposition() {
        return Err(Error::Unsupported(
            "dense projectors need the dense backend".into(),
        ));
    }
    if !probe.is_normalized() {
        return Err(Error::NotNormalized(probe.norm_squared()));
    }
    let dynamics = LocalDynamics::new(gens, params)?;
    let u = dynamics.u.entries();
    let u_dag = dynamics.u.adjoint();
    let psi_phi = engine::apply_local_matrix(probe, u);
    let d = gens.d();
    let m = povm.len();
    let mut probs = vec![0.0; m];
    let mut grads = DMatrix::zeros(d, m);
    let mut complement = None;
    let base: Vec<C64> = dynamics
        .a
        .iter()
        .map(|a| engine::inserted_sum_overlap(probe, probe, a.entries()))
        .collect::<Result<_>>()?;
    for (i, e) in povm.elements().iter().enumerate() {
        match e {
            PovmElement::Projector(s) => {
                let c = engine::overlap(s, &psi_phi)?;
                probs[i] = c.norm_sqr();
                // <Ψ|U A_k|ψ> = <U†Ψ| A_k |ψ>
                let back = engine::apply_local_matrix(s, u_dag.entries());
                for (k, a) in dynamics.a.iter().enumerate() {
                    let z = engine::inserted_sum_overlap(&back, probe, a.entries())?;
                    grads[(k, i)] = 2.0 * (c.conj() * z).im;
                }
            }
            PovmElement::PauliStringMix { direction, plus } => {
                let sign = if *plus { 1.0 } else { -1.0 };
                let s = pauli(*direction);
                let ev = engine::product_operator_overlap(&psi_phi, &psi_phi, s.entries())?.re;
                probs[i] = (1.0 + sign * ev) / 6.0;
                // <ψ|U† S U A_k|ψ>: U†σU is Hermitian, so the bra is (U†σU)^{⊗N}|ψ>
                let v = u_dag.entries() * s.entries() * u;
                let bra = engine::apply_local_matrix(probe, &v);
                for (k, a) in dynamics.a.iter().enumerate() {
                    let z = base[k] + engine::inserted_sum_overlap(&bra, probe, a.entries())? * sign;
                    grads[(k, i)] = 2.0 * z.im / 6.0;
                }
            }
            PovmElement::Complement => complement = Some(i),
            PovmElement::DenseProjector(_) => unreachable!("checked above"),
        }
    }
    finish(probs, grads, complement, None)
}

/// Classical Fisher information with the outcomes excluded by the
/// probability floor.
#[derive(Debug, Clone)]
pub struct ClassicalFim {
    pub matrix: FisherMatrix,
    /// Outcomes below the floor whose gradient was too large to neglect.
    pub singular_outcomes: Vec<usize>,
}

impl ClassicalFim {
    pub fn total_variance(&self) -> Result<f64> {
        total_variance(&self.matrix)
    }
}

/// `Σ_n ∂_k p ∂_l p / p`. Outcomes with `p` below the floor contribute only
/// when `|∂p| ≤ √p · 1e-4`; otherwise they are skipped and reported.
pub fn classical_fim(probs: &ProbabilityVector, grads: &Gradients) -> ClassicalFim {
    let floor = Tolerances::default().p_floor;
    let d = grads.d();
    let mut m = DMatrix::zeros(d, d);
    let mut singular = Vec::new();
    for (n, &p) in probs.probs().iter().enumerate() {
        let g = grads.entries().column(n);
        if p < floor {
            if g.iter().any(|x| x.abs() > p.sqrt() * 1e-4) {
                singular.push(n);
                continue;
            }
            if p <= 0.0 {
                continue;
            }
        }
        m += (&g * g.transpose()) / p;
    }
    ClassicalFim {
        matrix: FisherMatrix::symmetrized(m),
        singular_outcomes: singular,
    }
}
