//! Large-N backend for superpositions of uniform product states.
//!
//! Every quantity needed here reduces, per pair of terms, to a single-site
//! scalar raised to the power `N`. Those powers are taken in the log domain
//! so that `N = 10^4` neither underflows nor loses the phase.

use std::f64::consts::PI;

use crate::classical::{self, ClassicalFim, Povm};
use crate::error::{Error, Result};
use crate::hamiltonian::{a_local, single_particle_h, FieldParams, GeneratorSet};
use crate::operator::{
    unitary_from_hamiltonian, CMatrix, DensityMatrix, HermitianOperator, UnitaryOperator, C64,
    ZERO,
};
use crate::probe::{ProductStateSuperposition, ProductTerm};

/// A complex number stored as `exp(log_magnitude + i·phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_magnitude: f64,
    pub phase: f64,
}

fn wrap_phase(p: f64) -> f64 {
    let w = (p + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

impl LogComplex {
    pub const ZERO: Self = Self {
        log_magnitude: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: Self = Self {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn from_complex(z: C64) -> Self {
        if z == ZERO {
            return Self::ZERO;
        }
        Self {
            log_magnitude: z.norm().ln(),
            phase: z.arg(),
        }
    }

    pub fn to_complex(self) -> C64 {
        if self.is_zero() {
            return ZERO;
        }
        C64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    pub fn is_zero(self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self {
            log_magnitude: self.log_magnitude + other.log_magnitude,
            phase: wrap_phase(self.phase + other.phase),
        }
    }

    /// `z^n`, with `0^0 = 1`.
    pub fn powu(self, n: u64) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let nf = n as f64;
        Self {
            log_magnitude: nf * self.log_magnitude,
            phase: wrap_phase(nf * self.phase),
        }
    }
}

/// Sum of [`LogComplex`] values, rescaled by the largest magnitude.
#[derive(Debug, Default, Clone)]
pub struct LogSum {
    terms: Vec<LogComplex>,
}

impl LogSum {
    pub fn push(&mut self, z: LogComplex) {
        if !z.is_zero() {
            self.terms.push(z);
        }
    }

    pub fn finish(&self) -> LogComplex {
        let Some(max) = self
            .terms
            .iter()
            .map(|t| t.log_magnitude)
            .max_by(f64::total_cmp)
        else {
            return LogComplex::ZERO;
        };
        let sum: C64 = self
            .terms
            .iter()
            .map(|t| C64::from_polar((t.log_magnitude - max).exp(), t.phase))
            .sum();
        let mut out = LogComplex::from_complex(sum);
        if !out.is_zero() {
            out.log_magnitude += max;
        }
        out
    }
}

/// `<a|b>` for single-qubit vectors.
pub fn local_overlap(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn local_apply(op: &CMatrix, v: &[C64; 2]) -> [C64; 2] {
    [
        op[(0, 0)] * v[0] + op[(0, 1)] * v[1],
        op[(1, 0)] * v[0] + op[(1, 1)] * v[1],
    ]
}

fn check_same_register(a: &ProductStateSuperposition, b: &ProductStateSuperposition) -> Result<()> {
    if a.n_sites() != b.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: a.n_sites(),
            got: b.n_sites(),
        });
    }
    Ok(())
}

fn check_local(op: &CMatrix) -> Result<()> {
    if op.nrows() != 2 || op.ncols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: op.nrows(),
        });
    }
    Ok(())
}

/// `Σ_{jj'} conj(w_j) w_j' · g(α_j, β_j')` accumulated in the log domain.
fn pair_sum(
    a: &ProductStateSuperposition,
    b: &ProductStateSuperposition,
    g: impl Fn(&ProductTerm, &ProductTerm) -> LogComplex,
) -> LogComplex {
    let mut acc = LogSum::default();
    for ta in a.terms() {
        for tb in b.terms() {
            let w = LogComplex::from_complex(ta.weight.conj() * tb.weight);
            acc.push(w.mul(g(ta, tb)));
        }
    }
    acc.finish()
}

/// `<a|b>` in the log domain.
pub fn overlap_log(
    a: &ProductStateSuperposition,
    b: &ProductStateSuperposition,
) -> Result<LogComplex> {
    check_same_register(a, b)?;
    let n = a.n_sites() as u64;
    Ok(pair_sum(a, b, |ta, tb| {
        LogComplex::from_complex(local_overlap(&ta.local, &tb.local)).powu(n)
    }))
}

/// `<a|b>`.
pub fn overlap(a: &ProductStateSuperposition, b: &ProductStateSuperposition) -> Result<C64> {
    Ok(overlap_log(a, b)?.to_complex())
}

/// `<a|op^{⊗N}|b>` for a 2×2 operator.
pub fn product_operator_overlap(
    a: &ProductStateSuperposition,
    b: &ProductStateSuperposition,
    op: &CMatrix,
) -> Result<C64> {
    check_same_register(a, b)?;
    check_local(op)?;
    let n = a.n_sites() as u64;
    Ok(pair_sum(a, b, |ta, tb| {
        LogComplex::from_complex(local_overlap(&ta.local, &local_apply(op, &tb.local))).powu(n)
    })
    .to_complex())
}

/// Maps every term's local state through `op`.
pub(crate) fn apply_local_matrix(s: &ProductStateSuperposition, op: &CMatrix) -> ProductStateSuperposition {
    let terms = s
        .terms()
        .iter()
        .map(|t| ProductTerm {
            weight: t.weight,
            local: local_apply(op, &t.local),
        })
        .collect();
    s.with_terms(terms)
}

/// `u^{⊗N}|s>`.
pub fn apply_local_unitary(
    s: &ProductStateSuperposition,
    u: &UnitaryOperator,
) -> Result<ProductStateSuperposition> {
    check_local(u.entries())?;
    Ok(apply_local_matrix(s, u.entries()))
}

/// `<s|σ_k^{⊗N}|s>` for `k` in 1..=3.
pub fn pauli_string_expectation(s: &ProductStateSuperposition, k: usize) -> Result<f64> {
    if !(1..=3).contains(&k) {
        return Err(Error::ParameterIndex { index: k, d: 3 });
    }
    let z = product_operator_overlap(s, s, crate::operator::pauli(k).entries())?;
    debug_assert!(z.im.abs() <= 1e-10 * z.norm().max(1.0), "imaginary part {}", z.im);
    Ok(z.re)
}

/// `<a| Σ_n op^{[n]} |b>`; each term pair contributes
/// `N <α|op|β> <α|β>^{N-1}`.
pub fn inserted_sum_overlap(
    a: &ProductStateSuperposition,
    b: &ProductStateSuperposition,
    op: &CMatrix,
) -> Result<C64> {
    check_same_register(a, b)?;
    check_local(op)?;
    let n = a.n_sites() as u64;
    let count = LogComplex::from_complex(C64::new(n as f64, 0.0));
    Ok(pair_sum(a, b, |ta, tb| {
        let ins = LogComplex::from_complex(local_overlap(&ta.local, &local_apply(op, &tb.local)));
        let rest = LogComplex::from_complex(local_overlap(&ta.local, &tb.local)).powu(n - 1);
        count.mul(ins).mul(rest)
    })
    .to_complex())
}

/// Single-site marginal `Σ w_j conj(w_j') <α_j'|α_j>^{N-1} |α_j><α_j'|`.
pub fn single_site_marginal(s: &ProductStateSuperposition) -> Result<DensityMatrix> {
    marginal(s, 1)
}

/// Two-site marginal on any pair of sites (all pairs agree).
pub fn two_site_marginal(s: &ProductStateSuperposition) -> Result<DensityMatrix> {
    marginal(s, 2)
}

fn marginal(s: &ProductStateSuperposition, k: usize) -> Result<DensityMatrix> {
    if s.n_sites() < k {
        return Err(Error::InvalidParameters(format!(
            "{k}-site marginal of a {}-site state",
            s.n_sites()
        )));
    }
    let rest = (s.n_sites() - k) as u64;
    let dim = 1usize << k;
    let mut rho = CMatrix::zeros(dim, dim);
    for tj in s.terms() {
        let vj = local_power_vector(&tj.local, k);
        for tl in s.terms() {
            let c = tj.weight
                * tl.weight.conj()
                * LogComplex::from_complex(local_overlap(&tl.local, &tj.local))
                    .powu(rest)
                    .to_complex();
            if c == ZERO {
                continue;
            }
            let vl = local_power_vector(&tl.local, k);
            for r in 0..dim {
                for q in 0..dim {
                    rho[(r, q)] += c * vj[r] * vl[q].conj();
                }
            }
        }
    }
    DensityMatrix::new(rho)
}

fn local_power_vector(local: &[C64; 2], k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(1.0, 0.0)];
    for _ in 0..k {
        v = v.iter().flat_map(|a| [a * local[0], a * local[1]]).collect();
    }
    v
}

/// Outcome probabilities and their gradients at `φ`, evaluated entirely
/// with transfer scalars.
pub fn superposition_evaluation(
    probe: &ProductStateSuperposition,
    gens: &GeneratorSet,
    params: &[f64],
    povm: &Povm,
) -> Result<(classical::ProbabilityVector, classical::Gradients)> {
    classical::evaluate(probe, gens, params, povm, classical::Backend::Superposition)
}

/// Single-site pieces shared by the superposition backend.
pub(crate) struct LocalDynamics {
    pub u: UnitaryOperator,
    pub a: Vec<HermitianOperator>,
}

impl LocalDynamics {
    pub fn new(gens: &GeneratorSet, params: &[f64]) -> Result<Self> {
        let h = gens.hamiltonian(params)?;
        let u = unitary_from_hamiltonian(&h)?;
        let a = (0..gens.d())
            .map(|k| a_local(gens, params, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { u, a })
    }
}

/// POVM family used by [`large_n_fim`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PovmFamily {
    /// GHZ projectors plus their complement.
    GhzProjectors,
    /// `(1 ± σ_k^{⊗N})/6`.
    PauliStrings,
}

/// Classical Fisher information of the probe for one POVM family at any `N`.
///
/// `povm_deltas` of `None` searches the phase grid for the GHZ projectors;
/// `Some` uses the given phases and fails if they do not form a valid POVM.
pub fn large_n_fim(
    n_sites: usize,
    params: &FieldParams,
    family: PovmFamily,
    probe_deltas: [f64; 3],
    povm_deltas: Option<[f64; 3]>,
) -> Result<ClassicalFim> {
    let probe = crate::probe::triple_ghz_probe(n_sites, probe_deltas)?;
    let povm = match family {
        PovmFamily::GhzProjectors => match povm_deltas {
            Some(d) => classical::povm_ghz_projectors_strict(n_sites, d)?,
            None => classical::povm_ghz_projectors(n_sites, classical::default_povm_phases(n_sites))?,
        },
        PovmFamily::PauliStrings => classical::povm_pauli_strings(n_sites)?,
    };
    let gens = GeneratorSet::magnetic();
    let (p, g) = classical::evaluate(
        &probe,
        &gens,
        params.as_slice(),
        &povm,
        classical::Backend::Superposition,
    )?;
    Ok(classical::classical_fim(&p, &g))
}

/// `e^{-i h}` for the magnetic field, as used by the product backends.
pub fn field_unitary(params: &FieldParams) -> Result<UnitaryOperator> {
    unitary_from_hamiltonian(&single_particle_h(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{ONE, ZERO};
    use crate::probe::{dense_amplitudes, ghz_state, triple_ghz_probe};

    fn zeros(n: usize) -> ProductStateSuperposition {
        ProductStateSuperposition::product(n, [ONE, ZERO]).unwrap()
    }

    fn plus(n: usize) -> ProductStateSuperposition {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        ProductStateSuperposition::product(n, [C64::new(r, 0.0), C64::new(r, 0.0)]).unwrap()
    }

    #[test]
    fn log_complex_round_trip() {
        for z in [C64::new(0.3, -2.0), C64::new(-1e-200, 3e-201), C64::new(5.0, 0.0)] {
            let back = LogComplex::from_complex(z).to_complex();
            assert!((back - z).norm() <= 1e-12 * z.norm());
        }
        assert_eq!(LogComplex::from_complex(ZERO).to_complex(), ZERO);
        assert_eq!(LogComplex::ZERO.powu(0), LogComplex::ONE);
        assert!(LogComplex::ZERO.powu(3).is_zero());
    }

    #[test]
    fn long_products_do_not_underflow() {
        let f = LogComplex::from_complex(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        let p = f.powu(10_000);
        let want = -5000.0 * 2f64.ln();
        assert!(((p.log_magnitude - want) / want).abs() <= 1e-9);
        let mut acc = LogComplex::ONE;
        for _ in 0..10_000 {
            acc = acc.mul(f);
        }
        assert!(((acc.log_magnitude - want) / want).abs() <= 1e-9);
    }

    #[test]
    fn overlap_examples() {
        for n in [2, 5, 8] {
            let g = ghz_state(3, n, 0.0).unwrap();
            assert!((overlap(&g, &g).unwrap() - ONE).norm() < 1e-14);
        }
        let z = overlap(&zeros(100), &plus(100)).unwrap();
        let want = 2f64.powf(-50.0);
        assert!((z.re - want).abs() <= 1e-12 * want && z.im.abs() <= 1e-12 * want);
        // deep underflow still representable in the log domain
        let l = overlap_log(&zeros(10_000), &plus(10_000)).unwrap();
        assert!((l.log_magnitude + 5000.0 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn inserted_sums() {
        let s1 = crate::operator::pauli(1);
        let s3 = crate::operator::pauli(3);
        for n in [1, 4, 50] {
            assert_eq!(inserted_sum_overlap(&zeros(n), &zeros(n), s1.entries()).unwrap(), ZERO);
            let z = inserted_sum_overlap(&zeros(n), &zeros(n), s3.entries()).unwrap();
            assert!((z - C64::new(n as f64, 0.0)).norm() < 1e-12);
        }
        // zero single-site overlap with N >= 2 vanishes; N = 1 keeps the insertion
        let one = ProductStateSuperposition::product(1, [ZERO, ONE]).unwrap();
        let z = inserted_sum_overlap(&zeros(1), &one, s1.entries()).unwrap();
        assert!((z - ONE).norm() < 1e-15);
        let two = ProductStateSuperposition::product(2, [ZERO, ONE]).unwrap();
        assert_eq!(inserted_sum_overlap(&zeros(2), &two, s1.entries()).unwrap(), ZERO);
    }

    #[test]
    fn ghz_stabilizers() {
        for n in [2, 4, 6, 7] {
            let g = ghz_state(3, n, 0.0).unwrap();
            if n % 2 == 0 {
                assert!((pauli_string_expectation(&g, 3).unwrap() - 1.0).abs() < 1e-12);
            }
            assert!((pauli_string_expectation(&g, 1).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_preserves_overlaps() {
        let p = triple_ghz_probe(9, [0.0, 0.3, 1.1]).unwrap();
        let q = ghz_state(2, 9, 0.7).unwrap();
        let u = field_unitary(&FieldParams::new([0.2, -0.5, 0.9]).unwrap()).unwrap();
        let a = overlap(&p, &q).unwrap();
        let b = overlap(&apply_local_unitary(&p, &u).unwrap(), &apply_local_unitary(&q, &u).unwrap()).unwrap();
        assert!((a - b).norm() < 1e-11);
        let up = apply_local_unitary(&p, &u).unwrap();
        assert!((up.norm_squared() - 1.0).abs() < 1e-12);
        let id = UnitaryOperator::identity(2);
        assert_eq!(apply_local_unitary(&p, &id).unwrap(), p);
    }

    #[test]
    fn marginals_match_dense() {
        let p = triple_ghz_probe(6, [0.0, 0.5, 0.0]).unwrap();
        let psi = crate::operator::PureState::new(dense_amplitudes(&p).unwrap()).unwrap();
        let d1 = crate::operator::reduced_density_matrix(&psi, &[0]).unwrap();
        let d2 = crate::operator::reduced_density_matrix(&psi, &[2, 4]).unwrap();
        let e1 = single_site_marginal(&p).unwrap();
        let e2 = two_site_marginal(&p).unwrap();
        assert!(crate::operator::max_abs_entry(&(d1.entries() - e1.entries())) < 1e-13);
        assert!(crate::operator::max_abs_entry(&(d2.entries() - e2.entries())) < 1e-13);
    }

    #[test]
    fn mismatched_registers() {
        assert!(overlap(&zeros(3), &zeros(4)).is_err());
        assert!(pauli_string_expectation(&zeros(3), 0).is_err());
    }
}
