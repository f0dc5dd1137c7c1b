//! Single-particle Hamiltonians, the derivative operators `a_k`, and the
//! closed forms used for a field coupled through the Pauli matrices.
//!
//! For `h(φ) = Σ_j φ_j h_j`, the operator
//!
//! ```text
//! a_k = ∫₀¹ dα e^{iαh} h_k e^{-iαh}
//! ```
//!
//! converts derivatives of `e^{-iH(φ)}` into `-i U A_k`. In the eigenbasis of
//! `h` the integral is a Hadamard product with the filter
//! `f(x) = (e^{ix} - 1)/(ix)` evaluated on eigenvalue gaps.

use crate::error::{Error, Result};
use crate::operator::{hermitian_eig, pauli, pauli_operators, CMatrix, HermitianOperator, C64};

/// Gap below which `f` is evaluated by its Taylor series.
const FILTER_SERIES_BELOW: f64 = 1e-6;
/// Field strength below which `sinc` is evaluated by its Taylor series.
const SINC_SERIES_BELOW: f64 = 1e-4;

/// Phases `φ_k = μ B_k / 2` of a three-component field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub phi: [f64; 3],
}

impl FieldParams {
    pub fn new(phi: [f64; 3]) -> Result<Self> {
        if phi.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameters(format!("non-finite phases {phi:?}")));
        }
        Ok(Self { phi })
    }

    /// Field strength `ξ = |φ|`.
    pub fn xi(&self) -> f64 {
        self.phi.iter().map(|p| p * p).sum::<f64>().sqrt()
    }

    /// Unit direction `η = φ/|φ|`, or `None` at the origin.
    pub fn eta(&self) -> Option<[f64; 3]> {
        let xi = self.xi();
        (xi > 0.0).then(|| self.phi.map(|p| p / xi))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.phi
    }
}

/// Single-particle generators `h_1 … h_d` sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    generators: Vec<HermitianOperator>,
}

impl GeneratorSet {
    pub fn new(generators: Vec<HermitianOperator>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidParameters("empty generator set".into()))?;
        let dim = first.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: g.dim(),
            });
        }
        Ok(Self { generators })
    }

    /// `σ1, σ2, σ3`: the three-dimensional field.
    pub fn magnetic() -> Self {
        Self {
            generators: (1..=3).map(pauli).collect(),
        }
    }

    /// Number of parameters.
    pub fn d(&self) -> usize {
        self.generators.len()
    }

    /// Local Hilbert-space dimension.
    pub fn local_dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }

    pub fn generator(&self, k: usize) -> Result<&HermitianOperator> {
        self.generators.get(k).ok_or(Error::ParameterIndex {
            index: k,
            d: self.d(),
        })
    }

    /// `h(φ) = Σ_j φ_j h_j`.
    pub fn hamiltonian(&self, params: &[f64]) -> Result<HermitianOperator> {
        self.check_params(params)?;
        let dim = self.local_dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (g, &p) in self.generators.iter().zip(params) {
            m += g.entries().scale(p);
        }
        HermitianOperator::new(m)
    }

    pub(crate) fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameters("non-finite parameter".into()));
        }
        Ok(())
    }
}

/// `Σ_k φ_k σ_k`.
pub fn single_particle_h(params: &FieldParams) -> HermitianOperator {
    GeneratorSet::magnetic()
        .hamiltonian(params.as_slice())
        .expect("three finite phases")
}

/// `f(x) = (e^{ix} - 1)/(ix)`, with `f(0) = 1`.
pub fn gap_filter(x: f64) -> C64 {
    if x.abs() < FILTER_SERIES_BELOW {
        gap_filter_series(x)
    } else {
        gap_filter_direct(x)
    }
}

/// Three-term Taylor expansion of [`gap_filter`].
pub fn gap_filter_series(x: f64) -> C64 {
    C64::new(1.0 - x * x / 6.0, x / 2.0)
}

/// Closed form of [`gap_filter`], written as `sin x / x + i·2 sin²(x/2)/x`
/// so the imaginary part does not cancel.
pub fn gap_filter_direct(x: f64) -> C64 {
    let s = (x / 2.0).sin();
    C64::new(x.sin() / x, 2.0 * s * s / x)
}

/// `a_k = ∫₀¹ e^{iαh} h_k e^{-iαh} dα` for `h = Σ φ_j h_j`; `k` is zero-based.
pub fn a_local(gens: &GeneratorSet, params: &[f64], k: usize) -> Result<HermitianOperator> {
    let hk = gens.generator(k)?;
    let h = gens.hamiltonian(params)?;
    let eig = hermitian_eig(&h)?;
    let v = eig.vectors.entries();
    let mut m = v.adjoint() * hk.entries() * v;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            m[(r, c)] *= gap_filter(eig.values[r] - eig.values[c]);
        }
    }
    HermitianOperator::new(v * m * v.adjoint())
}

/// [`a_local`] for the magnetic generators, with `k` in 1..=3.
pub fn a_local_field(params: &FieldParams, k: usize) -> Result<HermitianOperator> {
    check_direction(k)?;
    a_local(&GeneratorSet::magnetic(), params.as_slice(), k - 1)
}

fn check_direction(k: usize) -> Result<()> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(Error::ParameterIndex { index: k, d: 3 })
    }
}

/// `sinc ξ = sin ξ / ξ`.
pub fn sinc(xi: f64) -> f64 {
    if xi.abs() < SINC_SERIES_BELOW {
        let x2 = xi * xi;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        xi.sin() / xi
    }
}

/// `sinc² ξ`.
pub fn sinc2(xi: f64) -> f64 {
    let s = sinc(xi);
    s * s
}

/// `1 - sinc² ξ`, without cancellation for small `ξ`.
pub fn one_minus_sinc2(xi: f64) -> f64 {
    if xi.abs() < SINC_SERIES_BELOW {
        let x2 = xi * xi;
        x2 / 3.0 - 2.0 * x2 * x2 / 45.0
    } else {
        1.0 - sinc2(xi)
    }
}

/// Pauli coefficients `(c_1, c_2, c_3)` of the closed-form
/// `W_k = ∫∫ dα dβ e^{i(α-β)h} σ_k e^{-i(α-β)h}`.
pub fn w_coefficients(params: &FieldParams, k: usize) -> Result<[f64; 3]> {
    check_direction(k)?;
    let xi = params.xi();
    let Some(eta) = params.eta() else {
        // continuous limit at the origin
        let mut c = [0.0; 3];
        c[k - 1] = 1.0;
        return Ok(c);
    };
    let s2 = sinc2(xi);
    let oms = one_minus_sinc2(xi);
    let mut c = [0.0; 3];
    for (l, cl) in c.iter_mut().enumerate() {
        *cl = if l == k - 1 {
            let signed: f64 = (0..3)
                .map(|m| if m == l { eta[m] * eta[m] } else { -eta[m] * eta[m] })
                .sum();
            (1.0 + s2 + oms * signed) / 2.0
        } else {
            oms * eta[k - 1] * eta[l]
        };
    }
    Ok(c)
}

/// `W_k` as a 2×2 operator; `k` in 1..=3.
pub fn w_operator(params: &FieldParams, k: usize) -> Result<HermitianOperator> {
    let c = w_coefficients(params, k)?;
    let [s1, s2, s3, _] = pauli_operators();
    let m = s1.entries().scale(c[0]) + s2.entries().scale(c[1]) + s3.entries().scale(c[2]);
    HermitianOperator::new(m)
}

/// `Tr[a_k a_l] = Tr[σ_l W_k]`; `k, l` in 1..=3.
pub fn trace_pair(params: &FieldParams, k: usize, l: usize) -> Result<f64> {
    check_direction(l)?;
    let c = w_coefficients(params, k)?;
    // Tr[σ_l σ_m] = 2 δ_lm
    Ok(2.0 * c[l - 1])
}

/// Decomposition of `h = Σ_j φ_j h_j` in the unnormalized Pauli basis.
///
/// `coefficients[k]` multiplies `σ_{k+1}`; `identity_component` multiplies
/// the identity and only contributes an unobservable global phase. In the
/// normalized basis `P_l = σ_l/√2` the coefficients are larger by `√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliReduction {
    pub coefficients: [f64; 3],
    pub identity_component: f64,
}

impl PauliReduction {
    pub fn field(&self) -> FieldParams {
        FieldParams {
            phi: self.coefficients,
        }
    }
}

/// Reduces any qubit generator family to the three field components.
pub fn pauli_reduce(gens: &GeneratorSet, params: &[f64]) -> Result<PauliReduction> {
    if gens.local_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: gens.local_dim(),
        });
    }
    let h = gens.hamiltonian(params)?;
    let [s1, s2, s3, _] = pauli_operators();
    let coeff = |s: &HermitianOperator| (s.entries() * h.entries()).trace().re / 2.0;
    Ok(PauliReduction {
        coefficients: [coeff(&s1), coeff(&s2), coeff(&s3)],
        identity_component: h.trace().re / 2.0,
    })
}
