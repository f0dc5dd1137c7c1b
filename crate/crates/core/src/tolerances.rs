//! Numerical tolerances and size limits, collected in one place.

/// Environment variable that overrides [`Tolerances::dense_cap`].
pub const DENSE_CAP_ENV: &str = "FIELDMETRO_DENSE_CAP";

/// Offset used in place of an exactly vanishing field, where the unit
/// direction of the field is undefined.
pub const PHI_LIMIT: [f64; 3] = [1e-7, 1e-7, 1e-7];

/// Field used in the scaling figure and the default scan.
pub const PHI_DEFAULT: [f64; 3] = [1e-4, 2e-4, 3e-4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max elementwise deviation of `H` from `H†`.
    pub hermitian: f64,
    /// Max elementwise deviation of `U U†` from identity.
    pub unitary: f64,
    /// Deviation of a pure state's squared norm from one.
    pub norm: f64,
    /// Trace deviation for density matrices.
    pub trace: f64,
    /// Smallest eigenvalue tolerated in a density matrix.
    pub min_eigenvalue: f64,
    /// Relative threshold (times the largest eigenvalue) below which an
    /// eigenvalue of a Fisher matrix counts as zero.
    pub rank: f64,
    /// Largest tolerated `|<[L_k, L_l]>|` for the attainability check.
    pub commutator: f64,
    /// Completeness and positivity slack for POVMs.
    pub povm: f64,
    /// Probability floor for the classical Fisher information.
    pub p_floor: f64,
    /// Agreement required between marginals passed to the reduced QFIM.
    pub marginal_consistency: f64,
    /// Largest number of qubits handled by statevector routines.
    pub dense_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            unitary: 1e-12,
            norm: 1e-12,
            trace: 1e-12,
            min_eigenvalue: -1e-10,
            rank: 1e-10,
            commutator: 1e-8,
            povm: 1e-10,
            p_floor: 1e-14,
            marginal_consistency: 1e-8,
            dense_cap: 14,
        }
    }
}

impl Tolerances {
    /// Defaults, with the dense cap taken from `FIELDMETRO_DENSE_CAP` if set.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        if let Some(cap) = std::env::var(DENSE_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            tol.dense_cap = cap;
        }
        tol
    }
}

/// The dense cap in effect for this process.
pub fn dense_cap() -> usize {
    Tolerances::from_env().dense_cap
}
