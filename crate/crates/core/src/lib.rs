//! Simultaneous estimation of the three components of a magnetic field with
//! entangled qubit probes.
//!
//! The single-particle Hamiltonian is `h = φ·σ` and `N` particles evolve under
//! `U(φ) = e^{-iφ·Σ_n σ^{[n]}}`. The crate computes the quantum Fisher
//! information matrix of a probe by several independent routes, builds the
//! measurements that saturate or approach the quantum bound, and evaluates
//! GHZ-type probes exactly at any particle number.

pub mod classical;
pub mod engine;
pub mod error;
pub mod hamiltonian;
pub mod operator;
pub mod probe;
pub mod qfim;
pub mod scan;
pub mod tolerances;

pub use classical::{Backend, ClassicalFim, Povm, PovmElement};
pub use error::{Error, Result};
pub use hamiltonian::{FieldParams, GeneratorSet};
pub use operator::{DensityMatrix, HermitianOperator, PureState, UnitaryOperator, C64};
pub use probe::ProductStateSuperposition;
pub use qfim::FisherMatrix;
pub use tolerances::Tolerances;
