//! Crate-wide error type. Diagnostics are carried as f64 regardless of the
//! scalar the computation ran in.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Stress state has no well-defined invariants (zero deviator or equal
    /// extreme principal values).
    #[error("degenerate stress state: {0}")]
    DegenerateStress(&'static str),

    /// A tensor that must be inverted is singular to working precision.
    #[error("singular tensor")]
    SingularTensor,

    /// An iterative solve did not reach its tolerance.
    #[error("no convergence in {what} after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A state or argument violates a precondition.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The Lemaitre-type damage tensor reached its admissible boundary.
    #[error("fully damaged state: max damage eigenvalue {max_eig:.6}")]
    FullyDamaged { max_eig: f64 },

    /// The integrity tensor lost positive definiteness.
    #[error("integrity tensor breakdown: min eigenvalue {min_eig:e}")]
    IntegrityBreakdown { min_eig: f64 },

    /// Principal-stress recovery from invariants is degenerate (Lode parameter
    /// at the axisymmetric limit).
    #[error("degenerate invariant inversion: {0}")]
    DegenerateInversion(&'static str),

    /// Neither root branch of the invariant inversion reproduces the inputs.
    #[error("no valid branch in invariant inversion (eta {eta}, lode {lode})")]
    NoValidBranch { eta: f64, lode: f64 },

    /// A direction vector is not unit length.
    #[error("direction is not unit length (norm {norm})")]
    NonUnitDirection { norm: f64 },

    /// A bracketing search failed to enclose the target.
    #[error("no bracket for {what} (target {target:e})")]
    NoBracket { what: &'static str, target: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
