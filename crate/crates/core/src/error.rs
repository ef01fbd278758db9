//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the geometric and analytic operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The principal logarithm is ambiguous: two branch candidates are within
    /// tolerance of each other (the argument sits at or near the cut locus,
    /// e.g. an eigenvalue at or near −1). `gap` is measured in angle units.
    #[error("cut locus: principal logarithm ambiguous (branch gap {gap:.3e} < {tol:.3e})")]
    CutLocus { gap: f64, tol: f64 },

    /// A Jacobi boundary-value problem is singular: the segment endpoints are
    /// conjugate along the geodesic (sin(√e·Δt) = 0 on some eigenline).
    #[error(
        "conjugate segment: boundary-value problem singular on eigenline e={eigenvalue:.6e} over [{t0:.6}, {t1:.6}]"
    )]
    ConjugateSegment { eigenvalue: f64, t0: f64, t1: f64 },

    /// The input is degenerate for the requested operation (e.g. a zero
    /// initial derivative where a ratio is to be computed).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A documented precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Series assembly needs a Poincaré polynomial that was neither built in
    /// nor supplied.
    #[error("missing cohomology input for component {0}")]
    MissingCohomology(String),
}

pub type Result<T> = std::result::Result<T, Error>;
