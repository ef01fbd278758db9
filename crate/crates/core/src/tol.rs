//! Central numerical tolerances.
//!
//! Every threshold used by the library lives here with its rationale, so the
//! test suites and the CLI pin the same values.

/// Unitarity / special-unitarity drift above which a group element is
/// re-projected onto the group (polar decomposition + phase fix). Products of
/// a few dozen well-conditioned unitaries drift by ≪ 1e−13.
pub const UNITARITY_PROJECT: f64 = 1e-12;

/// Constructor-level validation: inputs farther than this from the group (or
/// algebra) are rejected rather than silently projected.
pub const ELEMENT_VALIDATE: f64 = 1e-6;

/// Branch-gap tolerance for the principal logarithm, in angle units: if the
/// two best branch candidates are closer than this the argument is treated as
/// lying on the cut locus.
pub const BRANCH_GAP: f64 = 1e-9;

/// Relative tolerance for grouping curvature eigenvalues into multiplicity
/// clusters (and conjugate times into coincident groups).
pub const SPECTRUM_CLUSTER_REL: f64 = 1e-9;

/// Absolute floor for treating a curvature eigenvalue as zero (flat line).
/// Eigenvalues of ¼[[ξ,·],ξ] scale like |ξ|², so this is scaled by |ξ|² + 1.
pub const CURVATURE_ZERO: f64 = 1e-10;

/// Singular-value cutoff (relative to the largest) for numerical ranks,
/// kernels and column spans.
pub const RANK_REL: f64 = 1e-9;

/// Gradient-vanishing threshold for "critical": ‖grad f_n‖ ≤ CRITICAL · n.
/// Gradient components scale like 2n·(segment-log differences).
pub const CRITICAL: f64 = 1e-8;

/// Relative threshold for classifying a Hessian eigenvalue as null
/// (|λ| ≤ NULL_REL · max|λ|).
pub const NULL_REL: f64 = 1e-8;

/// Maximum principal angle (radians) for subspace-containment verdicts.
pub const PRINCIPAL_ANGLE: f64 = 1e-6;

/// Smallest scaled singular value above which the infinitesimal torus action
/// restricted to the negative eigenspace counts as kernel-free.
pub const TORUS_FIXED_SINGULAR: f64 = 1e-6;

/// Base step for finite-difference derivatives of the moment map (first and
/// second order); Richardson extrapolation halves it once.
pub const FD_STEP: f64 = 1e-4;

/// Allowed deficit in minimum-property sampling: f(sample) ≥ f(C) − MIN_DEFICIT.
pub const MIN_DEFICIT: f64 = 1e-9;

/// Matching tolerance for locating node times in a sampled path.
pub const NODE_TIME: f64 = 1e-12;

/// Tolerance on membership checks for fixed sets / preconditions involving
/// commutation with the flow generator.
pub const FIXED_SET: f64 = 1e-8;

/// Threshold on |sin(√e·Δt)| below which a segment boundary-value problem is
/// declared singular (endpoint conjugate along that eigenline).
pub const SEGMENT_CONJUGATE: f64 = 1e-9;
