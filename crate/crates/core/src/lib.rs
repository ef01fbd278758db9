//! Broken-geodesic approximation of the energy functional on based path
//! spaces over compact unitary groups, coupled to group-valued moment maps.
//!
//! The crate is organized bottom-up:
//!
//! * [`lie`] — SU(2)/SU(3) with the Ad-invariant metric ⟨X,Y⟩ = −c·Re tr(XY):
//!   exponential, principal logarithm with cut-locus detection, distance,
//!   injectivity radius, torus/root/lattice data, stabilizer algebras.
//! * [`jacobi`] — curvature spectrum K(W) = ¼[[ξ,W],ξ] along one-parameter
//!   geodesics, Jacobi fields (smooth and broken), conjugate points.
//! * [`qham`] — the shipped group-valued-moment-map spaces (point, conjugacy
//!   class, genus-h double), their tangent calculus, moment-map Hessians, and
//!   numerical verifiers for the structural identities they satisfy.
//! * [`pathspace`] — finite configuration spaces of broken geodesics, the
//!   energy f_n, the sublevel domain Y_n, sampling maps between configs and
//!   sampled paths, shortening steps, gradient and Hessian of f_n.
//! * [`morse`] — enumeration and classification of critical components,
//!   minimizing-manifold bases, torus-fixed-point checks, Morse/Poincaré
//!   series assembly and perfection reports.

pub mod error;
pub mod jacobi;
pub mod lie;
pub mod linalg;
pub mod morse;
pub mod pathspace;
pub mod qham;
pub mod series;
pub mod tol;

pub use error::{Error, Result};
