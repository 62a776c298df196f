//! Interpolation of subspace-valued curves on the Grassmann manifold Gr(n, p).
//!
//! Three coordinate systems are available:
//!
//! * plain local coordinates `Ψ(UUᵀ) = U₂U₁⁻¹` with inverse `φ`, which need no
//!   matrix decomposition ([`local_coords`]);
//! * maximum-volume coordinates, the same chart after a row permutation that
//!   makes the pivot block `U₁` well conditioned ([`maxvol`]);
//! * Riemannian normal coordinates built on the exponential and logarithm
//!   ([`grassmann`]).
//!
//! [`interpolation`] runs Lagrange and cubic Hermite schemes in any of them,
//! and [`experiments`] holds the data generators and pipelines that exercise
//! the schemes and the error bounds.

// `!(x < tol)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod grassmann;
pub mod interpolation;
pub mod linalg;
pub mod local_coords;
pub mod matrix_io;
pub mod maxvol;
pub mod rng;

#[cfg(test)]
pub(crate) mod dense;

pub use error::{Error, Result};
pub use grassmann::{
    canonical_inner, geodesic_accel_norm, grassmann_exp, grassmann_log, horizontal_lift,
    make_stiefel, principal_angles, subspace_distance, Geodesic, HorizontalTangent,
    PrincipalAngles, StiefelPoint,
};
pub use interpolation::{interpolate, SampleSet, SchemeId};
pub use local_coords::{chart_psi, param_phi, ChartFrame, LocalCoordMatrix};
pub use maxvol::{maxvol_rows, select_dataset_frame, MaxvolConfig, MaxvolInit, MaxvolReport};
