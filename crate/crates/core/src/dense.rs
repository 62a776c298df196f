//! Dense `n × n` projector arithmetic, for checking low-rank code paths on
//! small problems only.

use crate::grassmann::StiefelPoint;
use crate::linalg::Mat;

pub fn projector(u: &StiefelPoint) -> Mat {
    u.matrix() * u.matrix().transpose()
}

/// Projector tangent `ΔUᵀ + UΔᵀ` of a horizontal lift `Δ`.
pub fn lifted_tangent(u: &StiefelPoint, delta: &Mat) -> Mat {
    delta * u.matrix().transpose() + u.matrix() * delta.transpose()
}

/// `‖X‖₀ = √(½ tr(XᵀX))`.
pub fn canonical_norm(x: &Mat) -> f64 {
    (0.5 * x.dot(x)).sqrt()
}
