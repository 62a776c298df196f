//! Dense reference computations shared by the integration tests. Everything
//! here forms full `n × n` projectors, so keep `n` small.
#![allow(dead_code)]

use grassmann_interp::linalg::Mat;
use grassmann_interp::local_coords::FactoredTangent;
use grassmann_interp::StiefelPoint;
use nalgebra::SVD;

pub fn projector(u: &StiefelPoint) -> Mat {
    u.matrix() * u.matrix().transpose()
}

/// `ΔUᵀ + UΔᵀ`, the projector tangent with horizontal lift `Δ`.
pub fn lifted_tangent(u: &StiefelPoint, delta: &Mat) -> Mat {
    let a = delta * u.matrix().transpose();
    &a + a.transpose()
}

pub fn densify(x: &FactoredTangent) -> Mat {
    let ay = x.a() * x.y().transpose();
    &ay + ay.transpose() - x.y() * x.core() * x.y().transpose()
}

/// `√(½ tr(XᵀX))`.
pub fn canonical_norm(x: &Mat) -> f64 {
    (0.5 * x.dot(x)).sqrt()
}

/// Orthonormal basis of the column span by Gram–Schmidt, twice.
pub fn orthonormalize(m: &Mat) -> Mat {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for k in 0..j {
                let proj = q.column(k).dot(&q.column(j));
                let qk = q.column(k).clone_owned();
                q.column_mut(j).axpy(-proj, &qk, 1.0);
            }
        }
        let len = q.column(j).norm();
        q.column_mut(j).scale_mut(1.0 / len);
    }
    q
}

fn sorted_singular_values(m: &Mat) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Principal angles from paired cosines and sines, `atan2(sin, cos)`, which
/// stays accurate at both ends of `[0, π/2]`.
pub fn principal_angles(u: &Mat, v: &Mat) -> Vec<f64> {
    let p = u.ncols();
    let n = u.nrows();
    let cos = sorted_singular_values(&(u.transpose() * v));
    let resid = (Mat::identity(n, n) - u * u.transpose()) * v;
    let mut sin = sorted_singular_values(&resid);
    sin.resize(p, 0.0);
    sin.sort_by(f64::total_cmp);
    // ascending cosines pair with descending sines
    (0..p).map(|k| sin[p - 1 - k].atan2(cos[k])).rev().collect()
}

pub fn distance(u: &Mat, v: &Mat) -> f64 {
    principal_angles(u, v)
        .iter()
        .map(|t| t * t)
        .sum::<f64>()
        .sqrt()
}
