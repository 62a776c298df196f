//! POD bases of snapshot matrices and their derivative in the model parameter.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::fitzhugh_nagumo::{fn_solve, FnModelSpec};
use crate::grassmann::{grassmann_log, HorizontalTangent, StiefelPoint};
use crate::linalg::{self, Mat};

/// Singular-value ratio `σ_p/σ₁` below which the POD basis is not well defined.
const POD_RANK_TOL: f64 = 1e-14;

/// Dominant `p` left singular vectors of `snapshots`.
pub fn pod_basis(snapshots: &Mat, p: usize) -> Result<StiefelPoint> {
    let (rows, cols) = snapshots.shape();
    if p == 0 || p > rows.min(cols) {
        return Err(Error::InvalidInput(format!(
            "POD rank {p} impossible for a {rows}x{cols} snapshot matrix"
        )));
    }
    let svd = linalg::thin_svd(snapshots);
    let ratio = if svd.s[0] > 0.0 {
        svd.s[p - 1] / svd.s[0]
    } else {
        0.0
    };
    if !(ratio >= POD_RANK_TOL) {
        return Err(Error::RankDeficient { ratio });
    }
    StiefelPoint::new(svd.u.columns(0, p).into_owned())
}

/// `[Log_u(plus) − Log_u(minus)] / (2h)`.
pub fn log_central_difference(
    u: &StiefelPoint,
    plus: &StiefelPoint,
    minus: &StiefelPoint,
    h: f64,
) -> Result<HorizontalTangent> {
    let lp = grassmann_log(u, plus)?;
    let lm = grassmann_log(u, minus)?;
    Ok(HorizontalTangent::project(
        u,
        &((lp.matrix() - lm.matrix()) / (2.0 * h)),
    ))
}

/// POD basis of the `u` snapshots at `i_a` and its derivative in `I_a`, from
/// solves at `i_a − h`, `i_a`, `i_a + h`.
pub fn pod_basis_derivative(
    spec: &FnModelSpec,
    i_a: f64,
    h: f64,
    p: usize,
) -> Result<(StiefelPoint, HorizontalTangent)> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "parameter step must be positive, got {h}"
        )));
    }
    let bases: Vec<StiefelPoint> = [i_a - h, i_a, i_a + h]
        .par_iter()
        .map(|&x| fn_solve(spec, x).and_then(|s| pod_basis(&s.u, p)))
        .collect::<Result<_>>()?;
    let delta = log_central_difference(&bases[1], &bases[2], &bases[0], h).map_err(|e| {
        if matches!(e, Error::CutLocus { .. }) {
            log::error!("POD bases {h} apart in I_a are too far apart; use a smaller step");
        }
        e
    })?;
    Ok((bases[1].clone(), delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{grassmann_exp, subspace_distance};
    use crate::rng::{gaussian_matrix, random_stiefel, random_tangent, stream};

    #[test]
    fn unit_columns_give_their_span() {
        let y = Mat::identity(9, 3);
        let u = pod_basis(&y, 3).unwrap();
        assert!(subspace_distance(&u, &StiefelPoint::identity(9, 3)) <= 1e-14);
    }

    #[test]
    fn constructed_svd_is_recovered_in_order() {
        let mut rng = stream(80, "pod-svd");
        let left = random_stiefel(&mut rng, 12, 3);
        let right = random_stiefel(&mut rng, 7, 3);
        let s = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let y = left.matrix() * s * right.matrix().transpose();
        for p in 1..=3 {
            let u = pod_basis(&y, p).unwrap();
            let expect = StiefelPoint::new(left.matrix().columns(0, p).into_owned()).unwrap();
            assert!(subspace_distance(&u, &expect) <= 1e-12);
        }
    }

    #[test]
    fn projection_residual_is_tail_energy() {
        let mut rng = stream(81, "pod-residual");
        let y = gaussian_matrix(&mut rng, 20, 30);
        let s = linalg::singular_values(&y);
        let u = pod_basis(&y, 5).unwrap();
        let resid = (&y - u.matrix() * (u.matrix().transpose() * &y)).norm_squared();
        let tail: f64 = s.iter().skip(5).map(|x| x * x).sum();
        assert!((resid - tail).abs() <= 1e-8 * tail.max(1.0));
    }

    #[test]
    fn rank_deficient_snapshots_rejected() {
        let y = Mat::from_fn(6, 4, |i, _| i as f64);
        assert!(matches!(pod_basis(&y, 2), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn log_difference_is_second_order_on_manufactured_curve() {
        use crate::dense;
        let mut rng = stream(82, "pod-manufactured");
        let u0 = random_stiefel(&mut rng, 30, 3);
        let d0 = random_tangent(&mut rng, &u0, 1.0);
        let w = random_tangent(&mut rng, &u0, 1.0);
        // Along a geodesic the Log difference is exact, so bend the curve.
        let curve = |s: f64| {
            let m = d0.matrix() * s + w.matrix() * (0.5 * s * s);
            grassmann_exp(&u0, &HorizontalTangent::project(&u0, &m), 1.0)
        };
        let s0 = 0.3;
        let at = curve(s0);
        let eps = 1e-6;
        let exact =
            (dense::projector(&curve(s0 + eps)) - dense::projector(&curve(s0 - eps))) / (2.0 * eps);
        let err = |h: f64| {
            let d = log_central_difference(&at, &curve(s0 + h), &curve(s0 - h), h).unwrap();
            (dense::lifted_tangent(&at, d.matrix()) - &exact).norm() / exact.norm()
        };
        let (e1, e2) = (err(0.02), err(0.01));
        assert!(e1 <= 10.0 * 0.02 * 0.02, "{e1}");
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn frozen_parameter_gives_zero_derivative() {
        let spec = FnModelSpec {
            n_x: 64,
            n_snapshots: 201,
            substeps: 40,
            frozen_i_a: Some(0.05),
            ..FnModelSpec::default()
        };
        let (_, d) = pod_basis_derivative(&spec, 0.05, 1e-3, 4).unwrap();
        assert!(d.norm() <= 1e-8);
    }
}
