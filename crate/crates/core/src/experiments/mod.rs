//! Data generators and end-to-end pipelines: the QR-factor curve, POD bases of
//! a FitzHugh–Nagumo system, convergence-order studies and bound sweeps.

pub mod bounds;
pub mod convergence;
pub mod exp1;
pub mod exp2;
pub mod fitzhugh_nagumo;
pub mod pod;
pub mod qr_curve;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::StiefelPoint;

pub use convergence::{run_convergence_study, ConvergenceCurve, ConvergenceStudy, SlopeRow};
pub use exp1::{run_experiment1, Experiment1Output};
pub use exp2::{run_experiment2, Experiment2Output};
pub use fitzhugh_nagumo::{fn_solve, FnModelSpec, FnSnapshots};
pub use pod::{pod_basis, pod_basis_derivative};
pub use qr_curve::{qr_curve_sample, QrCurve, QrCurveSpec};

/// Records whose representative is further than this from orthonormal fail the run.
pub const RECORD_FEASIBILITY_TOL: f64 = 1e-10;

/// One interpolation result compared against the true subspace.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ErrorRecord {
    pub t_star: f64,
    pub scheme: &'static str,
    pub rel_error: f64,
    pub feasibility: f64,
}

impl ErrorRecord {
    pub(crate) fn new(
        t_star: f64,
        scheme: &'static str,
        truth: &StiefelPoint,
        approx: &StiefelPoint,
    ) -> Result<Self> {
        let feasibility = approx.feasibility();
        if !(feasibility <= RECORD_FEASIBILITY_TOL) {
            return Err(Error::Infeasible { value: feasibility });
        }
        Ok(Self {
            t_star,
            scheme,
            rel_error: rel_error(truth, approx),
            feasibility,
        })
    }
}

/// `‖P − P̂‖_F / ‖P‖_F` for the orthogonal projectors onto both subspaces,
/// evaluated as `√2 ‖Û − U(UᵀÛ)‖_F / √p` without forming either projector.
pub fn rel_error(truth: &StiefelPoint, approx: &StiefelPoint) -> f64 {
    crate::grassmann::projector_gap(truth, approx) / (truth.p() as f64).sqrt()
}

pub fn write_records_csv<W: std::io::Write>(writer: W, records: &[ErrorRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares fit `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `count` evenly spaced points from `lo` to `hi`, both included.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::rng::{random_stiefel, stream};

    #[test]
    fn rel_error_matches_dense_projectors() {
        let mut rng = stream(70, "rel-error");
        for _ in 0..20 {
            let u = random_stiefel(&mut rng, 25, 4);
            let v = random_stiefel(&mut rng, 25, 4);
            let pu = dense::projector(&u);
            let dense_rel = (&pu - dense::projector(&v)).norm() / pu.norm();
            assert!((rel_error(&u, &v) - dense_rel).abs() <= 1e-10);
            let low_rank = (2.0 * 4.0 - 2.0 * (u.matrix().transpose() * v.matrix()).norm_squared())
                .max(0.0)
                .sqrt()
                / 2.0;
            assert!((low_rank - dense_rel).abs() <= 1e-10);
        }
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (s, c) = linear_fit(&x, &y);
        assert!((s - 2.5).abs() < 1e-14 && (c + 1.0).abs() < 1e-14);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.0, 1.0, 101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!((g[50] - 0.5).abs() < 1e-16);
    }
}
