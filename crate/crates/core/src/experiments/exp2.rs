//! Interpolating POD subspaces of the FitzHugh–Nagumo system in the applied
//! voltage `I_a`, one interpolant per pair of consecutive samples.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::exp1::maxvol_rows_for;
use crate::experiments::fitzhugh_nagumo::{fn_solve, FnModelSpec};
use crate::experiments::pod::{pod_basis, pod_basis_derivative};
use crate::experiments::{linspace, ErrorRecord};
use crate::grassmann::{HorizontalTangent, StiefelPoint};
use crate::interpolation::{Interpolant, SampleSet, SchemeId};
use crate::maxvol::{MaxvolConfig, MaxvolRow};

#[derive(Debug, Clone)]
pub struct Experiment2Output {
    /// MVLagrange, MVHermite, NormalLagrange, NormalHermite, ordered by `t_star`
    /// then scheme.
    pub records: Vec<ErrorRecord>,
    /// MVLagrange and MVHermite on frames from the truncated maxvol run.
    pub degraded_records: Vec<ErrorRecord>,
    /// Two rows per interval (left and right sample), converged frames.
    pub maxvol: Vec<MaxvolRow>,
    /// Same layout for the truncated run.
    pub degraded_maxvol: Vec<MaxvolRow>,
}

struct IntervalResult {
    records: Vec<ErrorRecord>,
    degraded: Vec<ErrorRecord>,
    maxvol: Vec<MaxvolRow>,
    degraded_maxvol: Vec<MaxvolRow>,
}

/// Runs the pipeline with `points_per_interval` evaluation points on every
/// `[I_a(k), I_a(k+1)]`, end points included. `degraded_cfg` is typically
/// [`MaxvolConfig::degraded`].
pub fn run_experiment2(
    spec: &FnModelSpec,
    points_per_interval: usize,
    frame_cfg: &MaxvolConfig,
    degraded_cfg: &MaxvolConfig,
) -> Result<Experiment2Output> {
    spec.validate()?;
    let ia = &spec.i_a;
    if ia.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two voltage samples".into(),
        ));
    }
    if ia.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput(
            "voltage samples must be increasing".into(),
        ));
    }
    if points_per_interval < 2 {
        return Err(Error::InvalidInput(
            "need at least 2 points per interval".into(),
        ));
    }

    let data: Vec<(StiefelPoint, HorizontalTangent)> = ia
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            pod_basis_derivative(spec, x, spec.param_step, spec.p).map_err(Error::at_sample(i))
        })
        .collect::<Result<_>>()?;

    // grid per interval, sharing interior nodes only once
    let grids: Vec<Vec<f64>> = (0..ia.len() - 1)
        .map(|k| {
            let mut g = linspace(ia[k], ia[k + 1], points_per_interval);
            if k + 2 < ia.len() {
                g.pop();
            }
            g
        })
        .collect();
    let off_node: Vec<f64> = grids
        .iter()
        .flatten()
        .copied()
        .filter(|t| !ia.contains(t))
        .collect();
    let truths: Vec<StiefelPoint> = off_node
        .par_iter()
        .map(|&t| fn_solve(spec, t).and_then(|s| pod_basis(&s.u, spec.p)))
        .collect::<Result<_>>()?;
    let truth_at = |t: f64| -> StiefelPoint {
        match ia.iter().position(|&x| x == t) {
            Some(i) => data[i].0.clone(),
            None => {
                let j = off_node
                    .iter()
                    .position(|&x| x == t)
                    .expect("grid point solved");
                truths[j].clone()
            }
        }
    };

    let intervals: Vec<IntervalResult> = (0..ia.len() - 1)
        .into_par_iter()
        .map(|k| {
            let samples = SampleSet::new(
                vec![ia[k], ia[k + 1]],
                vec![data[k].0.clone(), data[k + 1].0.clone()],
                Some(vec![data[k].1.clone(), data[k + 1].1.clone()]),
            )?;
            let (frame, maxvol) = maxvol_rows_for(&samples, k, frame_cfg)?;
            let (weak, degraded_maxvol) = maxvol_rows_for(&samples, k, degraded_cfg)?;
            let schemes = [
                SchemeId::MVLagrange(frame.clone()),
                SchemeId::MVHermite(frame),
                SchemeId::NormalLagrange,
                SchemeId::NormalHermite,
            ];
            let weak_schemes = [
                SchemeId::MVLagrange(weak.clone()),
                SchemeId::MVHermite(weak),
            ];
            let evaluate = |schemes: &[SchemeId]| -> Result<Vec<ErrorRecord>> {
                let its: Vec<Interpolant> = schemes
                    .iter()
                    .map(|s| Interpolant::new(&samples, s))
                    .collect::<Result<_>>()?;
                let mut out = Vec::new();
                for &t in &grids[k] {
                    let truth = truth_at(t);
                    for (s, it) in schemes.iter().zip(&its) {
                        out.push(ErrorRecord::new(t, s.name(), &truth, &it.eval(t)?)?);
                    }
                }
                Ok(out)
            };
            Ok(IntervalResult {
                records: evaluate(&schemes)?,
                degraded: evaluate(&weak_schemes)?,
                maxvol,
                degraded_maxvol,
            })
        })
        .collect::<Result<_>>()?;

    let mut out = Experiment2Output {
        records: Vec::new(),
        degraded_records: Vec::new(),
        maxvol: Vec::new(),
        degraded_maxvol: Vec::new(),
    };
    for r in intervals {
        out.records.extend(r.records);
        out.degraded_records.extend(r.degraded);
        out.maxvol.extend(r.maxvol);
        out.degraded_maxvol.extend(r.degraded_maxvol);
    }
    Ok(out)
}
