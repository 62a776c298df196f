//! Interpolating the Q factor of a cubic matrix curve between `t = 0` and `t = 1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiments::qr_curve::{QrCurve, QrCurveSpec};
use crate::experiments::ErrorRecord;
use crate::interpolation::{Interpolant, SampleSet, SchemeId, SchemeKind, SCHEME_NAMES};
use crate::maxvol::{block_inverse_norm, select_dataset_frame_detailed, MaxvolConfig, MaxvolRow};

#[derive(Debug, Clone)]
pub struct Experiment1Output {
    /// Ordered by `t_star`, then by scheme in [`SCHEME_NAMES`] order.
    pub records: Vec<ErrorRecord>,
    /// One row per sample: inverse block norms before (identity frame) and
    /// after (the selected dataset frame).
    pub maxvol: Vec<MaxvolRow>,
}

pub(crate) fn maxvol_rows_for(
    samples: &SampleSet,
    first_index: usize,
    cfg: &MaxvolConfig,
) -> Result<(crate::local_coords::ChartFrame, Vec<MaxvolRow>)> {
    let sel = select_dataset_frame_detailed(samples.points(), cfg)?;
    let rows = sel
        .reports
        .iter()
        .zip(samples.points())
        .enumerate()
        .map(|(i, (rep, u))| MaxvolRow {
            inv_norm_after: block_inverse_norm(u, &sel.frame),
            ..rep.row(first_index + i)
        })
        .collect();
    Ok((sel.frame, rows))
}

pub fn run_experiment1(
    spec: &QrCurveSpec,
    grid: &[f64],
    frame_cfg: &MaxvolConfig,
) -> Result<Experiment1Output> {
    if let Some(t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidInput(format!(
            "grid point {t} outside [0, 1]"
        )));
    }
    let curve = QrCurve::new(spec)?;
    let (u0, d0) = curve.sample(0.0)?;
    let (u1, d1) = curve.sample(1.0)?;
    let samples = SampleSet::new(vec![0.0, 1.0], vec![u0, u1], Some(vec![d0, d1]))?;
    let (frame, maxvol) = maxvol_rows_for(&samples, 0, frame_cfg)?;

    let schemes: Vec<SchemeId> = SCHEME_NAMES
        .iter()
        .map(|name| name.parse::<SchemeKind>().map(|k| k.with_frame(&frame)))
        .collect::<Result<_>>()?;
    let interpolants: Vec<Interpolant> = schemes
        .iter()
        .map(|s| Interpolant::new(&samples, s))
        .collect::<Result<_>>()?;

    let mut ts = grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let per_t: Vec<Vec<ErrorRecord>> = ts
        .par_iter()
        .map(|&t| {
            let truth = curve.point(t)?;
            schemes
                .iter()
                .zip(&interpolants)
                .map(|(s, it)| ErrorRecord::new(t, s.name(), &truth, &it.eval(t)?))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(Experiment1Output {
        records: per_t.into_iter().flatten().collect(),
        maxvol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_reproduced() {
        let spec = QrCurveSpec::new(60, 4, 5);
        let out = run_experiment1(&spec, &[0.0, 1.0], &MaxvolConfig::default()).unwrap();
        assert_eq!(out.records.len(), 12);
        for r in &out.records {
            assert!(r.rel_error <= 1e-10, "{r:?}");
            assert!(r.feasibility <= 1e-12, "{r:?}");
        }
        assert_eq!(out.maxvol.len(), 2);
    }

    #[test]
    fn rejects_grid_outside_unit_interval() {
        let spec = QrCurveSpec::new(20, 2, 5);
        assert!(run_experiment1(&spec, &[0.5, 1.5], &MaxvolConfig::default()).is_err());
    }
}
