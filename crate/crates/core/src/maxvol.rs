//! Quasi-maximum-volume row selection and the dataset-level frame choice.
//!
//! [`maxvol_rows`] is the greedy row-swapping iteration: with `C = u·U₁⁻¹`,
//! swap the row holding the largest `|C_ij|` into pivot slot `j` until every
//! entry is at most `1 + δ`. Each swap multiplies `|det U₁|` by `|C_ij|`, so the
//! volume grows strictly and the iteration terminates.
//!
//! [`select_dataset_frame`] runs maxvol on every sample and keeps the candidate
//! frame whose worst `‖U₁⁻¹‖_F` over the whole dataset is smallest.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::StiefelPoint;
use crate::linalg::{self, Mat};
use crate::local_coords::{ChartFrame, BLOCK_COND_LIMIT};

/// Swaps between full recomputations of `C`.
const REFACTOR_EVERY: usize = 20;
/// Keeps the `δ = 0` iteration from cycling on rounding noise.
const SWAP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxvolConfig {
    pub delta: f64,
    pub max_iters: usize,
    pub init: MaxvolInit,
}

/// Starting pivot set of the swap iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MaxvolInit {
    /// Pivot rows of Gaussian elimination with partial pivoting.
    #[default]
    Lu,
    /// The leading `p` rows, i.e. the data as given. Falls back to `Lu` when
    /// that block is singular.
    Identity,
}

impl Default for MaxvolConfig {
    fn default() -> Self {
        Self {
            delta: 0.01,
            max_iters: 100,
            init: MaxvolInit::Lu,
        }
    }
}

impl MaxvolConfig {
    /// Three swaps starting from the rows as given: volume maximization cut
    /// short before it has repaired the pivot block.
    pub fn degraded() -> Self {
        Self {
            max_iters: 3,
            init: MaxvolInit::Identity,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "maxvol delta must be ≥ 0, got {}",
                self.delta
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("maxvol max_iters must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MaxvolReport {
    pub frame: ChartFrame,
    /// Row swaps performed.
    pub iters: usize,
    /// `max |(u·U₁⁻¹)_ij|` under the returned frame.
    pub final_max_entry: f64,
    /// `‖U₁⁻¹‖_F` under the identity frame.
    pub inv_norm_before: f64,
    /// `‖U₁⁻¹‖_F` under the returned frame.
    pub inv_norm_after: f64,
    /// `final_max_entry ≤ 1 + δ` was reached within `max_iters`.
    pub converged: bool,
}

/// One line of the maxvol report CSV.
#[derive(Debug, Clone, Serialize)]
pub struct MaxvolRow {
    pub sample_index: usize,
    pub iters: usize,
    pub final_max_entry: f64,
    pub inv_norm_before: f64,
    pub inv_norm_after: f64,
}

impl MaxvolReport {
    pub fn row(&self, sample_index: usize) -> MaxvolRow {
        MaxvolRow {
            sample_index,
            iters: self.iters,
            final_max_entry: self.final_max_entry,
            inv_norm_before: self.inv_norm_before,
            inv_norm_after: self.inv_norm_after,
        }
    }
}

pub fn write_maxvol_csv<W: std::io::Write>(writer: W, rows: &[MaxvolRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `‖U₁⁻¹‖_F` of the pivot block under `frame`; `+∞` when the block is
/// exactly singular.
pub fn block_inverse_norm(u: &StiefelPoint, frame: &ChartFrame) -> f64 {
    let (_, inv) = linalg::block_condition(&frame.pivot_block(u.matrix()));
    if inv.is_finite() {
        inv
    } else {
        log::debug!("singular pivot block under frame {:?}", frame.pivot_rows());
        f64::INFINITY
    }
}

/// Pivot rows chosen by Gaussian elimination with partial (row) pivoting.
fn lu_pivots(u: &Mat) -> Vec<usize> {
    let (n, p) = u.shape();
    let mut a = u.clone();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..p {
        let mut best = k;
        for i in k + 1..n {
            if a[(order[i], k)].abs() > a[(order[best], k)].abs() {
                best = i;
            }
        }
        order.swap(k, best);
        let pivot_row = order[k];
        let pivot = a[(pivot_row, k)];
        if pivot == 0.0 {
            continue;
        }
        for &r in &order[k + 1..] {
            let l = a[(r, k)] / pivot;
            if l != 0.0 {
                for c in k + 1..p {
                    a[(r, c)] -= l * a[(pivot_row, c)];
                }
            }
        }
    }
    order.truncate(p);
    order
}

fn coefficients(u: &Mat, pivots: &[usize]) -> Result<Mat> {
    let block = Mat::from_fn(pivots.len(), u.ncols(), |i, j| u[(pivots[i], j)]);
    linalg::solve_right(&block, u)
}

fn argmax_abs(c: &Mat) -> (usize, usize, f64) {
    let mut best = (0, 0, 0.0);
    for j in 0..c.ncols() {
        for i in 0..c.nrows() {
            let v = c[(i, j)].abs();
            if v > best.2 {
                best = (i, j, v);
            }
        }
    }
    best
}

/// Greedy maxvol row selection on `u`, started as `cfg.init` says.
pub fn maxvol_rows(u: &StiefelPoint, cfg: &MaxvolConfig) -> Result<MaxvolReport> {
    cfg.validate()?;
    let (n, p) = (u.n(), u.p());
    let um = u.matrix();
    let inv_norm_before = block_inverse_norm(u, &ChartFrame::identity(n, p));

    let (mut pivots, mut c) = match cfg.init {
        MaxvolInit::Lu => {
            let pivots = lu_pivots(um);
            let c = coefficients(um, &pivots)?;
            (pivots, c)
        }
        MaxvolInit::Identity => {
            let leading: Vec<usize> = (0..p).collect();
            match coefficients(um, &leading) {
                Ok(c) => (leading, c),
                Err(_) => {
                    log::warn!("leading block is singular; starting maxvol from LU pivots");
                    let pivots = lu_pivots(um);
                    let c = coefficients(um, &pivots)?;
                    (pivots, c)
                }
            }
        }
    };
    let limit = 1.0 + cfg.delta + SWAP_SLACK;
    let mut iters = 0;
    let mut since_refactor = 0;
    loop {
        let (i, j, big) = argmax_abs(&c);
        if big <= limit || iters >= cfg.max_iters {
            break;
        }
        pivots[j] = i;
        iters += 1;
        since_refactor += 1;
        if since_refactor == REFACTOR_EVERY {
            c = coefficients(um, &pivots)?;
            since_refactor = 0;
        } else {
            // C ← C − C[:, j]·(C[i, :] − e_jᵀ) / C[i, j]
            let cij = c[(i, j)];
            let col = c.column(j).clone_owned();
            let mut row = c.row(i).clone_owned();
            row[j] -= 1.0;
            c -= col * (row / cij);
        }
    }
    let c = coefficients(um, &pivots)?;
    let (_, _, final_max_entry) = argmax_abs(&c);
    let converged = final_max_entry <= limit;
    let frame = ChartFrame::from_pivots(n, &pivots)?;
    let inv_norm_after = block_inverse_norm(u, &frame);

    if inv_norm_after > inv_norm_before + 1e-9 {
        // Volume went up but the Frobenius norm of the inverse did not come
        // down; keep the identity frame so the block is never made worse.
        log::warn!(
            "maxvol frame raised ‖U₁⁻¹‖_F from {inv_norm_before} to {inv_norm_after}; keeping the identity frame"
        );
        let identity = ChartFrame::identity(n, p);
        let (_, _, entry) = argmax_abs(&coefficients(um, identity.pivot_rows())?);
        return Ok(MaxvolReport {
            frame: identity,
            iters,
            final_max_entry: entry,
            inv_norm_before,
            inv_norm_after: inv_norm_before,
            converged: false,
        });
    }
    if !converged {
        log::info!("maxvol stopped after {iters} swaps with max entry {final_max_entry}");
    }
    Ok(MaxvolReport {
        frame,
        iters,
        final_max_entry,
        inv_norm_before,
        inv_norm_after,
        converged,
    })
}

/// Outcome of the dataset-level frame choice with everything that went into it.
#[derive(Debug, Clone)]
pub struct FrameSelection {
    pub frame: ChartFrame,
    /// Index of the sample whose maxvol frame won.
    pub chosen: usize,
    /// Per-candidate `maxᵢ ‖(𝒫ⱼ fᵢ)₁⁻¹‖_F`; `+∞` for unusable candidates.
    pub criteria: Vec<f64>,
    /// Maxvol report of every sample, in sample order.
    pub reports: Vec<MaxvolReport>,
}

/// Worst pivot-block inverse norm over all samples under `frame`, and whether
/// every block stays under the condition limit.
pub fn frame_criterion(samples: &[StiefelPoint], frame: &ChartFrame) -> (f64, bool) {
    let mut worst: f64 = 0.0;
    let mut usable = true;
    for s in samples {
        let (cond, inv) = linalg::block_condition(&frame.pivot_block(s.matrix()));
        usable &= cond <= BLOCK_COND_LIMIT;
        worst = worst.max(inv);
    }
    (worst, usable)
}

/// Dataset-level frame choice; see [`select_dataset_frame_detailed`].
pub fn select_dataset_frame(samples: &[StiefelPoint], cfg: &MaxvolConfig) -> Result<ChartFrame> {
    select_dataset_frame_detailed(samples, cfg).map(|s| s.frame)
}

/// Runs maxvol on every sample and returns the candidate frame minimizing
/// `maxᵢ ‖(𝒫ⱼ fᵢ)₁⁻¹‖_F`. Ties go to the lowest sample index.
pub fn select_dataset_frame_detailed(
    samples: &[StiefelPoint],
    cfg: &MaxvolConfig,
) -> Result<FrameSelection> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidInput("frame selection needs at least one sample".into()))?;
    if let Some(bad) = samples
        .iter()
        .find(|s| s.matrix().shape() != first.matrix().shape())
    {
        return Err(Error::dims(
            format!("{}x{}", first.n(), first.p()),
            format!("{}x{}", bad.n(), bad.p()),
        ));
    }
    let reports: Vec<MaxvolReport> = samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| maxvol_rows(s, cfg).map_err(Error::at_sample(i)))
        .collect::<Result<_>>()?;
    let scored: Vec<(f64, bool)> = reports
        .par_iter()
        .map(|r| frame_criterion(samples, &r.frame))
        .collect();

    let mut chosen: Option<usize> = None;
    for (j, &(crit, usable)) in scored.iter().enumerate() {
        if usable && chosen.is_none_or(|k| crit < scored[k].0) {
            chosen = Some(j);
        }
    }
    let Some(chosen) = chosen else {
        return Err(Error::NoUsableFrame {
            worst: scored.iter().map(|s| s.0).collect(),
        });
    };
    Ok(FrameSelection {
        frame: reports[chosen].frame.clone(),
        chosen,
        criteria: scored
            .iter()
            .map(|&(c, ok)| if ok { c } else { f64::INFINITY })
            .collect(),
        reports,
    })
}
