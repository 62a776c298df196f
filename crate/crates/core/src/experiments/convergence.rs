//! Midpoint error against the sampling step `h`, with samples at `{0, h}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::linear_fit;
use crate::experiments::qr_curve::{QrCurve, QrCurveSpec};
use crate::grassmann::{subspace_distance, Geodesic, HorizontalTangent, StiefelPoint};
use crate::interpolation::{interpolate, SampleSet, SchemeKind, SCHEME_NAMES};
use crate::maxvol::{select_dataset_frame, MaxvolConfig};
use crate::rng::{random_stiefel, random_tangent, stream};

/// Errors at or below this are treated as exact and leave the slope undefined.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum ConvergenceCurve {
    Qr(QrCurveSpec),
    /// Unit-speed geodesic from a random point, drawn from `seed`.
    Geodesic {
        n: usize,
        p: usize,
        seed: u64,
    },
}

/// One line of the slope table. `slope` and `intercept` are NaN when every
/// error is at rounding level.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeRow {
    pub scheme: &'static str,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub hs: Vec<f64>,
    /// `errors[s][k]`: scheme `SCHEME_NAMES[s]` at step `hs[k]`.
    pub errors: Vec<Vec<f64>>,
    pub slopes: Vec<SlopeRow>,
}

enum Source {
    Qr(QrCurve),
    Geodesic(Geodesic),
}

impl Source {
    fn sample(&self, t: f64) -> Result<(StiefelPoint, HorizontalTangent)> {
        match self {
            Source::Qr(c) => c.sample(t),
            Source::Geodesic(g) => Ok(g.sample(t)),
        }
    }
}

pub fn write_slopes_csv<W: std::io::Write>(writer: W, rows: &[SlopeRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ErrorRow {
    scheme: &'static str,
    h: f64,
    error: f64,
}

/// Long format: one `scheme,h,error` line per measured midpoint.
pub fn write_errors_csv<W: std::io::Write>(writer: W, study: &ConvergenceStudy) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (scheme, errs) in SCHEME_NAMES.iter().zip(&study.errors) {
        for (h, error) in study.hs.iter().zip(errs) {
            w.serialize(ErrorRow {
                scheme,
                h: *h,
                error: *error,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn run_convergence_study(
    curve: &ConvergenceCurve,
    hs: &[f64],
    frame_cfg: &MaxvolConfig,
) -> Result<ConvergenceStudy> {
    if hs.len() < 4 || hs.windows(2).any(|w| !(w[0] > w[1])) || hs.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidInput(
            "need at least 4 positive, strictly decreasing steps".into(),
        ));
    }
    let source = match curve {
        ConvergenceCurve::Qr(spec) => Source::Qr(QrCurve::new(spec)?),
        ConvergenceCurve::Geodesic { n, p, seed } => {
            let mut rng = stream(*seed, "convergence/geodesic");
            let u = random_stiefel(&mut rng, *n, *p);
            Source::Geodesic(Geodesic::new(&random_tangent(&mut rng, &u, 1.0)))
        }
    };

    let mut errors = vec![Vec::with_capacity(hs.len()); SCHEME_NAMES.len()];
    for &h in hs {
        let (u0, d0) = source.sample(0.0)?;
        let (u1, d1) = source.sample(h)?;
        let samples = SampleSet::new(vec![0.0, h], vec![u0, u1], Some(vec![d0, d1]))?;
        let frame = select_dataset_frame(samples.points(), frame_cfg)?;
        let mid = 0.5 * h;
        let (truth, _) = source.sample(mid)?;
        for (s, name) in SCHEME_NAMES.iter().enumerate() {
            let scheme = name.parse::<SchemeKind>()?.with_frame(&frame);
            let approx = interpolate(&samples, &scheme, mid)?;
            errors[s].push(subspace_distance(&truth, &approx));
        }
    }
    let logh: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let slopes = SCHEME_NAMES
        .iter()
        .zip(&errors)
        .map(|(name, errs)| {
            if errs.iter().all(|e| *e <= EXACT_TOL) {
                return SlopeRow {
                    scheme: name,
                    slope: f64::NAN,
                    intercept: f64::NAN,
                };
            }
            let loge: Vec<f64> = errs.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
            let (slope, intercept) = linear_fit(&logh, &loge);
            SlopeRow {
                scheme: name,
                slope,
                intercept,
            }
        })
        .collect();
    Ok(ConvergenceStudy {
        hs: hs.to_vec(),
        errors,
        slopes,
    })
}
