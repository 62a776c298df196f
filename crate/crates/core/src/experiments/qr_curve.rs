//! The matrix curve `Y(t) = Y₀ + tY₁ + t²Y₂ + t³Y₃` and its Q factor.

use crate::error::{Error, Result};
use crate::grassmann::{horizontal_lift, HorizontalTangent, StiefelPoint, RANK_TOL};
use crate::linalg::{self, Mat};
use crate::rng::{stream, uniform_matrix};

/// Size, seed and the entrywise uniform ranges of the four coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QrCurveSpec {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub ranges: [(f64, f64); 4],
}

impl QrCurveSpec {
    pub const DEFAULT_RANGES: [(f64, f64); 4] = [(0.0, 1.0), (0.0, 0.5), (0.0, 0.5), (0.0, 0.25)];

    pub fn new(n: usize, p: usize, seed: u64) -> Self {
        Self {
            n,
            p,
            seed,
            ranges: Self::DEFAULT_RANGES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.p > self.n {
            return Err(Error::InvalidInput(format!(
                "need n ≥ p ≥ 1, got n = {}, p = {}",
                self.n, self.p
            )));
        }
        if self.ranges.iter().any(|(lo, hi)| !(lo <= hi)) {
            return Err(Error::InvalidInput("coefficient range with lo > hi".into()));
        }
        Ok(())
    }
}

impl Default for QrCurveSpec {
    fn default() -> Self {
        Self::new(1000, 10, 42)
    }
}

/// Materialized coefficients `Y₀..Y₃`.
#[derive(Debug, Clone)]
pub struct QrCurve {
    y: [Mat; 4],
}

impl QrCurve {
    /// Draws `Yₖ` from stream `qr-curve/Yk` of the spec's seed.
    pub fn new(spec: &QrCurveSpec) -> Result<Self> {
        spec.validate()?;
        let y = std::array::from_fn(|k| {
            let mut rng = stream(spec.seed, &format!("qr-curve/Y{k}"));
            let (lo, hi) = spec.ranges[k];
            if lo == hi {
                Mat::from_element(spec.n, spec.p, lo)
            } else {
                uniform_matrix(&mut rng, spec.n, spec.p, lo, hi)
            }
        });
        Ok(Self { y })
    }

    pub fn from_coefficients(y: [Mat; 4]) -> Result<Self> {
        let shape = y[0].shape();
        if y.iter().any(|m| m.shape() != shape) {
            return Err(Error::InvalidInput("coefficients differ in shape".into()));
        }
        Ok(Self { y })
    }

    pub fn value(&self, t: f64) -> Mat {
        &self.y[0] + &self.y[1] * t + &self.y[2] * (t * t) + &self.y[3] * (t * t * t)
    }

    pub fn derivative(&self, t: f64) -> Mat {
        &self.y[1] + &self.y[2] * (2.0 * t) + &self.y[3] * (3.0 * t * t)
    }

    /// `qf(Y(t))`.
    pub fn point(&self, t: f64) -> Result<StiefelPoint> {
        Ok(qr_with_check(&self.value(t))?.0)
    }

    /// `qf(Y(t))` and the horizontal lift of its derivative.
    pub fn sample(&self, t: f64) -> Result<(StiefelPoint, HorizontalTangent)> {
        let (q, r) = qr_with_check(&self.value(t))?;
        let qdot = qr_factor_derivative(q.matrix(), &r, &self.derivative(t))?;
        Ok((q.clone(), horizontal_lift(&q, &qdot)?))
    }
}

fn qr_with_check(y: &Mat) -> Result<(StiefelPoint, Mat)> {
    let (q, r) = linalg::thin_qr(y);
    let diag = r.diagonal();
    let big = diag.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let small = diag.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    let ratio = if big > 0.0 { small / big } else { 0.0 };
    if !(ratio >= RANK_TOL) {
        return Err(Error::RankDeficient { ratio });
    }
    Ok((StiefelPoint::new(q)?, r))
}

/// Derivative of the Q factor of `Y = QR` along `Ẏ`:
/// with `A = QᵀẎR⁻¹`, `Q̇ = QΩ + (Ẏ R⁻¹ − QA)` where `Ω` is the skew matrix
/// sharing the strictly lower triangle of `A`.
pub fn qr_factor_derivative(q: &Mat, r: &Mat, ydot: &Mat) -> Result<Mat> {
    let yr = linalg::solve_right(r, ydot)?;
    let a = q.transpose() * &yr;
    let p = a.nrows();
    let omega = Mat::from_fn(p, p, |i, j| {
        if i > j {
            a[(i, j)]
        } else if i < j {
            -a[(j, i)]
        } else {
            0.0
        }
    });
    Ok(q * omega + yr - q * a)
}

/// `qf(Y(t))` and its horizontal velocity for the curve drawn from `spec`.
pub fn qr_curve_sample(spec: &QrCurveSpec, t: f64) -> Result<(StiefelPoint, HorizontalTangent)> {
    QrCurve::new(spec)?.sample(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let spec = QrCurveSpec::new(30, 3, 9);
        let a = QrCurve::new(&spec).unwrap().value(0.3);
        let b = QrCurve::new(&spec).unwrap().value(0.3);
        assert_eq!(a, b);
        let c = QrCurve::new(&QrCurveSpec::new(30, 3, 10))
            .unwrap()
            .value(0.3);
        assert_ne!(a, c);
    }

    #[test]
    fn constant_curve_has_zero_tangent() {
        let mut spec = QrCurveSpec::new(20, 3, 1);
        spec.ranges[1] = (0.0, 0.0);
        spec.ranges[2] = (0.0, 0.0);
        spec.ranges[3] = (0.0, 0.0);
        let (_, d) = qr_curve_sample(&spec, 0.4).unwrap();
        assert_eq!(d.norm(), 0.0);
    }

    #[test]
    fn q_derivative_matches_finite_difference() {
        let curve = QrCurve::new(&QrCurveSpec::new(40, 4, 3)).unwrap();
        let t = 0.35;
        let (q, r) = linalg::thin_qr(&curve.value(t));
        let qdot = qr_factor_derivative(&q, &r, &curve.derivative(t)).unwrap();
        let h = 1e-6;
        // thin_qr fixes diag(R) > 0, so Q is already sign-aligned along the curve
        let fd = (linalg::thin_qr(&curve.value(t + h)).0 - linalg::thin_qr(&curve.value(t - h)).0)
            / (2.0 * h);
        assert!((&qdot - &fd).norm() / fd.norm() <= 1e-5);
        let skew = q.transpose() * &qdot;
        assert!((&skew + skew.transpose()).norm() <= 1e-12);
    }

    #[test]
    fn rank_deficient_curve_is_rejected() {
        let zero = Mat::zeros(6, 2);
        let mut y0 = Mat::zeros(6, 2);
        y0[(0, 0)] = 1.0;
        y0[(0, 1)] = 1.0;
        let curve = QrCurve::from_coefficients([y0, zero.clone(), zero.clone(), zero]).unwrap();
        assert!(matches!(
            curve.sample(0.0),
            Err(Error::RankDeficient { .. })
        ));
    }
}
