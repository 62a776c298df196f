//! Randomized sweeps checking the distance and conditioning bounds of local
//! coordinates. Each sweep reports how many samples violated its inequality and
//! the smallest slack `bound − observed` seen.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::grassmann::{geodesic_accel_norm, projector_gap, subspace_distance, StiefelPoint};
use crate::linalg::Mat;
use crate::local_coords::{
    chart_psi, cond_phi_bound, coord_distance_to_base, dphi, param_phi, phi_condition_ceiling,
    psi_spread_bound, ChartFrame, LocalCoordMatrix,
};
use crate::rng::{gaussian_matrix, random_stiefel, random_tangent, stream, StreamRng};

/// Relative slack granted to floating-point evaluation of both sides.
const ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// `min (bound − observed)`; negative when some sample violated the bound.
    pub worst_margin: f64,
    /// Largest observed left-hand side.
    pub max_observed: f64,
}

impl BoundCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            samples: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            max_observed: 0.0,
        }
    }

    fn record(&mut self, observed: f64, bound: f64) {
        self.samples += 1;
        let margin = bound - observed;
        if observed > bound + ROUNDING * bound.abs().max(1.0) {
            self.violations += 1;
        }
        self.worst_margin = self.worst_margin.min(margin);
        self.max_observed = self.max_observed.max(observed);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn write_bounds_csv<W: std::io::Write>(writer: W, checks: &[BoundCheck]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for c in checks {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

/// Gaussian coordinates with a log-uniform scale in `[10⁻², 10²]`.
fn random_coords(rng: &mut StreamRng, n: usize, p: usize) -> LocalCoordMatrix {
    let scale = 10f64.powf(rng.random_range(-2.0..2.0));
    let b = gaussian_matrix(rng, n - p, p) * scale;
    LocalCoordMatrix::new(b, ChartFrame::identity(n, p)).expect("shape matches frame")
}

fn unit(m: Mat) -> Mat {
    let len = m.norm();
    m / len
}

const SIZES: [(usize, usize); 2] = [(10, 4), (500, 10)];

/// Distance from the base point: `√Σ arctan(σₖ)²` against principal angles.
pub fn coordinate_distance(seed: u64, count: usize) -> BoundCheck {
    let mut rng = stream(seed, "bounds/coordinate-distance");
    let mut check = BoundCheck::new("coordinate distance formula");
    for k in 0..count {
        let (n, p) = SIZES[k % 2];
        let b = random_coords(&mut rng, n, p);
        let base = param_phi(&LocalCoordMatrix::zero(b.frame().clone()));
        let diff = (coord_distance_to_base(&b) - subspace_distance(&base, &param_phi(&b))).abs();
        check.record(diff, 1e-10);
    }
    check
}

/// `‖Ψ(u) − Ψ(v)‖_F ≤ √(‖U₁⁻¹‖²−p) + √(‖V₁⁻¹‖²−p)` on random pairs.
pub fn chart_spread(seed: u64, count: usize) -> BoundCheck {
    let mut rng = stream(seed, "bounds/chart-spread");
    let mut check = BoundCheck::new("chart spread");
    while check.samples < count {
        let (n, p) = [(10, 3), (60, 5)][check.samples % 2];
        let u = random_stiefel(&mut rng, n, p);
        let v = random_stiefel(&mut rng, n, p);
        let frame = ChartFrame::identity(n, p);
        let (Ok(bu), Ok(bv), Ok(bound)) = (
            chart_psi(&u, &frame),
            chart_psi(&v, &frame),
            psi_spread_bound(&u, &v, &frame),
        ) else {
            continue;
        };
        check.record((bu.matrix() - bv.matrix()).norm(), bound);
    }
    check
}

/// `‖dφ_B(Δ)‖₀ ≤ cond_phi_bound(B) ≤ √(5/2) + 1` for unit `Δ`.
pub fn phi_condition(seed: u64, count: usize) -> (BoundCheck, BoundCheck) {
    let mut rng = stream(seed, "bounds/phi-condition");
    let mut local = BoundCheck::new("dphi against pointwise bound");
    let mut global = BoundCheck::new("dphi against global bound 2.5811");
    for k in 0..count {
        let (n, p) = SIZES[k % 2];
        let b = random_coords(&mut rng, n, p);
        let v = unit(gaussian_matrix(&mut rng, n - p, p));
        let observed = dphi(&b, &v).expect("shapes match").canonical_norm();
        let bound = cond_phi_bound(&b);
        local.record(observed, bound);
        global.record(observed, phi_condition_ceiling());
    }
    (local, global)
}

/// Curvature `2‖ΔᵀΔ‖_F ≤ 2` of unit-speed geodesics.
pub fn geodesic_curvature(seed: u64, count: usize) -> BoundCheck {
    let mut rng = stream(seed, "bounds/curvature");
    let mut check = BoundCheck::new("geodesic curvature");
    for k in 0..count {
        let (n, p) = [(10, 1), (20, 4), (50, 10)][k % 3];
        let u = random_stiefel(&mut rng, n, p);
        let d = random_tangent(&mut rng, &u, 1.0);
        check.record(geodesic_accel_norm(&d), 2.0);
    }
    check
}

/// `dist(φ(B), φ(B̃)) ≤ arcsin(M‖B − B̃‖_F)` whenever `‖B − B̃‖_F < 1/M`.
pub fn coordinate_perturbation(seed: u64, count: usize) -> BoundCheck {
    let mut rng = stream(seed, "bounds/perturbation");
    let m = phi_condition_ceiling();
    let mut check = BoundCheck::new("coordinate perturbation");
    for k in 0..count {
        let (n, p) = [(500, 10), (10, 4)][k % 2];
        let b = random_coords(&mut rng, n, p);
        let r = rng.random_range(0.0..1.0) / m;
        let e = unit(gaussian_matrix(&mut rng, n - p, p)) * r;
        let bt = LocalCoordMatrix::new(b.matrix() + &e, b.frame().clone()).expect("same shape");
        let dist = subspace_distance(&param_phi(&b), &param_phi(&bt));
        check.record(dist, (m * e.norm()).min(1.0).asin());
    }
    check
}

/// `dist ≥ ‖P − P̃‖₀ ≥ sin(dist)` with the low-rank projector gap.
pub fn distance_sandwich(seed: u64, count: usize) -> (BoundCheck, BoundCheck) {
    let mut rng = stream(seed, "bounds/sandwich");
    let mut upper = BoundCheck::new("projector gap below distance");
    let mut lower = BoundCheck::new("sine of distance below projector gap");
    while upper.samples < count {
        let (n, p) = [(8, 2), (20, 3), (30, 5)][upper.samples % 3];
        let u = random_stiefel(&mut rng, n, p);
        let len = rng.random_range(0.0..1.5);
        let v: StiefelPoint =
            crate::grassmann::grassmann_exp(&u, &random_tangent(&mut rng, &u, len), 1.0);
        let dist = subspace_distance(&u, &v);
        if dist >= std::f64::consts::FRAC_PI_2 {
            continue;
        }
        let gap = projector_gap(&u, &v) / std::f64::consts::SQRT_2;
        upper.record(gap, dist);
        lower.record(dist.sin(), gap);
    }
    (upper, lower)
}

/// Every sweep at its default sample count.
pub fn run_all(seed: u64) -> Vec<BoundCheck> {
    let (phi_local, phi_global) = phi_condition(seed, 1000);
    let (upper, lower) = distance_sandwich(seed, 500);
    vec![
        coordinate_distance(seed, 100),
        chart_spread(seed, 1000),
        phi_local,
        phi_global,
        geodesic_curvature(seed, 1000),
        coordinate_perturbation(seed, 200),
        upper,
        lower,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_pass() {
        assert!(coordinate_distance(1, 20).passed());
        assert!(chart_spread(1, 50).passed());
        let (a, b) = phi_condition(1, 50);
        assert!(a.passed() && b.passed());
        assert!(geodesic_curvature(1, 30).passed());
        assert!(coordinate_perturbation(1, 20).passed());
        let (a, b) = distance_sandwich(1, 30);
        assert!(a.passed() && b.passed());
    }
}
