//! Points, tangent vectors, geodesics and distances on Gr(n, p).
//!
//! A subspace is stored through a column-orthonormal representative
//! `U ∈ St(n, p)`; the projector `UUᵀ` is never formed. Tangent vectors are
//! stored as horizontal lifts `Δ` with `UᵀΔ = 0`.
//!
//! # Metric convention
//!
//! The canonical metric on projector tangents is `⟨X, Y⟩₀ = ½ tr(XᵀY)`. For the
//! horizontal lift `Δ = XU` of a projector tangent `X`, one has
//! `‖X‖₀² = ½ · 2 tr(ΔᵀΔ) = ‖Δ‖_F²`. So the plain Frobenius inner product of
//! lifts *is* the canonical inner product of the projector tangents, and
//! [`canonical_inner`] returns `tr(ΔₓᵀΔᵧ)` with no factor ½.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, orthonormality_defect, thin_qr, thin_svd, Mat};

/// Tolerance on `‖uᵀu − I‖_F` for a matrix to count as a Stiefel point.
pub const FEASIBILITY_TOL: f64 = 1e-10;
/// Tolerance on `‖uᵀΔ‖_F` for a matrix to count as horizontal.
pub const HORIZONTAL_TOL: f64 = 1e-10;
/// Relative QR pivot below which a matrix is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-12;
/// `cond(uᵀv)` above which the logarithm refuses to run.
pub const CUT_LOCUS_COND: f64 = 1e12;
/// Principal angles below this are recomputed from sines.
const SMALL_ANGLE: f64 = 1e-4;

/// A column-orthonormal `n × p` matrix standing for the subspace it spans.
///
/// Cloning is cheap: the matrix sits behind an `Arc`, which also lets tangent
/// vectors carry their base point around.
#[derive(Debug, Clone)]
pub struct StiefelPoint {
    u: Arc<Mat>,
}

impl StiefelPoint {
    /// Wraps `u` after checking `‖uᵀu − I‖_F ≤ 1e-10` and `n ≥ p ≥ 1`.
    pub fn new(u: Mat) -> Result<Self> {
        check_shape(&u)?;
        let defect = orthonormality_defect(&u);
        if !(defect <= FEASIBILITY_TOL) {
            return Err(Error::InvalidInput(format!(
                "matrix is not column-orthonormal: ‖uᵀu − I‖_F = {defect:e}"
            )));
        }
        Ok(Self::from_orthonormal(u))
    }

    pub(crate) fn from_orthonormal(u: Mat) -> Self {
        debug_assert!(
            orthonormality_defect(&u) <= FEASIBILITY_TOL,
            "feasibility lost: {:e}",
            orthonormality_defect(&u)
        );
        Self { u: Arc::new(u) }
    }

    /// `I_{n,p}`, the first `p` columns of the identity.
    pub fn identity(n: usize, p: usize) -> Self {
        Self::from_orthonormal(Mat::identity(n, p))
    }

    pub fn matrix(&self) -> &Mat {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn p(&self) -> usize {
        self.u.ncols()
    }

    /// `‖uᵀu − I‖_F`.
    pub fn feasibility(&self) -> f64 {
        orthonormality_defect(&self.u)
    }

    pub fn same_base(&self, other: &StiefelPoint) -> bool {
        Arc::ptr_eq(&self.u, &other.u) || *self.u == *other.u
    }
}

fn check_shape(m: &Mat) -> Result<()> {
    let (n, p) = m.shape();
    if p == 0 || n < p {
        return Err(Error::InvalidInput(format!("need n ≥ p ≥ 1, got {n}x{p}")));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    Ok(())
}

/// Horizontal lift `Δ` of a Grassmann tangent vector, tied to its base point.
#[derive(Debug, Clone)]
pub struct HorizontalTangent {
    delta: Mat,
    base: StiefelPoint,
}

impl HorizontalTangent {
    /// Checked constructor: `‖baseᵀ·delta‖_F ≤ 1e-10`.
    pub fn new(base: &StiefelPoint, delta: Mat) -> Result<Self> {
        if delta.shape() != base.matrix().shape() {
            return Err(Error::dims(
                format!("{}x{}", base.n(), base.p()),
                format!("{}x{}", delta.nrows(), delta.ncols()),
            ));
        }
        let off = (base.matrix().transpose() * &delta).norm();
        if !(off <= HORIZONTAL_TOL) {
            return Err(Error::InvalidInput(format!(
                "tangent is not horizontal: ‖uᵀΔ‖_F = {off:e}"
            )));
        }
        Ok(Self::unchecked(base, delta))
    }

    pub(crate) fn unchecked(base: &StiefelPoint, delta: Mat) -> Self {
        Self {
            delta,
            base: base.clone(),
        }
    }

    /// `(I − uuᵀ)·m`, the horizontal part of an arbitrary `n × p` matrix.
    pub fn project(base: &StiefelPoint, m: &Mat) -> Self {
        let u = base.matrix();
        Self::unchecked(base, m - u * (u.transpose() * m))
    }

    pub fn zero(base: &StiefelPoint) -> Self {
        Self::unchecked(base, Mat::zeros(base.n(), base.p()))
    }

    pub fn matrix(&self) -> &Mat {
        &self.delta
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    /// `‖Δ‖_F`, which equals the canonical norm `‖X‖₀` of the projector tangent.
    pub fn norm(&self) -> f64 {
        self.delta.norm()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::unchecked(&self.base, &self.delta * factor)
    }

    /// Linear combination `Σ cᵢ Δᵢ` of tangents at a common base.
    pub fn combine(base: &StiefelPoint, terms: &[(f64, &HorizontalTangent)]) -> Result<Self> {
        let mut acc = Mat::zeros(base.n(), base.p());
        for (c, t) in terms {
            if !t.base.same_base(base) {
                return Err(Error::BaseMismatch);
            }
            acc += &t.delta * *c;
        }
        Ok(Self::unchecked(base, acc))
    }
}

/// Principal angles between two subspaces, ascending, each in `[0, π/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles {
    pub theta: Vec<f64>,
}

impl PrincipalAngles {
    /// `‖Θ‖₂`, the Riemannian distance.
    pub fn norm(&self) -> f64 {
        self.theta.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    pub fn max(&self) -> f64 {
        self.theta.iter().copied().fold(0.0, f64::max)
    }
}

/// Orthonormalizes `m` by thin QR unless it is already feasible, in which case
/// it is returned untouched.
pub fn make_stiefel(m: Mat) -> Result<StiefelPoint> {
    check_shape(&m)?;
    let (n, p) = m.shape();
    if 2 * p > n {
        log::warn!(
            "p = {p} exceeds n/2 = {}; charts are used outside their sweet spot",
            n / 2
        );
    }
    if orthonormality_defect(&m) <= FEASIBILITY_TOL {
        return Ok(StiefelPoint::from_orthonormal(m));
    }
    let (q, r) = thin_qr(&m);
    let diag = r.diagonal();
    let big = diag.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let small = diag.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    let ratio = if big > 0.0 { small / big } else { 0.0 };
    if !(ratio >= RANK_TOL) {
        return Err(Error::RankDeficient { ratio });
    }
    Ok(StiefelPoint::from_orthonormal(q))
}

/// Canonical inner product of two tangents at the same base, `tr(xᵀy)`.
///
/// See the module docs: on horizontal lifts the Frobenius product already is
/// the canonical `½ tr(XᵀY)` of the projector tangents.
pub fn canonical_inner(x: &HorizontalTangent, y: &HorizontalTangent) -> Result<f64> {
    if !x.base.same_base(&y.base) {
        return Err(Error::BaseMismatch);
    }
    Ok(x.delta.dot(&y.delta))
}

/// Horizontal lift of the projector velocity `U̇Uᵀ + UU̇ᵀ` of a Stiefel curve
/// with `U(0) = u`, `U̇(0) = udot`.
///
/// For a Stiefel velocity `uᵀ·udot` is skew, and the lift `(U̇Uᵀ + UU̇ᵀ)u`
/// reduces to `udot − u(uᵀ·udot)`; that projected form is what is computed, so
/// the output is horizontal even when `udot` is not an exact Stiefel velocity.
pub fn horizontal_lift(u: &StiefelPoint, udot: &Mat) -> Result<HorizontalTangent> {
    if udot.shape() != u.matrix().shape() {
        return Err(Error::dims(
            format!("{}x{}", u.n(), u.p()),
            format!("{}x{}", udot.nrows(), udot.ncols()),
        ));
    }
    let a = u.matrix().transpose() * udot;
    let sym = (&a + a.transpose()).norm();
    if sym > 1e-8 * udot.norm().max(1.0) {
        log::warn!("uᵀ·udot is not skew (‖sym‖ = {sym:e}); udot is not a Stiefel velocity");
    }
    Ok(HorizontalTangent::unchecked(u, udot - u.matrix() * a))
}

/// The geodesic `t ↦ γ(t)` through `[u]` with initial velocity `Δ`.
///
/// The compact SVD `SΣRᵀ = Δ` is computed once, so every `at(t)` returns the
/// same continuous family of representatives
/// `γ(t) = uR cos(tΣ)Rᵀ + S sin(tΣ)Rᵀ`.
#[derive(Debug, Clone)]
pub struct Geodesic {
    base: StiefelPoint,
    ur: Mat,
    s: Mat,
    sigma: DVector<f64>,
    rt: Mat,
}

impl Geodesic {
    pub fn new(delta: &HorizontalTangent) -> Self {
        let svd = thin_svd(&delta.delta);
        Self {
            base: delta.base.clone(),
            ur: delta.base.matrix() * &svd.v,
            s: svd.u,
            sigma: svd.s,
            rt: svd.v.transpose(),
        }
    }

    pub fn at(&self, t: f64) -> StiefelPoint {
        if t == 0.0 {
            return self.base.clone();
        }
        let mut ucos = self.ur.clone();
        let mut ssin = self.s.clone();
        for (k, sig) in self.sigma.iter().enumerate() {
            ucos.column_mut(k).scale_mut((t * sig).cos());
            ssin.column_mut(k).scale_mut((t * sig).sin());
        }
        StiefelPoint::from_orthonormal((ucos + ssin) * &self.rt)
    }

    /// `γ(t)` together with its horizontal velocity
    /// `γ̇(t) = (−uR sin(tΣ) + S cos(tΣ))ΣRᵀ`.
    pub fn sample(&self, t: f64) -> (StiefelPoint, HorizontalTangent) {
        let point = self.at(t);
        let mut usin = self.ur.clone();
        let mut scos = self.s.clone();
        for (k, sig) in self.sigma.iter().enumerate() {
            usin.column_mut(k).scale_mut(-(t * sig).sin() * sig);
            scos.column_mut(k).scale_mut((t * sig).cos() * sig);
        }
        let vel = HorizontalTangent::project(&point, &((usin + scos) * &self.rt));
        (point, vel)
    }
}

/// Riemannian exponential, evaluated at time `t`: `γ(t)` for the geodesic with
/// `γ(0) = u`, `γ̇(0) = Δ`. No `n × n` matrix and no matrix exponential.
pub fn grassmann_exp(u: &StiefelPoint, delta: &HorizontalTangent, t: f64) -> StiefelPoint {
    debug_assert!(delta.base.same_base(u));
    Geodesic::new(delta).at(t)
}

/// Riemannian logarithm `Log_u(v)`, the inverse of [`grassmann_exp`] on the
/// injectivity domain (all principal angles below π/2).
///
/// With `M = uᵀv`: `L = (I − uuᵀ)v·M⁻¹`, thin SVD `L = QΣ̂Rᵀ`,
/// `Δ = Q·arctan(Σ̂)·Rᵀ`.
pub fn grassmann_log(u: &StiefelPoint, v: &StiefelPoint) -> Result<HorizontalTangent> {
    if u.matrix().shape() != v.matrix().shape() {
        return Err(Error::dims(
            format!("{}x{}", u.n(), u.p()),
            format!("{}x{}", v.n(), v.p()),
        ));
    }
    let um = u.matrix();
    let m = um.transpose() * v.matrix();
    let (cond, _) = linalg::block_condition(&m);
    if !(cond <= CUT_LOCUS_COND) {
        return Err(Error::CutLocus { cond });
    }
    let w = v.matrix() - um * &m;
    let l = linalg::solve_right(&m, &w).map_err(|_| Error::CutLocus { cond })?;
    let svd = thin_svd(&l);
    let mut q = svd.u;
    for (k, sig) in svd.s.iter().enumerate() {
        q.column_mut(k).scale_mut(sig.atan());
    }
    let delta = q * svd.v.transpose();
    Ok(HorizontalTangent::project(u, &delta))
}

/// Principal angles from the singular values of `uᵀv`; angles under `1e-4`
/// are recomputed as `arcsin` of the singular values of `(I − uuᵀ)v`.
pub fn principal_angles(u: &StiefelPoint, v: &StiefelPoint) -> PrincipalAngles {
    assert_eq!(
        u.matrix().shape(),
        v.matrix().shape(),
        "principal angles need equal shapes"
    );
    if u.same_base(v) {
        return PrincipalAngles {
            theta: vec![0.0; u.p()],
        };
    }
    let m = u.matrix().transpose() * v.matrix();
    let cosines = linalg::singular_values(&m);
    let mut theta: Vec<f64> = cosines.iter().map(|c| c.clamp(0.0, 1.0).acos()).collect();
    // cosines descend, so theta ascends
    if theta.iter().any(|&t| t < SMALL_ANGLE) {
        let w = v.matrix() - u.matrix() * &m;
        let mut sines: Vec<f64> = linalg::singular_values(&w).iter().copied().collect();
        sines.sort_by(f64::total_cmp);
        for (t, s) in theta.iter_mut().zip(&sines) {
            if *t < SMALL_ANGLE {
                *t = s.clamp(0.0, 1.0).asin();
            }
        }
        theta.sort_by(f64::total_cmp);
    }
    PrincipalAngles { theta }
}

/// Riemannian distance `‖Θ‖₂ ≤ √p·π/2`.
pub fn subspace_distance(u: &StiefelPoint, v: &StiefelPoint) -> f64 {
    principal_angles(u, v).norm()
}

/// `‖UUᵀ − VVᵀ‖_F` in low-rank form, `√2 ‖(I − UUᵀ)V‖_F`.
///
/// Mathematically equal to `√(2p − 2‖UᵀV‖_F²)` but free of the cancellation
/// that form suffers when the subspaces nearly coincide.
pub fn projector_gap(u: &StiefelPoint, v: &StiefelPoint) -> f64 {
    let w = v.matrix() - u.matrix() * (u.matrix().transpose() * v.matrix());
    std::f64::consts::SQRT_2 * w.norm()
}

/// Euclidean curvature `2‖ΔᵀΔ‖_F` of the projector geodesic with unit-speed
/// velocity `Δ`; at most 2.
pub fn geodesic_accel_norm(delta: &HorizontalTangent) -> f64 {
    let d = &delta.delta;
    2.0 * (d.transpose() * d).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::rng::{gaussian_matrix, random_stiefel, random_tangent, stream};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn make_stiefel_keeps_feasible_input() {
        let u = make_stiefel(Mat::identity(6, 2)).unwrap();
        assert_eq!(*u.matrix(), Mat::identity(6, 2));
    }

    #[test]
    fn make_stiefel_removes_column_scaling() {
        let u = make_stiefel(Mat::identity(6, 2) * 2.0).unwrap();
        assert!((u.matrix() - Mat::identity(6, 2)).norm() < 1e-15);
    }

    #[test]
    fn make_stiefel_orthonormalizes_gaussian() {
        let mut rng = stream(1, "make_stiefel");
        let u = make_stiefel(gaussian_matrix(&mut rng, 50, 5)).unwrap();
        assert!(u.feasibility() <= 1e-12);
    }

    #[test]
    fn make_stiefel_rejects_rank_deficient() {
        let mut m = Mat::zeros(5, 2);
        m[(0, 0)] = 1.0;
        m[(0, 1)] = 2.0;
        assert!(matches!(make_stiefel(m), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn canonical_inner_examples() {
        let mut rng = stream(2, "inner");
        let u = random_stiefel(&mut rng, 12, 3);
        let d = random_tangent(&mut rng, &u, 1.0);
        assert!((canonical_inner(&d, &d).unwrap() - 1.0).abs() < 1e-14);
        let z = HorizontalTangent::zero(&u);
        assert_eq!(canonical_inner(&d, &z).unwrap(), 0.0);
        let other = random_stiefel(&mut rng, 12, 3);
        let e = random_tangent(&mut rng, &other, 1.0);
        assert!(matches!(canonical_inner(&d, &e), Err(Error::BaseMismatch)));
    }

    #[test]
    fn canonical_inner_matches_dense_projector_metric() {
        let mut rng = stream(3, "inner-dense");
        for _ in 0..10 {
            let u = random_stiefel(&mut rng, 15, 4);
            let d = random_tangent(&mut rng, &u, 0.8);
            // X = ΔUᵀ + UΔᵀ, ‖X‖₀² = ½ tr(XᵀX)
            let x = dense::lifted_tangent(&u, d.matrix());
            let canon = 0.5 * x.dot(&x);
            assert!((canon - canonical_inner(&d, &d).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn horizontal_lift_examples() {
        let mut rng = stream(4, "lift");
        let u = random_stiefel(&mut rng, 10, 3);
        let h = random_tangent(&mut rng, &u, 1.0);
        let lifted = horizontal_lift(&u, h.matrix()).unwrap();
        assert!((lifted.matrix() - h.matrix()).norm() < 1e-14);

        let a = gaussian_matrix(&mut rng, 3, 3);
        let skew = &a - a.transpose();
        let vertical = u.matrix() * skew;
        let lifted = horizontal_lift(&u, &vertical).unwrap();
        assert!(lifted.norm() < 1e-14);
    }

    #[test]
    fn horizontal_lift_matches_projector_derivative() {
        let mut rng = stream(5, "lift-fd");
        let n = 30;
        let p = 4;
        let y0 = gaussian_matrix(&mut rng, n, p);
        let y1 = gaussian_matrix(&mut rng, n, p);
        let curve = |t: f64| make_stiefel(&y0 + &y1 * t).unwrap();
        let u = curve(0.0);
        let h = 1e-6;
        let fd_u = (curve(h).matrix() - curve(-h).matrix()) / (2.0 * h);
        let lift = horizontal_lift(&u, &fd_u).unwrap();
        assert!((u.matrix().transpose() * lift.matrix()).norm() <= 1e-12);
        let h2 = 1e-4;
        let fd_p = (dense::projector(&curve(h2)) - dense::projector(&curve(-h2))) / (2.0 * h2);
        let lifted_p = dense::lifted_tangent(&u, lift.matrix());
        assert!((&lifted_p - &fd_p).norm() / fd_p.norm() <= 1e-6);
    }

    #[test]
    fn exp_at_zero_and_zero_velocity() {
        let mut rng = stream(6, "exp0");
        let u = random_stiefel(&mut rng, 20, 3);
        let d = random_tangent(&mut rng, &u, 0.9);
        let g0 = grassmann_exp(&u, &d, 0.0);
        assert!((g0.matrix() - u.matrix()).norm() <= 1e-12);
        assert_eq!(subspace_distance(&u, &g0), 0.0);
        let z = HorizontalTangent::zero(&u);
        let g = grassmann_exp(&u, &z, 3.0);
        assert!(subspace_distance(&u, &g) <= 1e-12);
    }

    #[test]
    fn exp_is_radially_isometric() {
        let mut rng = stream(7, "exp-iso");
        let u = random_stiefel(&mut rng, 20, 3);
        let d = random_tangent(&mut rng, &u, 1.0);
        let g = grassmann_exp(&u, &d, 0.7);
        assert!((subspace_distance(&u, &g) - 0.7).abs() <= 1e-10);
        assert!(g.feasibility() <= FEASIBILITY_TOL);
    }

    #[test]
    fn log_examples() {
        let mut rng = stream(8, "log");
        let u = random_stiefel(&mut rng, 25, 4);
        assert!(grassmann_log(&u, &u).unwrap().norm() < 1e-14);
        let d0 = random_tangent(&mut rng, &u, 1.3);
        let v = grassmann_exp(&u, &d0, 1.0);
        let d = grassmann_log(&u, &v).unwrap();
        assert!((d.matrix() - d0.matrix()).norm() <= 1e-8);
    }

    #[test]
    fn log_norm_equals_distance() {
        let mut rng = stream(9, "log-dist");
        for _ in 0..100 {
            let u = random_stiefel(&mut rng, 12, 3);
            let v = random_stiefel(&mut rng, 12, 3);
            let d = grassmann_log(&u, &v).unwrap();
            assert!((d.norm() - subspace_distance(&u, &v)).abs() <= 1e-10);
        }
    }

    #[test]
    fn log_at_cut_locus_fails() {
        let u = StiefelPoint::identity(4, 1);
        let mut m = Mat::zeros(4, 1);
        m[(2, 0)] = 1.0;
        let v = StiefelPoint::new(m).unwrap();
        assert!(matches!(grassmann_log(&u, &v), Err(Error::CutLocus { .. })));
    }

    #[test]
    fn principal_angle_examples() {
        let u = StiefelPoint::new(Mat::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        let s = 0.5f64.sqrt();
        let v = StiefelPoint::new(Mat::from_column_slice(2, 1, &[s, s])).unwrap();
        let th = principal_angles(&u, &v);
        assert!((th.theta[0] - FRAC_PI_4).abs() < 1e-15);
        assert!((subspace_distance(&u, &v) - FRAC_PI_4).abs() < 1e-15);
        assert!(principal_angles(&u, &u).theta.iter().all(|&t| t == 0.0));

        let a = StiefelPoint::identity(6, 2);
        let mut m = Mat::zeros(6, 2);
        m[(3, 0)] = 1.0;
        m[(5, 1)] = 1.0;
        let b = StiefelPoint::new(m).unwrap();
        let th = principal_angles(&a, &b);
        assert!(th.theta.iter().all(|&t| (t - FRAC_PI_2).abs() < 1e-15));
    }

    #[test]
    fn small_angles_keep_relative_accuracy() {
        let mut rng = stream(10, "small");
        let u = random_stiefel(&mut rng, 20, 2);
        let d = random_tangent(&mut rng, &u, 1.0);
        let v = grassmann_exp(&u, &d, 1e-9);
        let dist = subspace_distance(&u, &v);
        assert!((dist - 1e-9).abs() <= 1e-15, "{dist:e}");
    }

    #[test]
    fn distance_bounded_by_sqrt_p_half_pi() {
        let mut rng = stream(11, "bound");
        for _ in 0..50 {
            let u = random_stiefel(&mut rng, 8, 3);
            let v = random_stiefel(&mut rng, 8, 3);
            assert!(subspace_distance(&u, &v) <= 3f64.sqrt() * FRAC_PI_2 + 1e-12);
        }
    }

    #[test]
    fn accel_norm_examples() {
        let mut rng = stream(12, "accel");
        let u = random_stiefel(&mut rng, 10, 1);
        let d = random_tangent(&mut rng, &u, 1.0);
        assert!((geodesic_accel_norm(&d) - 2.0).abs() < 1e-14);

        // ΔᵀΔ = I/p: orthonormal columns scaled by 1/√p
        let p = 4;
        let mut m = Mat::zeros(12, p);
        for j in 0..p {
            m[(p + j, j)] = 1.0 / (p as f64).sqrt();
        }
        let d = HorizontalTangent::new(&StiefelPoint::identity(12, p), m).unwrap();
        assert!((geodesic_accel_norm(&d) - 2.0 / (p as f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn accel_norm_matches_second_difference() {
        let mut rng = stream(13, "accel-fd");
        for _ in 0..5 {
            let u = random_stiefel(&mut rng, 14, 3);
            let d = random_tangent(&mut rng, &u, 1.0);
            let geo = Geodesic::new(&d);
            let h = 1e-3;
            let p = |t: f64| dense::projector(&geo.at(t));
            let second = (p(h) - p(0.0) * 2.0 + p(-h)) / (h * h);
            let kappa = (0.5 * second.dot(&second)).sqrt();
            let k = geodesic_accel_norm(&d);
            assert!(k <= 2.0 + 1e-12);
            assert!((kappa - k).abs() <= 1e-4, "{kappa} vs {k}");
        }
    }

    #[test]
    fn projector_gap_matches_dense() {
        let mut rng = stream(14, "gap");
        for _ in 0..10 {
            let u = random_stiefel(&mut rng, 20, 3);
            let v = random_stiefel(&mut rng, 20, 3);
            let dense_gap = (dense::projector(&u) - dense::projector(&v)).norm();
            assert!((projector_gap(&u, &v) - dense_gap).abs() <= 1e-12);
            let ut_v = (u.matrix().transpose() * v.matrix()).norm_squared();
            let identity_form = (2.0 * 3.0 - 2.0 * ut_v).max(0.0).sqrt();
            assert!((identity_form - dense_gap).abs() <= 1e-10);
        }
    }
}
