//! Matrix-decomposition-free local coordinates on Gr(n, p).
//!
//! Split a representative into a `p × p` pivot block and the remaining rows,
//! `U = [U₁; U₂]`. The chart is `Ψ(UUᵀ) = U₂U₁⁻¹ ∈ ℝ^{(n−p)×p}` and its inverse
//! parameterization is `φ(B) = [I; B](I + BᵀB)⁻¹[I, Bᵀ]`. A [`ChartFrame`]
//! fixes which rows form the pivot block by permuting rows first, so the pair
//! actually in force is `(Ψ∘Υ_𝒫, Υ_𝒫⁻¹∘φ)`.
//!
//! Nothing here forms a matrix larger than `n × p`.

use nalgebra::{Cholesky, DVector};

use crate::error::{Error, Result};
use crate::grassmann::{HorizontalTangent, StiefelPoint};
use crate::linalg::{self, Mat};

/// `cond(U₁)` above which a chart refuses to evaluate.
pub const BLOCK_COND_LIMIT: f64 = 1e12;

/// Global bound `√(5/2) + 1` on the condition number of `φ`.
pub fn phi_condition_ceiling() -> f64 {
    2.5f64.sqrt() + 1.0
}

/// Row permutation plus block size. Row `i` of the permuted matrix is row
/// `perm[i]` of the original; the first `p` entries of `perm` are the pivot rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartFrame {
    perm: Vec<usize>,
    p: usize,
}

impl ChartFrame {
    pub fn identity(n: usize, p: usize) -> Self {
        assert!(p <= n, "block size exceeds dimension");
        Self {
            perm: (0..n).collect(),
            p,
        }
    }

    pub fn new(perm: Vec<usize>, p: usize) -> Result<Self> {
        let n = perm.len();
        if p == 0 || p > n {
            return Err(Error::InvalidInput(format!(
                "block size {p} not in 1..={n}"
            )));
        }
        let mut seen = vec![false; n];
        for &i in &perm {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!(
                    "not a permutation of 0..{n}: entry {i}"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { perm, p })
    }

    /// Frame that puts `pivots` first (in the given order) and the remaining
    /// rows after them in increasing order.
    pub fn from_pivots(n: usize, pivots: &[usize]) -> Result<Self> {
        let mut is_pivot = vec![false; n];
        for &i in pivots {
            if i >= n || is_pivot[i] {
                return Err(Error::InvalidInput(format!("bad pivot row {i}")));
            }
            is_pivot[i] = true;
        }
        let mut perm = pivots.to_vec();
        perm.extend((0..n).filter(|&i| !is_pivot[i]));
        Self::new(perm, pivots.len())
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.perm[..self.p]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `𝒫·m`.
    pub fn apply(&self, m: &Mat) -> Mat {
        assert_eq!(m.nrows(), self.n(), "frame/matrix row mismatch");
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(self.perm[i], j)])
    }

    /// `𝒫ᵀ·m`, the inverse of [`apply`](Self::apply).
    pub fn unapply(&self, m: &Mat) -> Mat {
        assert_eq!(m.nrows(), self.n(), "frame/matrix row mismatch");
        let mut out = Mat::zeros(m.nrows(), m.ncols());
        for (i, &src) in self.perm.iter().enumerate() {
            out.set_row(src, &m.row(i));
        }
        out
    }

    /// Pivot block `U₁` of `m` under this frame.
    pub fn pivot_block(&self, m: &Mat) -> Mat {
        Mat::from_fn(self.p, m.ncols(), |i, j| m[(self.perm[i], j)])
    }

    fn split(&self, m: &Mat) -> (Mat, Mat) {
        let n = self.n();
        let top = self.pivot_block(m);
        let bottom = Mat::from_fn(n - self.p, m.ncols(), |i, j| m[(self.perm[self.p + i], j)]);
        (top, bottom)
    }

    fn check(&self, u: &StiefelPoint) -> Result<()> {
        if u.n() != self.n() || u.p() != self.p {
            return Err(Error::dims(
                format!("{}x{}", self.n(), self.p),
                format!("{}x{}", u.n(), u.p()),
            ));
        }
        Ok(())
    }
}

/// Coordinate matrix `B ∈ ℝ^{(n−p)×p}` together with the frame it lives in.
#[derive(Debug, Clone)]
pub struct LocalCoordMatrix {
    b: Mat,
    frame: ChartFrame,
}

impl LocalCoordMatrix {
    pub fn new(b: Mat, frame: ChartFrame) -> Result<Self> {
        let want = (frame.n() - frame.p(), frame.p());
        if b.shape() != want {
            return Err(Error::dims(
                format!("{}x{}", want.0, want.1),
                format!("{}x{}", b.nrows(), b.ncols()),
            ));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate entry".into()));
        }
        Ok(Self { b, frame })
    }

    pub fn zero(frame: ChartFrame) -> Self {
        let b = Mat::zeros(frame.n() - frame.p(), frame.p());
        Self { b, frame }
    }

    pub fn matrix(&self) -> &Mat {
        &self.b
    }

    pub fn frame(&self) -> &ChartFrame {
        &self.frame
    }

    pub fn into_matrix(self) -> Mat {
        self.b
    }

    /// Checks the quasi-maximum-volume bound `‖B‖_F ≤ (1+δ)√(p(n−p))`, logging
    /// a warning when it fails.
    pub fn within_mv_bound(&self, delta: f64) -> bool {
        let (m, p) = self.b.shape();
        let bound = (1.0 + delta) * ((p * m) as f64).sqrt();
        let ok = self.b.norm() <= bound * (1.0 + 1e-12);
        if !ok {
            log::warn!("‖B‖_F = {} exceeds the MV bound {bound}", self.b.norm());
        }
        ok
    }
}

/// How `φ` turns `[I; B]` into an orthonormal representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhiVariant {
    /// `[I; B]·L⁻ᵀ` with `LLᵀ = I + BᵀB`.
    #[default]
    Cholesky,
    /// `[I; B]·T⁻¹` with `T² = I + BᵀB`, `T` the symmetric square root.
    SquareRoot,
}

fn checked_block(top: &Mat) -> Result<()> {
    let (cond, inv_norm) = linalg::block_condition(top);
    if !(cond <= BLOCK_COND_LIMIT) {
        return Err(Error::IllConditionedBlock { cond, inv_norm });
    }
    Ok(())
}

/// `Ψ(UUᵀ) = Ũ₂Ũ₁⁻¹` where `[Ũ₁; Ũ₂] = 𝒫·u`, by a solve against `Ũ₁`.
pub fn chart_psi(u: &StiefelPoint, frame: &ChartFrame) -> Result<LocalCoordMatrix> {
    frame.check(u)?;
    let (top, bottom) = frame.split(u.matrix());
    checked_block(&top)?;
    let b = linalg::solve_right(&top, &bottom)?;
    Ok(LocalCoordMatrix {
        b,
        frame: frame.clone(),
    })
}

/// `φ(B)` as a Stiefel representative, Cholesky variant.
pub fn param_phi(b: &LocalCoordMatrix) -> StiefelPoint {
    param_phi_with(b, PhiVariant::Cholesky)
}

pub fn param_phi_with(b: &LocalCoordMatrix, variant: PhiVariant) -> StiefelPoint {
    let p = b.frame.p();
    let n = b.frame.n();
    let bm = &b.b;
    let gram = Mat::identity(p, p) + bm.transpose() * bm;
    let mut stacked = Mat::zeros(n, p);
    stacked.view_mut((0, 0), (p, p)).fill_with_identity();
    stacked.view_mut((p, 0), (n - p, p)).copy_from(bm);
    let rep = match variant {
        PhiVariant::Cholesky => {
            let l = Cholesky::new(gram)
                .expect("I + BᵀB is symmetric positive definite")
                .unpack();
            // X = [I; B]·L⁻ᵀ  ⇔  L·Xᵀ = [I; B]ᵀ
            l.solve_lower_triangular(&stacked.transpose())
                .expect("Cholesky factor has a positive diagonal")
                .transpose()
        }
        PhiVariant::SquareRoot => {
            let eig = gram.symmetric_eigen();
            let scale = DVector::from_iterator(p, eig.eigenvalues.iter().map(|l| l.sqrt().recip()));
            let t_inv =
                &eig.eigenvectors * Mat::from_diagonal(&scale) * eig.eigenvectors.transpose();
            stacked * t_inv
        }
    };
    StiefelPoint::from_orthonormal(b.frame.unapply(&rep))
}

/// Coordinate velocity `dΨ(T) = T₂U₁⁻¹ − U₂U₁⁻¹T₁U₁⁻¹` for any Stiefel velocity
/// `t` at `u`; the result does not depend on the lift chosen for `t`.
pub fn dpsi(u: &StiefelPoint, t: &Mat, frame: &ChartFrame) -> Result<Mat> {
    frame.check(u)?;
    if t.shape() != u.matrix().shape() {
        return Err(Error::dims(
            format!("{}x{}", u.n(), u.p()),
            format!("{}x{}", t.nrows(), t.ncols()),
        ));
    }
    let (u1, u2) = frame.split(u.matrix());
    let (t1, t2) = frame.split(t);
    checked_block(&u1)?;
    let b = linalg::solve_right(&u1, &u2)?;
    linalg::solve_right(&u1, &(t2 - b * t1))
}

/// [`dpsi`] applied to a horizontal tangent.
pub fn dpsi_tangent(t: &HorizontalTangent, frame: &ChartFrame) -> Result<Mat> {
    dpsi(t.base(), t.matrix(), frame)
}

/// Symmetric `n × n` tangent kept in factored form
/// `X = A·Yᵀ + Y·Aᵀ − Y·C·Yᵀ` with `A, Y ∈ ℝ^{n×p}` and symmetric `C ∈ ℝ^{p×p}`.
#[derive(Debug, Clone)]
pub struct FactoredTangent {
    a: Mat,
    y: Mat,
    c: Mat,
}

impl FactoredTangent {
    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn y(&self) -> &Mat {
        &self.y
    }

    pub fn core(&self) -> &Mat {
        &self.c
    }

    /// `‖X‖_F` via the `2p × 2p` Gram matrix of `W = [A, Y]`:
    /// `X = W·M·Wᵀ`, `M = [[0, I], [I, −C]]`, `‖X‖_F² = tr(MGMG)`.
    pub fn fro_norm(&self) -> f64 {
        let p = self.c.nrows();
        let n = self.a.nrows();
        let mut w = Mat::zeros(n, 2 * p);
        w.view_mut((0, 0), (n, p)).copy_from(&self.a);
        w.view_mut((0, p), (n, p)).copy_from(&self.y);
        let g = w.transpose() * &w;
        let mut m = Mat::zeros(2 * p, 2 * p);
        m.view_mut((0, p), (p, p)).fill_with_identity();
        m.view_mut((p, 0), (p, p)).fill_with_identity();
        m.view_mut((p, p), (p, p)).copy_from(&(-&self.c));
        let mg = m * g;
        mg.dot(&mg.transpose()).max(0.0).sqrt()
    }

    /// Canonical norm `‖X‖₀ = ‖X‖_F / √2`.
    pub fn canonical_norm(&self) -> f64 {
        self.fro_norm() / std::f64::consts::SQRT_2
    }
}

/// `dφ_B(v)` with `S = (I + BᵀB)⁻¹`:
/// `[0; v]S[I, Bᵀ] − [I; B]S(vᵀB + Bᵀv)S[I, Bᵀ] + [I; B]S[0, vᵀ]`,
/// conjugated by the frame permutation.
pub fn dphi(b: &LocalCoordMatrix, v: &Mat) -> Result<FactoredTangent> {
    let p = b.frame.p();
    let n = b.frame.n();
    if v.shape() != b.b.shape() {
        return Err(Error::dims(
            format!("{}x{}", n - p, p),
            format!("{}x{}", v.nrows(), v.ncols()),
        ));
    }
    let bm = &b.b;
    let chol = Cholesky::new(Mat::identity(p, p) + bm.transpose() * bm)
        .expect("I + BᵀB is symmetric positive definite");
    let s = chol.inverse();
    let mut y = Mat::zeros(n, p);
    y.view_mut((0, 0), (p, p)).fill_with_identity();
    y.view_mut((p, 0), (n - p, p)).copy_from(bm);
    let mut a = Mat::zeros(n, p);
    a.view_mut((p, 0), (n - p, p)).copy_from(&(v * &s));
    let vb = v.transpose() * bm;
    let c = &s * (&vb + vb.transpose()) * &s;
    Ok(FactoredTangent {
        a: b.frame.unapply(&a),
        y: b.frame.unapply(&y),
        c,
    })
}

fn padded_singular_values(b: &Mat) -> Vec<f64> {
    let p = b.ncols();
    let mut s: Vec<f64> = linalg::singular_values(b).iter().copied().collect();
    s.resize(p, 0.0);
    s
}

/// Upper bound on the condition number of `φ` at `B`:
/// `√2·√(1/(1+σ_p²)² + maxᵢ σᵢ²/(1+σᵢ²)²) + 1`, never above `√(5/2) + 1`.
pub fn cond_phi_bound(b: &LocalCoordMatrix) -> f64 {
    let s = padded_singular_values(&b.b);
    let smin = s.last().copied().unwrap_or(0.0);
    let first = 1.0 / (1.0 + smin * smin).powi(2);
    let second = s
        .iter()
        .map(|x| x * x / (1.0 + x * x).powi(2))
        .fold(0.0, f64::max);
    std::f64::consts::SQRT_2 * (first + second).sqrt() + 1.0
}

/// Upper bound `√(‖U₁⁻¹‖_F² − p) + √(‖V₁⁻¹‖_F² − p)` on `‖Ψ(u) − Ψ(v)‖_F`.
///
/// Relies on `‖U₂U₁⁻¹‖_F² = ‖U₁⁻¹‖_F² − p`, which holds for every
/// column-orthonormal `U`.
pub fn psi_spread_bound(u: &StiefelPoint, v: &StiefelPoint, frame: &ChartFrame) -> Result<f64> {
    let radius = |x: &StiefelPoint| -> Result<f64> {
        frame.check(x)?;
        let top = frame.pivot_block(x.matrix());
        let (cond, inv_norm) = linalg::block_condition(&top);
        if !(cond <= BLOCK_COND_LIMIT) {
            return Err(Error::IllConditionedBlock { cond, inv_norm });
        }
        // Σ (1/σᵢ² − 1), summed termwise so that σᵢ = 1 contributes exactly 0
        let excess: f64 = linalg::singular_values(&top)
            .iter()
            .map(|s| (1.0 - s) * (1.0 + s) / (s * s))
            .sum();
        Ok(excess.max(0.0).sqrt())
    };
    Ok(radius(u)? + radius(v)?)
}

/// Distance from the frame's base point `φ(0)` to `φ(B)`: `√(Σ arctan(σₖ)²)`.
pub fn coord_distance_to_base(b: &LocalCoordMatrix) -> f64 {
    padded_singular_values(&b.b)
        .iter()
        .map(|s| s.atan().powi(2))
        .sum::<f64>()
        .sqrt()
}
