//! Small dense kernels on top of nalgebra: sign-normalized thin QR and SVD,
//! right solves against square blocks, and a few norms.
//!
//! Every SVD returned from here follows one sign convention: the
//! largest-magnitude entry of each left singular vector is positive, with the
//! matching right singular vector flipped alongside. Singular values are sorted
//! in descending order.

use nalgebra::{DMatrix, DVector, LU, QR};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;

/// Thin SVD `m = u · diag(s) · vᵀ` with `k = min(rows, cols)` triplets.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: Mat,
    pub s: DVector<f64>,
    pub v: Mat,
}

/// Thin QR with a nonnegative diagonal in `r`, which makes the Q factor unique
/// for full-rank input.
pub fn thin_qr(m: &Mat) -> (Mat, Mat) {
    assert!(m.nrows() >= m.ncols(), "thin_qr expects a tall matrix");
    let qr = QR::new(m.clone());
    let mut q = qr.q();
    let mut r = qr.r();
    for j in 0..r.nrows() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
            r.row_mut(j).neg_mut();
        }
    }
    (q, r)
}

// nalgebra's bidiagonal SVD can lose several digits in the singular vectors
// of well-conditioned blocks, so the square kernel goes through faer.
fn square_svd(m: &Mat) -> ThinSvd {
    let k = m.nrows();
    let svd = to_faer(m)
        .svd()
        .expect("SVD iteration converges on finite input");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    ThinSvd {
        u: Mat::from_fn(k, k, |i, j| u[(i, j)]),
        s: DVector::from_fn(k, |i, _| s[i]),
        v: Mat::from_fn(k, k, |i, j| v[(i, j)]),
    }
}

fn to_faer(m: &Mat) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn tall_svd(m: &Mat) -> ThinSvd {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return ThinSvd {
            u: Mat::zeros(rows, 0),
            s: DVector::zeros(0),
            v: Mat::zeros(0, 0),
        };
    }
    if rows > cols {
        // Reduce to a cols×cols problem first; much cheaper for n ≫ p.
        let (q, r) = thin_qr(m);
        let inner = square_svd(&r);
        ThinSvd {
            u: q * inner.u,
            s: inner.s,
            v: inner.v,
        }
    } else {
        square_svd(m)
    }
}

/// Thin SVD with descending singular values and the sign convention above.
pub fn thin_svd(m: &Mat) -> ThinSvd {
    let raw = if m.nrows() >= m.ncols() {
        tall_svd(m)
    } else {
        let t = tall_svd(&m.transpose());
        ThinSvd {
            u: t.v,
            s: t.s,
            v: t.u,
        }
    };
    normalize_svd(raw)
}

fn normalize_svd(raw: ThinSvd) -> ThinSvd {
    let k = raw.s.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| raw.s[b].total_cmp(&raw.s[a]));
    let mut u = Mat::zeros(raw.u.nrows(), k);
    let mut v = Mat::zeros(raw.v.nrows(), k);
    let mut s = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        let mut ucol = raw.u.column(src).clone_owned();
        let mut vcol = raw.v.column(src).clone_owned();
        let pivot = ucol.iter().copied().fold(
            0.0_f64,
            |best, x| {
                if x.abs() > best.abs() {
                    x
                } else {
                    best
                }
            },
        );
        if pivot < 0.0 {
            ucol.neg_mut();
            vcol.neg_mut();
        }
        u.set_column(dst, &ucol);
        v.set_column(dst, &vcol);
        s[dst] = raw.s[src];
    }
    ThinSvd { u, s, v }
}

/// Singular values only, descending.
pub fn singular_values(m: &Mat) -> DVector<f64> {
    let work = if m.nrows() >= m.ncols() {
        m.clone()
    } else {
        m.transpose()
    };
    let work = if work.nrows() > work.ncols() && work.ncols() > 0 {
        thin_qr(&work).1
    } else {
        work
    };
    let values = to_faer(&work)
        .singular_values()
        .expect("SVD iteration converges on finite input");
    let mut s = DVector::from_vec(values);
    s.as_mut_slice().sort_by(|a, b| b.total_cmp(a));
    s
}

/// `‖uᵀu − I‖_F`.
pub fn orthonormality_defect(u: &Mat) -> f64 {
    let p = u.ncols();
    (u.transpose() * u - Mat::identity(p, p)).norm()
}

/// 2-norm condition number and `‖A⁻¹‖_F` of a square block, from its singular
/// values. Both are `+∞` when the block is exactly singular.
pub fn block_condition(a: &Mat) -> (f64, f64) {
    let s = singular_values(a);
    if s.is_empty() {
        return (1.0, 0.0);
    }
    let smax = s[0];
    let smin = s[s.len() - 1];
    if smin == 0.0 || !smin.is_finite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let inv_fro = s.iter().map(|x| 1.0 / (x * x)).sum::<f64>().sqrt();
    (smax / smin, inv_fro)
}

/// Solves `X · a = rhs` for `X` via an LU factorization of `aᵀ`.
pub fn solve_right(a: &Mat, rhs: &Mat) -> Result<Mat> {
    if a.nrows() != a.ncols() || rhs.ncols() != a.nrows() {
        return Err(Error::dims(
            format!("square block matching {} columns", rhs.ncols()),
            format!("{}x{}", a.nrows(), a.ncols()),
        ));
    }
    LU::new(a.transpose())
        .solve(&rhs.transpose())
        .map(|x| x.transpose())
        .ok_or(Error::RankDeficient { ratio: 0.0 })
}

/// Solves `a · X = rhs` for square `a`.
pub fn solve_left(a: &Mat, rhs: &Mat) -> Result<Mat> {
    LU::new(a.clone())
        .solve(rhs)
        .ok_or(Error::RankDeficient { ratio: 0.0 })
}

pub fn skew_part(a: &Mat) -> Mat {
    (a - a.transpose()) * 0.5
}
