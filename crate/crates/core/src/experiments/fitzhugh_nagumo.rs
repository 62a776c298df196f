//! FitzHugh–Nagumo system with diffusion on `[0, L]`:
//!
//! ```text
//! u_t = ε u_xx + f(u)/ε − v/ε + I_a,     f(u) = u(u + 1)(1 − u)
//! v_t = b u − γ v
//! u(0, x) = v(0, x) = 0,   u_x(t, 0) = β(t) = −50000 t³ e^{−15t},   u_x(t, L) = 0
//! ```
//!
//! Space: second-order central differences on `n_x` nodes, Neumann data folded
//! in through ghost nodes. Time: semi-implicit Euler; diffusion and boundary
//! flux implicit (one tridiagonal solve per step), reaction explicit, and the
//! linear `v` equation implicit in `v` given the new `u`.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// States larger than this count as blow-up.
const BLOWUP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct FnModelSpec {
    /// Spatial nodes, including both boundary nodes.
    pub n_x: usize,
    pub length: f64,
    pub t_end: f64,
    /// Snapshots at `t = 0, T/(k−1), …, T`.
    pub n_snapshots: usize,
    /// Internal time steps between consecutive snapshots.
    pub substeps: usize,
    pub eps: f64,
    pub b: f64,
    pub gamma: f64,
    /// Sampled applied voltages.
    pub i_a: Vec<f64>,
    /// POD rank.
    pub p: usize,
    /// Step used to difference POD bases in `I_a`.
    pub param_step: f64,
    /// When false, `β ≡ 0`.
    pub boundary_forcing: bool,
    /// Use this voltage no matter which one is requested.
    pub frozen_i_a: Option<f64>,
}

impl Default for FnModelSpec {
    fn default() -> Self {
        Self {
            n_x: 256,
            length: 1.0,
            t_end: 8.0,
            n_snapshots: 1001,
            substeps: 40,
            eps: 0.015,
            b: 0.3,
            gamma: 0.5,
            i_a: vec![0.03, 0.04, 0.05, 0.06, 0.07, 0.08],
            p: 8,
            param_step: 1e-3,
            boundary_forcing: true,
            frozen_i_a: None,
        }
    }
}

impl FnModelSpec {
    /// Full-scale discretization with 1024 spatial nodes.
    pub fn full_scale() -> Self {
        Self {
            n_x: 1024,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n_x < 3 {
            return bad(format!("n_x must be ≥ 3, got {}", self.n_x));
        }
        if self.n_snapshots < 2 || self.substeps == 0 {
            return bad("need ≥ 2 snapshots and ≥ 1 substep".into());
        }
        if !(self.length > 0.0 && self.t_end > 0.0 && self.eps > 0.0) {
            return bad("length, t_end and eps must be positive".into());
        }
        if self.p == 0 || self.p > self.n_x || self.p > self.n_snapshots {
            return bad(format!(
                "POD rank p = {} must be in 1..=min(n_x, n_snapshots)",
                self.p
            ));
        }
        if !(self.param_step > 0.0) {
            return bad("param_step must be positive".into());
        }
        Ok(())
    }

    fn beta(&self, t: f64) -> f64 {
        if self.boundary_forcing {
            -50000.0 * t.powi(3) * (-15.0 * t).exp()
        } else {
            0.0
        }
    }
}

/// Snapshot matrices, one column per snapshot time.
#[derive(Debug, Clone)]
pub struct FnSnapshots {
    pub u: Mat,
    pub v: Mat,
    pub times: Vec<f64>,
}

fn reaction(u: f64) -> f64 {
    u * (u + 1.0) * (1.0 - u)
}

/// Solves `(I − τ·ε·D) x = rhs` where `D` is the ghost-node Neumann Laplacian;
/// `diag`, `lower`, `upper` hold the constant matrix, `c`/`d` are scratch.
struct Tridiagonal {
    diag: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl Tridiagonal {
    fn new(n: usize, r: f64) -> Self {
        // r = τ ε / h²
        let diag = vec![1.0 + 2.0 * r; n];
        let mut lower = vec![-r; n];
        let mut upper = vec![-r; n];
        upper[0] = -2.0 * r;
        lower[n - 1] = -2.0 * r;
        lower[0] = 0.0;
        upper[n - 1] = 0.0;
        Self {
            diag,
            lower,
            upper,
            c: vec![0.0; n],
            d: vec![0.0; n],
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn solve(&mut self, rhs: &mut [f64]) {
        let n = rhs.len();
        self.c[0] = self.upper[0] / self.diag[0];
        self.d[0] = rhs[0] / self.diag[0];
        for i in 1..n {
            let m = self.diag[i] - self.lower[i] * self.c[i - 1];
            self.c[i] = self.upper[i] / m;
            self.d[i] = (rhs[i] - self.lower[i] * self.d[i - 1]) / m;
        }
        rhs[n - 1] = self.d[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = self.d[i] - self.c[i] * rhs[i + 1];
        }
    }
}

/// Integrates from zero initial data to `t_end` and returns the snapshots.
pub fn fn_solve(spec: &FnModelSpec, i_a: f64) -> Result<FnSnapshots> {
    spec.validate()?;
    let i_a = spec.frozen_i_a.unwrap_or(i_a);
    let n = spec.n_x;
    let h = spec.length / (n - 1) as f64;
    let snap_dt = spec.t_end / (spec.n_snapshots - 1) as f64;
    let tau = snap_dt / spec.substeps as f64;
    let r = tau * spec.eps / (h * h);
    let mut solver = Tridiagonal::new(n, r);

    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut su = Mat::zeros(n, spec.n_snapshots);
    let mut sv = Mat::zeros(n, spec.n_snapshots);
    let mut times = Vec::with_capacity(spec.n_snapshots);
    times.push(0.0);

    for k in 1..spec.n_snapshots {
        let t0 = (k - 1) as f64 * snap_dt;
        for s in 0..spec.substeps {
            let t_new = t0 + (s + 1) as f64 * tau;
            for i in 0..n {
                rhs[i] = u[i] + tau * (reaction(u[i]) / spec.eps - v[i] / spec.eps + i_a);
            }
            // ghost node at x = −h carries u₋₁ = u₁ − 2hβ
            rhs[0] -= tau * spec.eps * 2.0 * spec.beta(t_new) / h;
            solver.solve(&mut rhs);
            std::mem::swap(&mut u, &mut rhs);
            for i in 0..n {
                v[i] = (v[i] + tau * spec.b * u[i]) / (1.0 + tau * spec.gamma);
            }
            if u.iter().chain(&v).any(|x| !(x.abs() <= BLOWUP)) {
                return Err(Error::Unstable { time: t_new });
            }
        }
        su.set_column(k, &nalgebra::DVector::from_column_slice(&u));
        sv.set_column(k, &nalgebra::DVector::from_column_slice(&v));
        times.push(k as f64 * snap_dt);
    }
    Ok(FnSnapshots {
        u: su,
        v: sv,
        times,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FnModelSpec {
        FnModelSpec {
            n_x: 128,
            ..FnModelSpec::default()
        }
    }

    #[test]
    fn zero_forcing_stays_zero() {
        let spec = FnModelSpec {
            boundary_forcing: false,
            n_snapshots: 101,
            ..small()
        };
        let s = fn_solve(&spec, 0.0).unwrap();
        assert_eq!(s.u.abs().max(), 0.0);
        assert_eq!(s.v.abs().max(), 0.0);
    }

    #[test]
    fn trajectory_is_nonzero_and_bounded() {
        let s = fn_solve(&FnModelSpec::default(), 0.05).unwrap();
        let m = s.u.abs().max();
        assert!(m > 0.1 && m <= 2.0, "max |u| = {m}");
        assert_eq!(s.times.len(), 1001);
        assert_eq!(*s.times.last().unwrap(), 8.0);
    }

    #[test]
    fn halving_the_step_changes_little() {
        let spec = FnModelSpec::default();
        let fine = FnModelSpec {
            substeps: 2 * spec.substeps,
            ..spec.clone()
        };
        let a = fn_solve(&spec, 0.05).unwrap();
        let b = fn_solve(&fine, 0.05).unwrap();
        let rel = (&a.u - &b.u).norm() / b.u.norm();
        assert!(rel <= 1e-3, "self-convergence {rel:e}");
    }

    #[test]
    fn thomas_solver_inverts_operator() {
        let n = 7;
        let r = 0.3;
        let mut tri = Tridiagonal::new(n, r);
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        // apply (I − rD) with the reflected end rows
        let mut b = vec![0.0; n];
        for i in 0..n {
            let left = if i == 0 { x[1] } else { x[i - 1] };
            let right = if i == n - 1 { x[n - 2] } else { x[i + 1] };
            b[i] = (1.0 + 2.0 * r) * x[i] - r * (left + right);
        }
        tri.solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-14);
        }
    }
}
