//! Lagrange and Hermite interpolation of subspace-valued data.
//!
//! Two routes to the manifold:
//!
//! * local coordinates: map every sample through `Ψ` under a chart frame,
//!   interpolate the coordinate matrices in `ℝ^{(n−p)×p}` and map back with `φ`;
//! * normal coordinates: map samples to the tangent space at an anchor with
//!   `Log`, interpolate there and map back with `Exp`.
//!
//! Hermite interpolation is piecewise cubic over consecutive node pairs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grassmann::{grassmann_exp, grassmann_log, HorizontalTangent, StiefelPoint};
use crate::linalg::Mat;
use crate::local_coords::{chart_psi, dpsi_tangent, param_phi, ChartFrame, LocalCoordMatrix};

/// Finite-difference step for transporting velocities, before scaling by `1/‖v‖_F`.
pub const TRANSPORT_STEP: f64 = 1e-4;

/// Lagrange basis weights `ℓᵢ(t) = Πⱼ≠ᵢ (t − tⱼ)/(tᵢ − tⱼ)`.
pub fn lagrange_weights(nodes: &[f64], t: f64) -> Result<Vec<f64>> {
    if nodes.is_empty() {
        return Err(Error::InvalidInput(
            "Lagrange interpolation needs a node".into(),
        ));
    }
    for (i, a) in nodes.iter().enumerate() {
        if nodes[..i].contains(a) {
            return Err(Error::DuplicateNode(*a));
        }
    }
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(i, ti)| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, tj)| (t - tj) / (ti - tj))
                .product()
        })
        .collect())
}

/// Value at `t` of the degree-`d−1` matrix polynomial through `(nodes[i], values[i])`.
pub fn lagrange_eval(nodes: &[f64], values: &[Mat], t: f64) -> Result<Mat> {
    if nodes.len() != values.len() {
        return Err(Error::dims(
            format!("{} values", nodes.len()),
            format!("{}", values.len()),
        ));
    }
    let w = lagrange_weights(nodes, t)?;
    let mut acc = Mat::zeros(values[0].nrows(), values[0].ncols());
    for (wi, v) in w.iter().zip(values) {
        acc += v * *wi;
    }
    Ok(acc)
}

/// Cubic Hermite basis `[L₀₀, L₁₀, L₀₁, L₁₁]` on `[t0, t1]`: `L₀₀`/`L₁₀` carry
/// the values at `t0`/`t1`, `L₀₁`/`L₁₁` the derivatives.
pub fn hermite_basis(t0: f64, t1: f64, t: f64) -> Result<[f64; 4]> {
    if t0 == t1 {
        return Err(Error::DegenerateInterval(t0));
    }
    let h = t1 - t0;
    let s = (t - t0) / h;
    let r = 1.0 - s;
    Ok([
        (1.0 + 2.0 * s) * r * r,
        s * s * (3.0 - 2.0 * s),
        h * s * r * r,
        -h * s * s * r,
    ])
}

pub fn hermite_cubic_eval(
    t0: f64,
    t1: f64,
    f0: &Mat,
    f1: &Mat,
    g0: &Mat,
    g1: &Mat,
    t: f64,
) -> Result<Mat> {
    let [a, b, c, d] = hermite_basis(t0, t1, t)?;
    Ok(f0 * a + f1 * b + g0 * c + g1 * d)
}

/// Nodes, subspaces and (for Hermite) horizontal velocities.
#[derive(Debug, Clone)]
pub struct SampleSet {
    nodes: Vec<f64>,
    points: Vec<StiefelPoint>,
    velocities: Option<Vec<HorizontalTangent>>,
}

impl SampleSet {
    pub fn new(
        nodes: Vec<f64>,
        points: Vec<StiefelPoint>,
        velocities: Option<Vec<HorizontalTangent>>,
    ) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != points.len() {
            return Err(Error::InvalidInput(format!(
                "{} nodes for {} points",
                nodes.len(),
                points.len()
            )));
        }
        if let Some(w) = nodes.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(if w[0] == w[1] {
                Error::DuplicateNode(w[0])
            } else {
                Error::InvalidInput("nodes must be strictly increasing".into())
            });
        }
        let shape = points[0].matrix().shape();
        if let Some(bad) = points.iter().find(|u| u.matrix().shape() != shape) {
            return Err(Error::dims(
                format!("{}x{}", shape.0, shape.1),
                format!("{}x{}", bad.n(), bad.p()),
            ));
        }
        if let Some(vs) = &velocities {
            if vs.len() != points.len() {
                return Err(Error::InvalidInput(format!(
                    "{} velocities for {} points",
                    vs.len(),
                    points.len()
                )));
            }
            for (i, (v, u)) in vs.iter().zip(&points).enumerate() {
                if !v.base().same_base(u) {
                    return Err(Error::at_sample(i)(Error::BaseMismatch));
                }
            }
        }
        Ok(Self {
            nodes,
            points,
            velocities,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn points(&self) -> &[StiefelPoint] {
        &self.points
    }

    pub fn velocities(&self) -> Option<&[HorizontalTangent]> {
        self.velocities.as_deref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n(&self) -> usize {
        self.points[0].n()
    }

    pub fn p(&self) -> usize {
        self.points[0].p()
    }

    fn require_velocities(&self) -> Result<&[HorizontalTangent]> {
        self.velocities()
            .ok_or_else(|| Error::InvalidInput("Hermite schemes need sample velocities".into()))
    }

    /// Index `k` with `t ∈ [t_k, t_{k+1}]`; the last interval is closed on the right.
    fn bracket(&self, t: f64) -> usize {
        let d = self.nodes.len();
        if d < 2 {
            return 0;
        }
        self.nodes[1..d - 1].partition_point(|&x| x <= t)
    }

    /// Nearest node to `t`, lower index on ties.
    fn nearest(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, x) in self.nodes.iter().enumerate() {
            if (x - t).abs() < (self.nodes[best] - t).abs() {
                best = i;
            }
        }
        best
    }
}

/// The six interpolation schemes. MV variants carry the frame chosen for the
/// dataset; Local variants always use the identity frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeId {
    LocalLagrange,
    LocalHermite,
    MVLagrange(ChartFrame),
    MVHermite(ChartFrame),
    NormalLagrange,
    NormalHermite,
}

pub const SCHEME_NAMES: [&str; 6] = [
    "LocalLagrange",
    "LocalHermite",
    "MVLagrange",
    "MVHermite",
    "NormalLagrange",
    "NormalHermite",
];

impl SchemeId {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::LocalLagrange => SCHEME_NAMES[0],
            SchemeId::LocalHermite => SCHEME_NAMES[1],
            SchemeId::MVLagrange(_) => SCHEME_NAMES[2],
            SchemeId::MVHermite(_) => SCHEME_NAMES[3],
            SchemeId::NormalLagrange => SCHEME_NAMES[4],
            SchemeId::NormalHermite => SCHEME_NAMES[5],
        }
    }

    pub fn is_hermite(&self) -> bool {
        matches!(
            self,
            SchemeId::LocalHermite | SchemeId::MVHermite(_) | SchemeId::NormalHermite
        )
    }

    /// Chart frame in force for `Gr(n, p)`; `None` for normal-coordinate schemes.
    pub fn frame(&self, n: usize, p: usize) -> Option<ChartFrame> {
        match self {
            SchemeId::LocalLagrange | SchemeId::LocalHermite => Some(ChartFrame::identity(n, p)),
            SchemeId::MVLagrange(f) | SchemeId::MVHermite(f) => Some(f.clone()),
            SchemeId::NormalLagrange | SchemeId::NormalHermite => None,
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Scheme family without frame data, as parsed from a name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    LocalLagrange,
    LocalHermite,
    MVLagrange,
    MVHermite,
    NormalLagrange,
    NormalHermite,
}

impl SchemeKind {
    /// Attaches `mv_frame` to MV kinds.
    pub fn with_frame(self, mv_frame: &ChartFrame) -> SchemeId {
        match self {
            SchemeKind::LocalLagrange => SchemeId::LocalLagrange,
            SchemeKind::LocalHermite => SchemeId::LocalHermite,
            SchemeKind::MVLagrange => SchemeId::MVLagrange(mv_frame.clone()),
            SchemeKind::MVHermite => SchemeId::MVHermite(mv_frame.clone()),
            SchemeKind::NormalLagrange => SchemeId::NormalLagrange,
            SchemeKind::NormalHermite => SchemeId::NormalHermite,
        }
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "LocalLagrange" => SchemeKind::LocalLagrange,
            "LocalHermite" => SchemeKind::LocalHermite,
            "MVLagrange" => SchemeKind::MVLagrange,
            "MVHermite" => SchemeKind::MVHermite,
            "NormalLagrange" => SchemeKind::NormalLagrange,
            "NormalHermite" => SchemeKind::NormalHermite,
            other => return Err(Error::InvalidInput(format!("unknown scheme {other:?}"))),
        })
    }
}

/// `[Log_anchor(Exp_at(h·v)) − Log_anchor(Exp_at(−h·v))] / (2h)`: the
/// velocity `v` at `at` carried into the tangent space at `anchor`.
pub fn transport_velocity_fd(
    anchor: &StiefelPoint,
    at: &StiefelPoint,
    v: &HorizontalTangent,
    h: f64,
) -> Result<HorizontalTangent> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    if v.norm() == 0.0 {
        return Ok(HorizontalTangent::zero(anchor));
    }
    let plus = grassmann_log(anchor, &grassmann_exp(at, v, h))?;
    let minus = grassmann_log(anchor, &grassmann_exp(at, v, -h))?;
    Ok(HorizontalTangent::project(
        anchor,
        &((plus.matrix() - minus.matrix()) / (2.0 * h)),
    ))
}

struct NormalPiece {
    /// `Log_{f1}(f0)`.
    xi: Mat,
    /// Velocity at `f0` transported to `f1`.
    v0: Mat,
    v1: Mat,
}

enum Prepared {
    Coords {
        frame: ChartFrame,
        coords: Vec<Mat>,
        slopes: Option<Vec<Mat>>,
    },
    NormalLagrange,
    NormalHermite(Vec<NormalPiece>),
}

/// A scheme bound to a dataset, with the per-sample work done once.
pub struct Interpolant<'a> {
    samples: &'a SampleSet,
    prepared: Prepared,
}

impl<'a> Interpolant<'a> {
    pub fn new(samples: &'a SampleSet, scheme: &SchemeId) -> Result<Self> {
        let (n, p) = (samples.n(), samples.p());
        let prepared = match scheme.frame(n, p) {
            Some(frame) => {
                if frame.n() != n || frame.p() != p {
                    return Err(Error::dims(
                        format!("frame for {n}x{p}"),
                        format!("{}x{}", frame.n(), frame.p()),
                    ));
                }
                let coords = samples
                    .points
                    .iter()
                    .enumerate()
                    .map(|(i, u)| {
                        chart_psi(u, &frame)
                            .map(LocalCoordMatrix::into_matrix)
                            .map_err(Error::at_sample(i))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let slopes = if scheme.is_hermite() {
                    let vs = samples.require_velocities()?;
                    Some(
                        vs.iter()
                            .enumerate()
                            .map(|(i, v)| dpsi_tangent(v, &frame).map_err(Error::at_sample(i)))
                            .collect::<Result<Vec<_>>>()?,
                    )
                } else {
                    None
                };
                Prepared::Coords {
                    frame,
                    coords,
                    slopes,
                }
            }
            None if scheme.is_hermite() => {
                let vs = samples.require_velocities()?;
                let pts = &samples.points;
                let pieces = (0..pts.len().saturating_sub(1))
                    .map(|k| {
                        let (f0, f1) = (&pts[k], &pts[k + 1]);
                        let xi = grassmann_log(f1, f0).map_err(Error::at_sample(k))?;
                        let v = &vs[k];
                        let h = TRANSPORT_STEP / v.norm().max(f64::MIN_POSITIVE);
                        let v0 =
                            transport_velocity_fd(f1, f0, v, h).map_err(Error::at_sample(k))?;
                        Ok(NormalPiece {
                            xi: xi.matrix().clone(),
                            v0: v0.matrix().clone(),
                            v1: vs[k + 1].matrix().clone(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Prepared::NormalHermite(pieces)
            }
            None => Prepared::NormalLagrange,
        };
        Ok(Self { samples, prepared })
    }

    pub fn eval(&self, t: f64) -> Result<StiefelPoint> {
        let s = self.samples;
        let (lo, hi) = (s.nodes[0], s.nodes[s.len() - 1]);
        if !(lo <= t && t <= hi) {
            return Err(Error::InvalidInput(format!(
                "t* = {t} outside the sampled interval [{lo}, {hi}]"
            )));
        }
        match &self.prepared {
            Prepared::Coords {
                frame,
                coords,
                slopes: None,
            } => {
                let b = lagrange_eval(&s.nodes, coords, t)?;
                Ok(param_phi(&LocalCoordMatrix::new(b, frame.clone())?))
            }
            Prepared::Coords {
                frame,
                coords,
                slopes: Some(slopes),
            } => {
                if s.len() == 1 {
                    return Ok(s.points[0].clone());
                }
                let k = s.bracket(t);
                let b = hermite_cubic_eval(
                    s.nodes[k],
                    s.nodes[k + 1],
                    &coords[k],
                    &coords[k + 1],
                    &slopes[k],
                    &slopes[k + 1],
                    t,
                )?;
                Ok(param_phi(&LocalCoordMatrix::new(b, frame.clone())?))
            }
            Prepared::NormalLagrange => {
                let a = s.nearest(t);
                let anchor = &s.points[a];
                let logs = s
                    .points
                    .iter()
                    .enumerate()
                    .map(|(j, f)| {
                        if j == a {
                            Ok(Mat::zeros(s.n(), s.p()))
                        } else {
                            grassmann_log(anchor, f)
                                .map(|d| d.matrix().clone())
                                .map_err(Error::at_sample(j))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mu = lagrange_eval(&s.nodes, &logs, t)?;
                let mu = HorizontalTangent::project(anchor, &mu);
                Ok(grassmann_exp(anchor, &mu, 1.0))
            }
            Prepared::NormalHermite(pieces) => {
                if s.len() == 1 {
                    return Ok(s.points[0].clone());
                }
                let k = s.bracket(t);
                let piece = &pieces[k];
                let [l00, _, l01, l11] = hermite_basis(s.nodes[k], s.nodes[k + 1], t)?;
                let anchor = &s.points[k + 1];
                let mu = &piece.xi * l00 + &piece.v0 * l01 + &piece.v1 * l11;
                let mu = HorizontalTangent::project(anchor, &mu);
                Ok(grassmann_exp(anchor, &mu, 1.0))
            }
        }
    }

    /// Evaluates a grid of parameters in parallel; output order follows `ts`.
    pub fn eval_grid(&self, ts: &[f64]) -> Result<Vec<StiefelPoint>> {
        ts.par_iter().map(|&t| self.eval(t)).collect()
    }
}

/// One-shot evaluation of `scheme` on `samples` at `t_star`.
pub fn interpolate(samples: &SampleSet, scheme: &SchemeId, t_star: f64) -> Result<StiefelPoint> {
    Interpolant::new(samples, scheme)?.eval(t_star)
}
