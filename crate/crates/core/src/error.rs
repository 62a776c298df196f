use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is rank deficient (smallest/largest pivot ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    /// `uᵀv` is numerically singular, so some principal angle is π/2.
    #[error("points are (numerically) on each other's cut locus, cond(uᵀv) = {cond:e}")]
    CutLocus { cond: f64 },

    /// The pivot block selected by a chart frame cannot be inverted reliably.
    #[error("pivot block ill-conditioned: cond = {cond:e}, ‖U₁⁻¹‖_F ≈ {inv_norm:e}")]
    IllConditionedBlock { cond: f64, inv_norm: f64 },

    #[error(
        "no candidate frame keeps every block usable; per-candidate worst ‖U₁⁻¹‖_F: {worst:?}"
    )]
    NoUsableFrame { worst: Vec<f64> },

    #[error("duplicate interpolation node {0}")]
    DuplicateNode(f64),

    #[error("degenerate Hermite interval: both end points equal {0}")]
    DegenerateInterval(f64),

    #[error("computed representative lost orthonormality: ‖ÛᵀÛ − I‖_F = {value:e}")]
    Infeasible { value: f64 },

    #[error("time integration blew up at t = {time}")]
    Unstable { time: f64 },

    #[error("sample {index}: {source}")]
    AtSample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix text format: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_sample(index: usize) -> impl FnOnce(Error) -> Error {
        move |source| Error::AtSample {
            index,
            source: Box::new(source),
        }
    }

    pub(crate) fn dims(expected: impl Into<String>, found: impl Into<String>) -> Error {
        Error::DimensionMismatch {
            expected: expected.into(),
            found: found.into(),
        }
    }

    /// Strips `AtSample` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSample { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures caused by the numerics rather than by bad arguments.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::RankDeficient { .. }
                | Error::CutLocus { .. }
                | Error::IllConditionedBlock { .. }
                | Error::NoUsableFrame { .. }
                | Error::Unstable { .. }
                | Error::Infeasible { .. }
        )
    }
}
