use thiserror::Error;

use crate::metric::MetricKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid norm exponent p = {0}; need p >= 1 or p = infinity")]
    InvalidNorm(f64),

    #[error("unrecognized metric `{0}` (expected l1, l2, linf, l<p> or graphic)")]
    UnknownMetric(String),

    #[error("scale must be a positive integer, got {0}")]
    InvalidScale(i64),

    #[error("cannot compare a {left} distance with a {right} distance")]
    MetricMismatch { left: MetricKind, right: MetricKind },

    #[error("graph is disconnected: city {to} is unreachable from city {from}")]
    Disconnected { from: usize, to: usize },

    #[error("the graphic metric requires scale 1, got {0}")]
    GraphicNeedsUnitScale(i64),

    #[error("family parameter k = {0} is out of range (0..={max})", max = crate::instance::MAX_K)]
    InvalidK(i64),

    #[error("a grid needs at least 2 columns, got {0}")]
    GridTooSmall(usize),

    #[error("instance is not a full 2 x m grid")]
    NotAGrid,

    #[error("instance has no cities")]
    EmptyInstance,

    #[error("city index {index} is out of range for {n} cities")]
    CityIndex { index: usize, n: usize },

    #[error("cities {first} and {second} share the same coordinates")]
    DuplicateCity { first: usize, second: usize },

    #[error("tour visits city {0} more than once")]
    RepeatedCity(usize),

    #[error("tour covers {visited} of {n} cities")]
    IncompleteTour { visited: usize, n: usize },

    #[error("adversarial target must start at city {start}, but starts at {found:?}")]
    TargetStart { start: usize, found: Option<usize> },

    #[error(
        "adversarial target is not NNR-realizable at step {step}: \
         target city {target} is not among the nearest unvisited cities {tie_set:?}"
    )]
    AdversarialTargetIllegal {
        step: usize,
        target: usize,
        tie_set: Vec<usize>,
    },

    #[error("exact optimum refused: {n} cities exceeds the limit of {limit}")]
    TooManyCities { n: usize, limit: usize },

    #[error("perturbation needs a scale of at least {min} (16 n), got {scale}")]
    PerturbScaleTooSmall { scale: i64, min: i64 },

    #[error("perturbation needs an unscaled instance (scale 1), got scale {0}")]
    PerturbNeedsUnitScale(i64),

    #[error("the graphic metric cannot be perturbed")]
    PerturbGraphic,

    #[error("instance carries no family parameter k, so there is no adversarial tour to certify")]
    MissingFamily,

    #[error(
        "strictify search exhausted its budget of {budget} nudges; \
         step {step} still has tie set {tie_set:?}"
    )]
    StrictifyFailed {
        budget: usize,
        step: usize,
        tie_set: Vec<usize>,
    },

    #[error("{0} cannot be written as a TSPLIB edge weight type")]
    UnsupportedExport(MetricKind),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("certification failed: {0}")]
    Certification(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
