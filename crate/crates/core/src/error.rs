use thiserror::Error;

/// Errors raised by the geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("numerical domain fault: {context}")]
    NumericalDomain { context: String },

    #[error("parameter point {u:?} lies outside the chart domain")]
    OutOfDomain { u: Vec<f64> },

    #[error("jacobian at {u:?} has rank {rank} < {expected} (immersion violated)")]
    RankDeficient {
        u: Vec<f64>,
        rank: usize,
        expected: usize,
    },

    #[error("vector is not a unit normal (residual {residual:e})")]
    NotNormal { residual: f64 },

    #[error("metric at {u:?} is singular (det = {det:e})")]
    SingularMetric { u: Vec<f64>, det: f64 },

    #[error("curve is irregular at t = {t} (speed {speed:e})")]
    IrregularCurve { t: f64, speed: f64 },

    #[error("curve is not unit speed at t = {t} (speed {speed})")]
    NotUnitSpeed { t: f64, speed: f64 },

    #[error("Frenet frame degenerate at t = {t}: rank {rank}, needed {needed}")]
    DegenerateFrame { t: f64, rank: usize, needed: usize },

    #[error("direction is not in the helix space (distance {distance:e})")]
    NotInSpace { distance: f64 },

    #[error("trace left the chart domain at t = {t}, u = {u:?}")]
    LeftDomain { t: f64, u: Vec<f64> },

    #[error("umbilic point encountered at t = {t}, u = {u:?} (eigen-gap {gap:e})")]
    UmbilicEncountered { t: f64, u: Vec<f64>, gap: f64 },

    #[error("theorem requires codimension {expected}, patch has {found}")]
    CodimensionMismatch { expected: usize, found: usize },

    #[error("direction decomposition degenerate at t = {t} ({part} part vanishes)")]
    DegenerateDecomposition { t: f64, part: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),

    #[error("bad parameter {name}: {reason}")]
    BadParameter { name: String, reason: String },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Errors from the immersion expression parser. Positions are 1-based
/// character offsets into the source text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected one of {}", expected.join(", "))]
    SyntaxError {
        position: usize,
        expected: Vec<String>,
    },

    #[error("unknown identifier {name:?} at position {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("function {name} at position {position} takes {expected} argument(s), got {found}")]
    ArityError {
        name: String,
        position: usize,
        expected: usize,
        found: usize,
    },

    #[error("expected {expected} component expressions, found {found}")]
    ComponentCountMismatch { expected: usize, found: usize },
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::SyntaxError { position, .. }
            | ParseError::UnknownIdentifier { position, .. }
            | ParseError::ArityError { position, .. } => Some(*position),
            ParseError::ComponentCountMismatch { .. } => None,
        }
    }
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
