use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polygon needs at least 3 non-collinear vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not convex")]
    NotConvex,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("bisector is undefined: sites coincide within {0:e}")]
    DegenerateBisector(f64),
    #[error("sites {0} and {1} coincide")]
    DuplicateSite(usize, usize),
    #[error("site {0} lies outside the domain")]
    OutOfDomain(usize),
    #[error("voronoi cell of site {0} is empty")]
    EmptyCell(usize),
    #[error("need at least one sensor")]
    NoSites,
    #[error("density integrates to zero over the domain")]
    ZeroMass,
    #[error("invalid density term: {0}")]
    InvalidDensity(String),
    #[error("grid size must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("only {available} candidates carry positive weight, {requested} requested")]
    InsufficientCandidates { available: usize, requested: usize },
    #[error("sampling distribution has zero total mass after {chosen} picks")]
    DegenerateDistribution { chosen: usize },
    #[error("instance too large for exhaustive search: n = {n}, k = {k}")]
    InstanceTooLarge { n: usize, k: usize },
    #[error("invalid point set: {0}")]
    InvalidPointSet(String),
    #[error("invalid descent settings: {0}")]
    InvalidSettings(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
