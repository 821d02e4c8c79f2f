use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{samples} samples cannot resolve modes up to {max_mode} (need at least {needed})")]
    TooFewSamples { samples: usize, max_mode: usize, needed: usize },

    #[error("angle {theta} is outside the admissible domain of the {preset} preset")]
    AngleOutOfDomain { theta: f64, preset: String },

    #[error("arc {arc} out of range 1..={arc_count}")]
    ArcOutOfRange { arc: usize, arc_count: usize },

    #[error("invalid surface preset: {0}")]
    InvalidPreset(String),

    #[error("symbol is not in the {preset} algebra (deviation {deviation:e})")]
    NotAMember { preset: String, deviation: f64 },

    #[error("truncation size {n} is smaller than the corner size {corner}")]
    TruncationTooSmall { n: usize, corner: usize },

    #[error("symbol vanishes on the circle (min |f| = {min_modulus:e})")]
    VanishingSymbol { min_modulus: f64 },

    #[error("symbol has winding number {winding}; the element is not invertible in the algebra")]
    NonzeroWinding { winding: i64 },

    #[error("truncated inverse residual {residual:e} exceeds tolerance {tol:e}")]
    InversionResidual { residual: f64, tol: f64 },

    #[error("singular truncated system at n = {n}")]
    SingularTruncation { n: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("defect operator is not near-idempotent (deviation {deviation:e}); index formula inapplicable")]
    NotNearIsometric { deviation: f64 },

    #[error("compressed index unstable: {index_n} at n = {n}, {index_2n} at n = {n2}")]
    UnstableIndex { n: usize, n2: usize, index_n: i64, index_2n: i64 },

    #[error("not a projection: {0}")]
    NotAProjection(String),

    #[error("malformed chain: {0}")]
    MalformedChain(String),

    #[error("unknown element name: {0}")]
    UnknownElement(String),

    #[error("operation requires {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
