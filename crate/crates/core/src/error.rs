use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("transition matrix is not primitive (subshift is not mixing)")]
    NotMixing,
    #[error("symbol `{0}` is unused as a source or target of the transitions")]
    UnusedLetter(String),
    #[error("invalid subshift: {0}")]
    InvalidSubshift(String),
    #[error("word {0:?} is not admissible")]
    InadmissibleWord(Vec<usize>),
    #[error("scale {rho} requires more than {budget} enumerated words")]
    ScaleTooFine { rho: f64, budget: usize },
    #[error("point {x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("invalid branch: {0}")]
    InvalidBranch(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("word {0:?} is not cyclically admissible")]
    NotCyclicallyAdmissible(Vec<usize>),
    #[error("enumeration budget of {budget} words exceeded ({what})")]
    BudgetExceeded { what: String, budget: usize },
    #[error("no cylinder falls in the scale window around {0}")]
    EmptyScale(f64),
    #[error("fewer than 3 distinct scales for a box-dimension fit")]
    DegenerateScales,
    #[error("nesting violated at level {level}, interval {index}")]
    NestingViolated { level: usize, index: usize },
    #[error("depth {depth} exceeds the available tail length {available}")]
    DepthExceedsTail { depth: usize, available: usize },
    #[error("tails end with different symbols ({0} vs {1})")]
    TailMismatch(usize, usize),
    #[error("word does not start with the last tail symbol: {0}")]
    InadmissibleJoin(String),
    #[error("sublemma hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("target upper end {b} exceeds the certified lower dimension {d_lower}")]
    TargetAboveDimension { b: f64, d_lower: f64 },
    #[error("post-conditions not verifiable within budget: {0}")]
    DistortionTooWeak(String),
    #[error("root bracket failed: {0}")]
    NoRoot(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
