use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series has nonzero constant term; exp is only defined here for f(0) = 0")]
    NonzeroConstantTerm,

    #[error("requested order {requested} exceeds the order {available} of the supplied data")]
    OrderTooHigh { requested: usize, available: usize },

    #[error("class `{0}` is {1}, operation needs a {2} class")]
    WrongKind(String, &'static str, &'static str),

    #[error("unknown built-in class `{0}`")]
    UnknownClass(String),

    #[error("not subcritical at this truncation: {0}")]
    NotSubcritical(String),

    #[error("asymptotics mismatch: {0}")]
    AsymptoticsMismatch(String),

    #[error("extrapolation did not settle (order too low): {0}")]
    OrderTooLow(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not 2-connected (and not K2)")]
    NotBiconnected,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("root of the fringe graph lies in {0} blocks; exactly one is required")]
    RootInSeveralBlocks(usize),

    #[error("size {size} exceeds the supported bound {bound}")]
    SizeBound { size: usize, bound: usize },

    #[error("class `{0}` has no block generator")]
    NoBlockGenerator(String),

    #[error("invalid class description: {0}")]
    InvalidClass(String),

    #[error("link mass cutoff not reachable: {0}")]
    MassCutoff(String),

    #[error("the root is an infinite-degree vertex; the ground floor is undefined")]
    RootInfiniteDegree,

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
