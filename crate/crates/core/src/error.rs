use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("parameter {value} of `{atom}` is out of range ({bound})")]
    AtomOutOfRange {
        atom: String,
        value: u64,
        bound: &'static str,
    },

    #[error("group order {order} exceeds the configured cap {cap}")]
    OrderCap { order: String, cap: u64 },

    #[error("closure exceeded the member cap {cap} after reaching {reached} elements")]
    ClosureCap { cap: u64, reached: usize },

    #[error("enumeration of {needed} tuples exceeds the budget of {budget}")]
    Budget { needed: String, budget: usize },

    #[error("cannot read group table {path}: {source}")]
    TableIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed group table: {0}")]
    TableFormat(String),

    #[error("table does not define a group: {0}")]
    NotAGroup(String),

    #[error("map is not a homomorphism: f({a}*{b}) != f({a})*f({b})")]
    NotHomomorphism { a: usize, b: usize },

    #[error("map is not {0}")]
    NotBijective(&'static str),

    #[error("invalid tuple: {0}")]
    InvalidTuple(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("malformed matrix: {0}")]
    MatrixFormat(String),

    #[error("invalid connection set: {0}")]
    ConnectionSet(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("graph has {vertices} vertices, above the export cap of {cap}")]
    ExportCap { vertices: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
