use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field {field} does not contain {symbol}")]
    MissingRoot { symbol: &'static str, field: String },
    #[error("characteristic {0} is not admissible here: {1}")]
    Inadmissible(u64, String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("matrix kind violated: {0}")]
    KindViolation(String),
    #[error("sigma index {t} out of range for {n}x{n} matrices")]
    SigmaOutOfRange { t: usize, n: usize },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown invariant set `{0}`")]
    UnknownCase(String),
    #[error("invariant set `{case}` does not accept d = {d}")]
    WrongArity { case: String, d: usize },
    #[error("no built-in witness for {f} in case {case}")]
    NoBuiltinWitness { case: String, f: String },
    #[error("pool insufficient: {0}")]
    PoolInsufficient(String),
    #[error("resource cap exceeded: component {mdeg} has {monomials} monomials (cap {cap})")]
    ResourceCap { mdeg: String, monomials: u128, cap: u128 },
    #[error("unresolved computation: {0}")]
    Unresolved(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
