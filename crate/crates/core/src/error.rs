//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    // -- topology --
    #[error("too many points: {0} (at most {1} supported)")]
    TooManyPoints(usize, usize),
    #[error("duplicate point label `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("the empty set and the full point set must both be opens")]
    MissingBoundaryOpens,
    #[error("opens not closed under {op}: {a} {op} {b} is missing")]
    NotClosed { op: &'static str, a: String, b: String },
    #[error("subset {0} is not open in this space")]
    NotOpen(String),
    #[error("open sets belong to different spaces")]
    SpaceMismatch,

    // -- formula --
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound variable `{name}` at byte {pos}")]
    UnboundVariable { name: String, pos: usize },
    #[error("unknown quantifier domain `{name}` at byte {pos}")]
    UnknownDomainName { name: String, pos: usize },

    // -- forcing --
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unknown quantifier domain `{0}`")]
    UnknownDomain(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("atom `{0}` is not supported by this structure")]
    UnsupportedAtom(&'static str),
    #[error("section `{id}` is not defined on {open}")]
    SectionUndefined { id: String, open: String },
    #[error("presheaf is malformed: {0}")]
    MalformedPresheaf(String),
    #[error("environment is missing variable `{0}`")]
    MissingEnv(String),

    // -- vset --
    #[error("variable-set rank {0} exceeds the configured bound {1}")]
    RankBound(usize, usize),
    #[error("variable sets have incompatible domains: {0} vs {1}")]
    IncompatibleDomains(String, String),
    #[error("variable set is malformed: {0}")]
    MalformedVariableSet(String),

    // -- quantum --
    #[error("operator family is empty")]
    EmptyFamily,
    #[error("operator `{name}` is not Hermitian (max deviation {deviation:.3e}, tolerance {tol:.3e})")]
    NotHermitian { name: String, deviation: f64, tol: f64 },
    #[error("operators `{a}` and `{b}` do not commute (commutator norm {norm:.3e}, tolerance {tol:.3e})")]
    NotCommuting { a: String, b: String, norm: f64, tol: f64 },
    #[error("operator dimension mismatch: `{name}` is {got}x{got}, expected {expected}x{expected}")]
    DimMismatch { name: String, got: usize, expected: usize },
    #[error("context has {0} atoms; materializing all subsets is capped at {1} atoms")]
    TooManyAtoms(usize, usize),
    #[error("operator `{name}` is not in the context's algebra: {reason}")]
    NotInAlgebra { name: String, reason: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("state vector has dimension {got}, context has dimension {expected}")]
    StateDimMismatch { got: usize, expected: usize },
    #[error("state vector is not normalized (norm {0:.6}); pass the unnormalized flag to allow")]
    NotNormalized(f64),
    #[error("eigensolver failed to converge after {0} sweeps")]
    NoConvergence(usize),

    // -- takeuti --
    #[error("cuts belong to different contexts")]
    ContextMismatch,
    #[error("interval bounds are reversed: {c} > {d}")]
    ReversedInterval { c: String, d: String },
    #[error("Dedekind cut axioms fail: {0}")]
    CutAxiomsFail(String),

    // -- generic --
    #[error("filter invariant violated: {0}")]
    InvalidFilter(String),

    // -- io / schema --
    #[error("invalid input at {pointer}: {msg}")]
    Schema { pointer: String, msg: String },

    // cross-checks that can only fail on an internal bug
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the error indicates a bad input (CLI exit 2) rather than an
    /// internal invariant failure (CLI exit 3).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
