use thiserror::Error;

/// Every failure the library can report. Variant names are stable and are
/// printed verbatim by the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("NonPrimeCharacteristic: {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("TowerMismatch: s*r = {s}*{r} does not equal m = {m}")]
    TowerMismatch { s: u32, r: u32, m: u32 },
    #[error("FieldTooLarge: p^m = {p}^{m} exceeds the supported table size")]
    FieldTooLarge { p: u32, m: u32 },
    #[error("InvalidModulus: {0}")]
    InvalidModulus(String),
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("ContextMismatch: {0}")]
    ContextMismatch(String),
    #[error("NoTowerDeclared")]
    NoTowerDeclared,
    #[error("ArgNotInSubfield")]
    ArgNotInSubfield,
    #[error("DivisionByZeroPoly")]
    DivisionByZeroPoly,
    #[error("EnumerationBudgetExceeded: {needed} pairs > budget {budget}")]
    EnumerationBudgetExceeded { needed: u64, budget: u64 },
    #[error("PointNotOnCurve: ({0}, {1})")]
    PointNotOnCurve(u32, u32),
    #[error("ClassReductionUnsound: line ({alpha}, {beta}) counts {found}, class representative counts {expected}")]
    ClassReductionUnsound {
        alpha: u32,
        beta: u32,
        found: usize,
        expected: usize,
    },
    #[error("InvalidExtensionDegree: r = {0} (need r >= 2)")]
    InvalidExtensionDegree(u32),
    #[error("BoundViolated: class (norm {norm}, trace {trace}) counts {count} < bound {bound}")]
    BoundViolated {
        norm: u32,
        trace: u32,
        count: usize,
        bound: i64,
    },
    #[error("DegeneratePlan: B = {0} (need B >= 3)")]
    DegeneratePlan(i64),
    #[error("LocalityUnsatisfiable: line ({alpha}, {beta}) meets the curve in {count} < B = {b} points")]
    LocalityUnsatisfiable {
        alpha: u32,
        beta: u32,
        count: usize,
        b: usize,
    },
    #[error("LengthMismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("IndexOutOfRange: {index} >= {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("NoViableLine: position {0}")]
    NoViableLine(usize),
    #[error("NotErased: position {0}")]
    NotErased(usize),
    #[error("RankDeficient: expected rank {expected}, got {got}")]
    RankDeficient { expected: usize, got: usize },
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
