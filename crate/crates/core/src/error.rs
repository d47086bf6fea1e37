use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalars from different fields: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("quotient is not certified finite: paths of length {0} survive the relations")]
    CapExceeded(usize),
    #[error("relation {0} is not homogeneous of length >= 2")]
    InhomogeneousRelation(String),
    #[error("source/target mismatch: {0}")]
    SourceTargetMismatch(String),
    #[error("quiver has a cycle through {0}; its free category has infinite Hom sets")]
    CyclicQuiver(String),
    #[error("not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("not a monoid: {0}")]
    NotAMonoid(String),
    #[error("target of the transformation is not a diagonal colax functor")]
    NotDiagonalTarget,
    #[error("complexes live over different base categories")]
    BaseMismatch,
    #[error("expected a chain map of degree {expected}, got degree {got}")]
    WrongShift { expected: i64, got: i64 },
    #[error("base category is not basic with local endomorphism rings: {0}")]
    NotBasicLocal(String),
    #[error("operation requires the rational field")]
    FieldNotRationals,
    #[error("orthogonality routes disagree: {0}")]
    CrossValidationMismatch(String),
    #[error("search exceeded its cap: {0}")]
    SearchCapExceeded(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unresolved reference `{name}` at line {line}")]
    UnresolvedReference { name: String, line: usize },
    #[error("invalid data: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
