use thiserror::Error;

/// Errors produced by the entropy toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative probability {value} at flat index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("keep set is empty")]
    EmptyKeepSet,

    #[error("variable index {index} out of range for {num_vars} variable(s)")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("product would have {0} variables; at most 3 are supported")]
    ResultExceedsThreeVars(usize),

    #[error("logarithm base {0} must be greater than 1")]
    InvalidBase(f64),

    #[error("the two variables must differ (got {0} twice)")]
    SameVariable(usize),

    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,

    #[error("mixture weights sum to {0}, not 1")]
    WeightsNotNormalized(f64),

    #[error("`after` differs from the weighted mixture by {0}")]
    AfterIsNotTheMixture(f64),

    #[error("expected a tripartite distribution, got {0} variable(s)")]
    WrongArity(usize),

    #[error("mutual information {0} is negative")]
    NegativeMutualInformation(f64),

    #[error("invalid Markov chain spec: {0}")]
    InvalidSpec(String),

    #[error("indices must be pairwise distinct")]
    RepeatedIndex,

    #[error("{0:?} is not a permutation of (0, 1, 2)")]
    InvalidPermutation([usize; 3]),

    #[error("matrix is not Hermitian (deviation {0})")]
    NotHermitian(f64),

    #[error("trace is {0}, not 1")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (eigenvalue {0})")]
    NotPositiveSemidefinite(f64),

    #[error("invalid subsystem selection")]
    InvalidSubsystem,

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("measurement angle {0} is not finite")]
    InvalidAngle(f64),

    #[error("grid resolution {got} is below the minimum {min}")]
    ResolutionTooSmall { got: usize, min: usize },

    #[error("tolerance {0} must be positive")]
    InvalidTolerance(f64),

    #[error("maximum lhs fell from {lhs_lo} at p={p_lo} to {lhs_hi} at p={p_hi}")]
    MonotonicityViolated {
        p_lo: f64,
        lhs_lo: f64,
        p_hi: f64,
        lhs_hi: f64,
    },

    #[error("total {0} is out of range")]
    TotalOutOfRange(i64),

    #[error("{0} dice requested; exact enumeration is limited to 8")]
    TooManyDice(u32),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A quantity that is nonnegative by theory came out clearly negative.
    #[error("internal numerical inconsistency: {quantity} = {value}")]
    Internal { quantity: &'static str, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
