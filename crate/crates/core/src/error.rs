use alloc::string::String;

use thiserror::Error;

/// Validation and argument errors for distance distribution functions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DdfError {
    #[error("a distance distribution function needs at least one breakpoint")]
    Empty,
    #[error("{breakpoints} breakpoints but {values} values")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("breakpoint {index} is not finite")]
    NonFiniteBreakpoint { index: usize },
    #[error("breakpoint {index} is negative")]
    NegativeBreakpoint { index: usize },
    #[error("breakpoint {index} is not strictly greater than its predecessor")]
    UnsortedBreakpoints { index: usize },
    #[error("value {index} lies outside [0, 1]")]
    ValueOutOfRange { index: usize },
    #[error("value {index} is smaller than its predecessor")]
    DecreasingValues { index: usize },
    #[error("cannot evaluate at negative argument {0}")]
    NegativeArgument(f64),
    #[error("argument scale {0} must be positive and finite")]
    InvalidScale(f64),
}

/// Errors from t-norm evaluation and parsing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TNormError {
    #[error("t-norm argument {0} lies outside [0, 1]")]
    ArgumentOutOfRange(f64),
    #[error("unknown t-norm `{0}` (expected W, Prod or M)")]
    UnknownName(String),
}

/// Errors raised while building or querying a finite probabilistic metric space.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("point `{0}` is listed twice")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("table entry pairs `{0}` with itself")]
    SelfPair(String),
    #[error("no distance distribution given for pair `{0}`|`{1}`")]
    MissingPair(String, String),
    #[error("pair `{0}`|`{1}` is given twice with different distributions")]
    ConflictingEntry(String, String),
    #[error("PM1 violated: distinct points `{0}` and `{1}` are at distance epsilon_0")]
    Pm1Violation(String, String),
    #[error("neighborhood radius {0} must lie in (0, 1]")]
    InvalidRadius(f64),
    #[error("map image {image} of point {point} is out of range")]
    MapOutOfRange { point: usize, image: usize },
}

/// Errors for E-spaces: probability spaces, base metrics and points.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ESpaceError {
    #[error("probability space has no outcomes")]
    NoOutcomes,
    #[error("outcome {index} has non-positive or non-finite probability")]
    NonPositiveProbability { index: usize },
    #[error("outcome probabilities sum to {0}, not 1")]
    ProbabilitySum(f64),
    #[error("point has {found} outcome coordinates, expected {expected}")]
    OutcomeCount { expected: usize, found: usize },
    #[error("base element has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("base element has a non-finite coordinate")]
    NonFiniteCoordinate,
    #[error("base dimension must be at least 1")]
    ZeroDimension,
    #[error("metric table is not square")]
    TableNotSquare,
    #[error("metric table entry ({0}, {1}) is negative or not finite")]
    TableEntry(usize, usize),
    #[error("metric table is not symmetric at ({0}, {1})")]
    TableAsymmetric(usize, usize),
    #[error("metric table diagonal entry {0} is not zero")]
    TableDiagonal(usize),
    #[error("base element index {index} out of range for a table of {len}")]
    ElementOutOfRange { index: usize, len: usize },
    #[error("affine map matrix must be {dim}x{dim} with an offset of length {dim}")]
    MapShape { dim: usize },
}

/// Errors from the contraction checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContractionError {
    #[error("m must be at least 1")]
    ZeroM,
    #[error("contraction constant {0} lies outside (0, 1)")]
    InvalidK(f64),
    #[error("window length must be positive")]
    EmptyWindow,
    #[error("(m,k)-B-contraction fails on orbit pair ({0}, {1})")]
    NotContractive(usize, usize),
}

/// Errors from index-set combinatorics and the finite dense-set search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CombinatoricsError {
    #[error("m must be at least 1")]
    ZeroM,
    #[error("window length must be positive")]
    EmptyWindow,
    #[error("gap bound m = {m} exceeds the window length {window}")]
    WindowTooShort { m: usize, window: usize },
    #[error("member {member} lies outside the window [0, {window})")]
    MemberOutOfRange { member: usize, window: usize },
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("residue {residue} is not below the period {period}")]
    ResidueOutOfRange { residue: usize, period: usize },
    #[error("pre-period member {member} is not below the periodic start {start}")]
    PreperiodOutOfRange { member: usize, start: usize },
    #[error("explicit members disagree with the periodic descriptor at {0}")]
    PeriodicMismatch(usize),
    #[error("pair ({i}, {j}) lies outside the window [0, {window})")]
    PairOutOfRange { i: usize, j: usize, window: usize },
    #[error("hypothesis (i) fails: the column {{i : (i, 0) in R}} is not m-syndetic")]
    ColumnNotSyndetic,
    #[error("hypothesis (ii) fails: the diagonal through ({0}, {1}) is not m-syndetic")]
    DiagonalNotSyndetic(usize, usize),
    #[error("best density {best} found is below the guaranteed {needed}")]
    DensityShortfall { best: f64, needed: f64 },
    #[error(transparent)]
    Contraction(#[from] ContractionError),
}

/// Errors from the fixed-point solver and its orbit checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("tolerance {0} must be positive")]
    InvalidTolerance(f64),
    #[error("iteration budget must be at least 1")]
    ZeroBudget,
    #[error("period n must be at least 1")]
    ZeroPeriod,
    #[error("f^{0} p differs from p")]
    NotPeriodic(usize),
    #[error("fewer than two index-set members ({0}) at or past the tail")]
    TooFewMembers(usize),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
}

/// Errors for probabilistic normed spaces.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PnError {
    #[error("contraction constant {0} lies outside (0, 1)")]
    InvalidK(f64),
    #[error("epsilon {0} lies outside (0, 1)")]
    InvalidEpsilon(f64),
    #[error("lambda {0} lies outside [0, 1]")]
    InvalidLambda(f64),
    #[error("at least one sample vector is required")]
    NoSamples,
    #[error("the map is not linear")]
    NotLinear,
    #[error("the strict C-contraction condition fails at the start vector")]
    StrictConditionFails,
    #[error("the C-contraction condition fails on sample {0}")]
    NotContraction(usize),
    #[error(transparent)]
    Space(#[from] ESpaceError),
}
