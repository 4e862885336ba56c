use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("M must be at least 1 (got {0})")]
    MinimumBelowOne(u32),
    #[error("M exceeds N ({m} > {n})")]
    MExceedsN { m: u32, n: u32 },
    #[error("failure rate must be nonnegative (got {0})")]
    NegativeRate(f64),
    #[error("failure rate must be finite (got {0})")]
    NonFiniteRate(f64),
    #[error("architecture N = {0} is beyond the supported range (N <= {max})", max = crate::combinatorics::MAX_COMPONENTS)]
    UnsupportedArchitecture(u32),
    #[error("binomial coefficient C({n}, {k}) requires k <= n")]
    BinomialDomain { n: u64, k: u64 },
    #[error("binomial coefficient C({0}, k) is beyond the exact integer range")]
    BinomialOverflow(u64),
    #[error("schedule must contain at least one test")]
    EmptySchedule,
    #[error("test time {index} is not a finite positive value (got {value})")]
    InvalidTestTime { index: usize, value: f64 },
    #[error("test times must be strictly increasing (t_{index} = {value} <= previous {previous})")]
    NonIncreasingSchedule {
        index: usize,
        value: f64,
        previous: f64,
    },
    #[error("number of tests must be at least 1")]
    NoTests,
    #[error("full test interval must be finite and positive (got {0})")]
    InvalidInterval(f64),
    #[error("partial test efficiency must lie in [0, 1] (got {0})")]
    InvalidEfficiency(f64),
    #[error("time {t} h lies outside the full test interval [0, {tau}] h")]
    TimeOutOfRange { t: f64, tau: f64 },
    #[error("test index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("grid step must be finite and positive (got {0})")]
    InvalidStep(f64),
    #[error("observation count list has {got} entries, schedule has {expected} tests")]
    CountLengthMismatch { got: usize, expected: usize },
    #[error("observed components K must be at least 1")]
    NoObservedComponents,
    #[error("count k_{index} = {count} exceeds K = {k}")]
    CountExceedsObserved { index: usize, count: u64, k: u64 },
    #[error("efficiency is unidentifiable without partial tests (n = {0})")]
    NoPartialTests(usize),
    #[error("confidence level must lie strictly between 0 and 1 (got {0})")]
    InvalidConfidenceLevel(f64),
    #[error("reference schedule is incompatible: {0}")]
    IncompatibleReference(String),
    #[error("simulation needs at least one trial")]
    NoTrials,
}
