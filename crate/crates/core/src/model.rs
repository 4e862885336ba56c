//! Validated domain types: the system architecture, the test schedule and the
//! partial-test efficiency, plus the time units used at the boundaries.
//!
//! All computations run in hours. Values in other units are converted on the
//! way in with [`convert_time`].

use crate::combinatorics::MAX_COMPONENTS;
use crate::{Error, Result};

/// An M-out-of-N architecture of identical components with a constant
/// failure rate (per hour).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    m: u32,
    n_components: u32,
    lambda: f64,
}

impl SystemSpec {
    pub fn new(m: u32, n_components: u32, lambda: f64) -> Result<Self> {
        validate_system(m, n_components, lambda)
    }

    /// Minimum number of operating components for the safety function.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n_components(&self) -> u32 {
        self.n_components
    }

    /// Failure rate of each component, per hour.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Same architecture with a different failure rate.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        validate_system(self.m, self.n_components, lambda)
    }
}

/// Checks the raw architecture and rate, naming the first violated invariant.
pub fn validate_system(m: u32, n_components: u32, lambda: f64) -> Result<SystemSpec> {
    if m < 1 {
        return Err(Error::MinimumBelowOne(m));
    }
    if m > n_components {
        return Err(Error::MExceedsN { m, n: n_components });
    }
    if n_components > MAX_COMPONENTS {
        return Err(Error::UnsupportedArchitecture(n_components));
    }
    if !lambda.is_finite() {
        return Err(Error::NonFiniteRate(lambda));
    }
    if lambda < 0.0 {
        return Err(Error::NegativeRate(lambda));
    }
    Ok(SystemSpec {
        m,
        n_components,
        lambda,
    })
}

/// Test instants `t_1 < t_2 < ... < t_n` in hours. The last one is the full
/// test and closes the interval `[0, tau]`; the others are partial tests.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSchedule {
    times: Vec<f64>,
}

impl TestSchedule {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptySchedule);
        }
        let mut previous = 0.0;
        for (idx, &value) in times.iter().enumerate() {
            let index = idx + 1;
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidTestTime { index, value });
            }
            if value <= previous {
                return Err(Error::NonIncreasingSchedule {
                    index,
                    value,
                    previous,
                });
            }
            previous = value;
        }
        Ok(Self { times })
    }

    /// Builds a schedule from interval lengths `T_1..T_n`.
    pub fn from_intervals(intervals: &[f64]) -> Result<Self> {
        let mut acc = 0.0;
        let times = intervals
            .iter()
            .map(|gap| {
                acc += gap;
                acc
            })
            .collect();
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of tests `n` (partial tests plus the final full test).
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Full test interval `tau = t_n`.
    pub fn full_interval(&self) -> f64 {
        *self.times.last().expect("schedule is never empty")
    }

    /// `t_{i-1}` for a 1-based test index, with `t_0 = 0`.
    pub fn start(&self, index: usize) -> f64 {
        if index <= 1 {
            0.0
        } else {
            self.times[index - 2]
        }
    }

    /// `t_i` for a 1-based test index.
    pub fn end(&self, index: usize) -> f64 {
        self.times[index - 1]
    }

    /// `T_i = t_i - t_{i-1}` for a 1-based test index.
    pub fn interval(&self, index: usize) -> f64 {
        self.end(index) - self.start(index)
    }

    /// Iterates `(i, t_{i-1}, t_i)` for `i = 1..=n`.
    pub fn segments(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.times
            .iter()
            .enumerate()
            .map(|(idx, &end)| (idx + 1, self.start(idx + 1), end))
    }

    pub fn intervals(&self) -> Vec<f64> {
        self.segments().map(|(_, a, b)| b - a).collect()
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                n: self.len(),
            });
        }
        Ok(())
    }

    /// Finds which inter-test interval governs the state at `instant`.
    ///
    /// Availability is right-continuous: a test instant `t_i` belongs to
    /// interval `i + 1` (post-repair) unless the left limit is requested.
    /// The full test at `tau` renews the system.
    pub fn locate(&self, instant: Instant) -> Result<Position> {
        let tau = self.full_interval();
        let t = instant.time;
        if !(0.0..=tau).contains(&t) {
            return Err(Error::TimeOutOfRange { t, tau });
        }
        if t == 0.0 {
            return Ok(Position::Within { index: 1 });
        }
        let index = match instant.side {
            // first i with t <= t_i
            Side::Before => self.times.partition_point(|&ti| ti < t) + 1,
            // first i with t < t_i
            Side::At => self.times.partition_point(|&ti| ti <= t) + 1,
        };
        if index > self.len() {
            Ok(Position::Renewed)
        } else {
            Ok(Position::Within { index })
        }
    }
}

/// Where an instant falls relative to the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    /// Inside interval `index` (1-based), i.e. governed by `t_{index-1}`.
    Within { index: usize },
    /// At `tau` after the full test: as good as new.
    Renewed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The value at `t` itself, after any repair performed at `t`.
    At,
    /// The left limit at `t`, before any test performed at `t`.
    Before,
}

/// A time in hours together with the one-sided convention to apply at test
/// instants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instant {
    pub time: f64,
    pub side: Side,
}

impl Instant {
    pub fn at(time: f64) -> Self {
        Self {
            time,
            side: Side::At,
        }
    }

    pub fn before(time: f64) -> Self {
        Self {
            time,
            side: Side::Before,
        }
    }
}

/// Schedule plus partial-test efficiency `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestPolicy {
    schedule: TestSchedule,
    efficiency: f64,
}

impl TestPolicy {
    /// `E = 0` (partial tests reveal nothing) and `E = 1` (every test renews)
    /// are both accepted.
    pub fn new(schedule: TestSchedule, efficiency: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::InvalidEfficiency(efficiency));
        }
        Ok(Self {
            schedule,
            efficiency,
        })
    }

    pub fn schedule(&self) -> &TestSchedule {
        &self.schedule
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn full_interval(&self) -> f64 {
        self.schedule.full_interval()
    }
}

/// `n` equally spaced tests over `[0, tau]`: `t_i = i * tau / n`.
pub fn periodic_schedule(n: usize, tau: f64) -> Result<TestSchedule> {
    if n == 0 {
        return Err(Error::NoTests);
    }
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidInterval(tau));
    }
    let mut times: Vec<f64> = (1..=n).map(|i| i as f64 * tau / n as f64).collect();
    times[n - 1] = tau;
    TestSchedule::new(times)
}

/// Time units accepted at the boundaries. A month is fixed at 730 h so that
/// twelve of them make exactly one 8760 h year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeUnit {
    Hour,
    Month,
    Year,
}

impl TimeUnit {
    pub const HOURS_PER_MONTH: f64 = 730.0;
    pub const HOURS_PER_YEAR: f64 = 8760.0;

    pub fn hours(self) -> f64 {
        match self {
            TimeUnit::Hour => 1.0,
            TimeUnit::Month => Self::HOURS_PER_MONTH,
            TimeUnit::Year => Self::HOURS_PER_YEAR,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TimeUnit::Hour => "hour",
            TimeUnit::Month => "month",
            TimeUnit::Year => "year",
        }
    }
}

pub fn convert_time(value: f64, from: TimeUnit, to: TimeUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.hours() / to.hours()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_study_system_is_valid() {
        let s = validate_system(2, 6, 6.1e-5).unwrap();
        assert_eq!((s.m(), s.n_components(), s.lambda()), (2, 6, 6.1e-5));
        assert!(validate_system(1, 1, 0.0).is_ok());
    }

    #[test]
    fn system_validation_errors_are_distinct() {
        assert_eq!(
            validate_system(3, 2, 1e-5),
            Err(Error::MExceedsN { m: 3, n: 2 })
        );
        assert!(validate_system(3, 2, 1e-5)
            .unwrap_err()
            .to_string()
            .contains("M exceeds N"));
        assert_eq!(validate_system(0, 2, 1e-5), Err(Error::MinimumBelowOne(0)));
        assert_eq!(
            validate_system(1, 2, -1e-5),
            Err(Error::NegativeRate(-1e-5))
        );
        assert!(matches!(
            validate_system(1, 2, f64::NAN),
            Err(Error::NonFiniteRate(_))
        ));
        assert!(matches!(
            validate_system(1, 2, f64::INFINITY),
            Err(Error::NonFiniteRate(_))
        ));
        assert_eq!(
            validate_system(1, 31, 1e-5),
            Err(Error::UnsupportedArchitecture(31))
        );
    }

    #[test]
    fn periodic_schedules() {
        let s = periodic_schedule(4, 8760.0).unwrap();
        assert_eq!(s.times(), &[2190.0, 4380.0, 6570.0, 8760.0]);
        assert_eq!(periodic_schedule(1, 8760.0).unwrap().times(), &[8760.0]);
        let tau = convert_time(12.0, TimeUnit::Month, TimeUnit::Hour);
        assert_eq!(
            periodic_schedule(3, tau).unwrap().times(),
            &[2920.0, 5840.0, 8760.0]
        );
        assert_eq!(periodic_schedule(0, 10.0), Err(Error::NoTests));
        assert_eq!(periodic_schedule(2, 0.0), Err(Error::InvalidInterval(0.0)));
        assert_eq!(
            periodic_schedule(2, -1.0),
            Err(Error::InvalidInterval(-1.0))
        );
    }

    #[test]
    fn schedule_rejects_bad_times() {
        assert_eq!(TestSchedule::new(vec![]), Err(Error::EmptySchedule));
        assert!(matches!(
            TestSchedule::new(vec![0.0, 1.0]),
            Err(Error::InvalidTestTime { index: 1, .. })
        ));
        // coincident instants are rejected, not merged
        assert!(matches!(
            TestSchedule::new(vec![1.0, 1.0, 2.0]),
            Err(Error::NonIncreasingSchedule { index: 2, .. })
        ));
        assert!(matches!(
            TestSchedule::new(vec![2.0, 1.0]),
            Err(Error::NonIncreasingSchedule { index: 2, .. })
        ));
        assert!(matches!(
            TestSchedule::new(vec![1.0, f64::NAN]),
            Err(Error::InvalidTestTime { index: 2, .. })
        ));
    }

    #[test]
    fn efficiency_bounds() {
        let s = periodic_schedule(2, 10.0).unwrap();
        assert!(TestPolicy::new(s.clone(), 0.0).is_ok());
        assert!(TestPolicy::new(s.clone(), 1.0).is_ok());
        assert_eq!(
            TestPolicy::new(s.clone(), 1.5),
            Err(Error::InvalidEfficiency(1.5))
        );
        assert!(TestPolicy::new(s, f64::NAN).is_err());
    }

    #[test]
    fn time_conversion() {
        assert_eq!(convert_time(12.0, TimeUnit::Month, TimeUnit::Hour), 8760.0);
        assert_eq!(convert_time(1.0, TimeUnit::Year, TimeUnit::Month), 12.0);
        assert_eq!(convert_time(4.8, TimeUnit::Month, TimeUnit::Hour), 3504.0);
        assert_eq!(12.0 * TimeUnit::Month.hours(), TimeUnit::Year.hours());
    }

    #[test]
    fn locate_follows_right_continuity() {
        let s = TestSchedule::new(vec![1000.0, 2000.0]).unwrap();
        assert_eq!(
            s.locate(Instant::at(0.0)).unwrap(),
            Position::Within { index: 1 }
        );
        assert_eq!(
            s.locate(Instant::at(999.0)).unwrap(),
            Position::Within { index: 1 }
        );
        assert_eq!(
            s.locate(Instant::at(1000.0)).unwrap(),
            Position::Within { index: 2 }
        );
        assert_eq!(
            s.locate(Instant::before(1000.0)).unwrap(),
            Position::Within { index: 1 }
        );
        assert_eq!(
            s.locate(Instant::before(2000.0)).unwrap(),
            Position::Within { index: 2 }
        );
        assert_eq!(s.locate(Instant::at(2000.0)).unwrap(), Position::Renewed);
        assert!(matches!(
            s.locate(Instant::at(2000.5)),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(s.locate(Instant::at(-1.0)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn intervals_sum_to_tau(gaps in prop::collection::vec(1e-3f64..1e4, 1..12)) {
                let s = TestSchedule::from_intervals(&gaps).unwrap();
                let sum: f64 = s.intervals().iter().sum();
                let tau = s.full_interval();
                prop_assert!((sum - tau).abs() <= 1e-12 * tau * s.len() as f64);
                prop_assert!(s.intervals().iter().all(|&g| g > 0.0));
            }

            #[test]
            fn periodic_intervals_are_equal(n in 1usize..40, tau in 1e-2f64..1e6) {
                let s = periodic_schedule(n, tau).unwrap();
                let t0 = tau / n as f64;
                prop_assert_eq!(s.full_interval(), tau);
                for g in s.intervals() {
                    prop_assert!((g - t0).abs() <= 1e-12 * tau);
                }
            }

            #[test]
            fn conversion_round_trips(v in -1e9f64..1e9, a in 0usize..3, b in 0usize..3) {
                let units = [TimeUnit::Hour, TimeUnit::Month, TimeUnit::Year];
                let back = convert_time(convert_time(v, units[a], units[b]), units[b], units[a]);
                prop_assert!((back - v).abs() <= 2.0 * f64::EPSILON * v.abs());
            }

            #[test]
            fn validation_matches_invariants(m in 0u32..40, n in 0u32..40, lambda in -1.0f64..1.0) {
                let ok = m >= 1 && m <= n && n <= MAX_COMPONENTS && lambda >= 0.0;
                prop_assert_eq!(validate_system(m, n, lambda).is_ok(), ok);
            }
        }
    }
}
