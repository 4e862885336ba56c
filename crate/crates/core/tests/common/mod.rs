//! Test-only oracles, independent of the expanded `S(M, N, x)` sums used by
//! the library: the binomial availability form over component states, and
//! Gauss-Legendre quadrature of its unavailability. Also random scenario
//! generators shared by the property tests.

#![allow(dead_code)]

use pfd_core::model::{periodic_schedule, SystemSpec, TestPolicy, TestSchedule};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const HOURS_PER_MONTH: f64 = 730.0;
pub const CASE_TAU: f64 = 8760.0;
pub const CASE_LAMBDA: f64 = 6.1e-5;
pub const CASE_E: f64 = 0.42;

pub fn case_system() -> SystemSpec {
    SystemSpec::new(2, 6, CASE_LAMBDA).unwrap()
}

pub fn case_basic_policy() -> TestPolicy {
    TestPolicy::new(periodic_schedule(4, CASE_TAU).unwrap(), CASE_E).unwrap()
}

pub fn months(values: &[f64]) -> TestSchedule {
    TestSchedule::new(values.iter().map(|m| m * HOURS_PER_MONTH).collect()).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// `C(n, k)` as a float via the multiplicative formula.
pub fn choose(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Probability that at least `m` of `n` independent components are up, each
/// with availability `a` (and unavailability `q = 1 - a`, passed separately
/// to keep precision when `a` is close to 1).
pub fn binomial_availability(m: u32, n: u32, a: f64, q: f64) -> f64 {
    (m..=n)
        .map(|k| choose(n, k) * a.powi(k as i32) * q.powi((n - k) as i32))
        .sum()
}

/// Probability that fewer than `m` of `n` components are up. All terms are
/// positive.
pub fn binomial_unavailability(m: u32, n: u32, a: f64, q: f64) -> f64 {
    (0..m)
        .map(|k| choose(n, k) * a.powi(k as i32) * q.powi((n - k) as i32))
        .sum()
}

/// Component availability and unavailability at `t` inside the interval
/// starting at `prev`: the revealed part has age `t - prev`, the hidden part
/// age `t`.
pub fn component_state(lambda: f64, e: f64, prev: f64, t: f64) -> (f64, f64) {
    let log_a = -e * lambda * (t - prev) - (1.0 - e) * lambda * t;
    (log_a.exp(), -log_a.exp_m1())
}

pub fn oracle_availability(system: &SystemSpec, policy: &TestPolicy, prev: f64, t: f64) -> f64 {
    let (a, q) = component_state(system.lambda(), policy.efficiency(), prev, t);
    binomial_availability(system.m(), system.n_components(), a, q)
}

pub fn oracle_unavailability(system: &SystemSpec, policy: &TestPolicy, prev: f64, t: f64) -> f64 {
    let (a, q) = component_state(system.lambda(), policy.efficiency(), prev, t);
    binomial_unavailability(system.m(), system.n_components(), a, q)
}

const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_22,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_753,
    0.269_266_719_309_996_5,
    0.219_086_362_515_982,
    0.149_451_349_150_580_36,
    0.066_671_344_308_688_07,
];

/// Composite 10-point Gauss-Legendre quadrature.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + h / 2.0;
        let half = h / 2.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            total += w * half * (f(mid - half * x) + f(mid + half * x));
        }
    }
    total
}

/// Mean of the binomial-form unavailability over interval `i` (1-based).
pub fn oracle_pfd_interval(system: &SystemSpec, policy: &TestPolicy, i: usize) -> f64 {
    let s = policy.schedule();
    let (prev, end) = (s.start(i), s.end(i));
    integrate(
        |t| oracle_unavailability(system, policy, prev, t),
        prev,
        end,
        32,
    ) / (end - prev)
}

pub fn oracle_pfd_avg(system: &SystemSpec, policy: &TestPolicy) -> f64 {
    let s = policy.schedule();
    (1..=s.len())
        .map(|i| s.interval(i) * oracle_pfd_interval(system, policy, i))
        .sum::<f64>()
        / s.full_interval()
}

/// Exact binomial tail sums, by direct summation of the pmf.
pub fn binomial_cdf(x: u64, n: u64, p: f64) -> f64 {
    (0..=x).map(|k| binomial_pmf(k, n, p)).sum()
}

pub fn binomial_sf(x: u64, n: u64, p: f64) -> f64 {
    (x..=n).map(|k| binomial_pmf(k, n, p)).sum()
}

fn binomial_pmf(k: u64, n: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_choose: f64 = (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum();
    (ln_choose + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
}

/// Bisection on a monotone function of `p` in `[0, 1]`.
pub fn bisect(f: impl Fn(f64) -> f64, target: f64, increasing: bool) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let above = f(mid) > target;
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Clopper-Pearson bounds on a binomial proportion from the tail sums.
pub fn clopper_pearson_oracle(x: u64, n: u64, level: f64) -> (f64, f64) {
    let alpha = 1.0 - level;
    let lower = if x == 0 {
        0.0
    } else {
        // P(X >= x; p) = α/2, increasing in p
        bisect(|p| binomial_sf(x, n, p), alpha / 2.0, true)
    };
    let upper = if x == n {
        1.0
    } else {
        // P(X <= x; p) = α/2, decreasing in p
        bisect(|p| binomial_cdf(x, n, p), alpha / 2.0, false)
    };
    (lower, upper)
}

/// Architecture, rate, efficiency and an arbitrary schedule with
/// `1e-6 <= λτ <= 1`, log-uniform.
pub fn scenario(max_n: u32, max_tests: usize) -> impl Strategy<Value = (SystemSpec, TestPolicy)> {
    (1..=max_n)
        .prop_flat_map(move |n| (1..=n, Just(n)))
        .prop_flat_map(move |(m, n)| {
            (
                Just(m),
                Just(n),
                -6.0f64..=0.0,
                0.0f64..=1.0,
                prop::collection::vec(0.05f64..1.0, 1..=max_tests),
            )
        })
        .prop_map(|(m, n, log_lambda_tau, e, weights)| {
            let tau = 1000.0;
            let lambda_tau = 10f64.powf(log_lambda_tau);
            let total: f64 = weights.iter().sum();
            let gaps: Vec<f64> = weights.iter().map(|w| w / total * tau).collect();
            let mut schedule = TestSchedule::from_intervals(&gaps)
                .unwrap()
                .times()
                .to_vec();
            *schedule.last_mut().unwrap() = tau;
            let system = SystemSpec::new(m, n, lambda_tau / tau).unwrap();
            let policy = TestPolicy::new(TestSchedule::new(schedule).unwrap(), e).unwrap();
            (system, policy)
        })
}

/// Randomized oracle-agreement scenario: `M <= N <= 6`, `λτ` uniform on
/// `[0.01, 1]`, `E` in `{0, 0.42, 1}`, `n` in `{1, 3, 5}`.
pub fn random_scenario(rng: &mut ChaCha8Rng) -> (SystemSpec, TestPolicy) {
    let n_components = rng.random_range(1..=6);
    let m = rng.random_range(1..=n_components);
    let tau = 1000.0;
    let lambda_tau = rng.random_range(0.01..=1.0);
    let e = [0.0, 0.42, 1.0][rng.random_range(0..3)];
    let n = [1, 3, 5][rng.random_range(0..3)];
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let gaps: Vec<f64> = weights.iter().map(|w| w / total * tau).collect();
    let mut times = TestSchedule::from_intervals(&gaps)
        .unwrap()
        .times()
        .to_vec();
    *times.last_mut().unwrap() = tau;
    (
        SystemSpec::new(m, n_components, lambda_tau / tau).unwrap(),
        TestPolicy::new(TestSchedule::new(times).unwrap(), e).unwrap(),
    )
}
