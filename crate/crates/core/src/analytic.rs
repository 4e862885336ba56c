//! Closed-form availability and PFD of an M-out-of-N system under a partial
//! and full proof-test policy.
//!
//! With `t` in `[t_{i-1}, t_i)` a component is available with probability
//!
//! ```text
//! A_e(t) = exp(E λ t_{i-1}) * exp(-λ t)
//! ```
//!
//! and the system availability is `A(t) = Σ_x S(M, N, x) A_e(t)^x`. Averaging
//! over each interval gives
//!
//! ```text
//! PFD_i   = 1 - Σ_x S(M,N,x) exp(-x(1-E)λ t_{i-1}) (1 - exp(-xλT_i)) / (xλT_i)
//! PFD_avg = (1/τ) Σ_i T_i PFD_i
//! ```
//!
//! Exact mode evaluates these expansions. Because `Σ_x S(M, N, x) = 1`, every
//! `1 - Σ_x S f_x` is computed as `Σ_x S (1 - f_x)` with each `1 - f_x`
//! formed without cancellation, and the outer alternating sum is compensated.
//! The alternating sum still cancels badly when `λτ` is small and `N - M` is
//! large. When its condition number exceeds [`CONDITION_LIMIT`], exact mode
//! switches to the equivalent binomial form
//! `U = Σ_{j >= N-M+1} C(N, j) q^j (1-q)^{N-j}`, whose terms are all positive,
//! integrated in `q = 1 - A_e` by Gauss-Legendre quadrature.
//! Approximate mode uses the first-order Taylor forms, valid for `λτ ≪ 1e-2`,
//! clamped to `[0, 1]`.

use crate::combinatorics::{binomial, s_coefficients, SCoefficients};
use crate::model::{periodic_schedule, Instant, Position, SystemSpec, TestPolicy};
use crate::numeric::{compensated_sum, gauss_legendre_16, mean_exp_decay};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvaluationMode {
    #[default]
    Exact,
    Approximate,
}

impl From<f64> for Instant {
    fn from(time: f64) -> Self {
        Instant::at(time)
    }
}

/// Average PFD of one inter-test interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalPfd {
    /// 1-based test index `i`.
    pub index: usize,
    pub start: f64,
    pub end: f64,
    pub pfd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfdReport {
    pub pfd_avg: f64,
    pub per_interval: Vec<IntervalPfd>,
    pub max_unavailability: f64,
    /// Test instant `t_i` whose left limit attains the maximum.
    pub max_unavailability_time: f64,
    pub mode: EvaluationMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub availability: f64,
    pub unavailability: f64,
}

fn clamp_unit(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// `1 - (1 - e^{-u}) / u`, accurate for small `u`.
fn one_minus_mean_decay(u: f64) -> f64 {
    if u < 0.5 {
        // Σ_{k>=1} (-1)^{k+1} u^k / (k+1)!
        let mut term = u / 2.0;
        let mut acc = 0.0f64;
        let mut k = 1.0;
        while term.abs() > 1e-18 * acc.abs() || acc == 0.0 {
            acc += term;
            k += 1.0;
            term *= -u / (k + 1.0);
            if term == 0.0 {
                break;
            }
        }
        acc
    } else {
        1.0 - mean_exp_decay(u)
    }
}

/// `1 - e^{-a} (1 - e^{-b}) / b` for `a, b >= 0`, as a sum of two nonnegative
/// terms.
fn one_minus_shifted_mean(a: f64, b: f64) -> f64 {
    one_minus_mean_decay(b) + mean_exp_decay(b) * -(-a).exp_m1()
}

fn approx_prefactor(system: &SystemSpec) -> (f64, i32) {
    let n = u64::from(system.n_components());
    let m = u64::from(system.m());
    let order = (n - m + 1) as i32;
    let c = binomial(n, m - 1).expect("architecture validated") as f64;
    (c, order)
}

pub(crate) fn coefficients(system: &SystemSpec) -> SCoefficients {
    s_coefficients(system.m(), system.n_components()).expect("architecture validated")
}

/// Largest condition number accepted from the expanded `S(M, N, x)` sums
/// before exact mode switches to the positive binomial form.
pub const CONDITION_LIMIT: f64 = 1e3;

/// Value of an expanded `S(M, N, x)` sum together with `Σ |terms|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandedSum {
    pub value: f64,
    pub magnitude: f64,
}

impl ExpandedSum {
    fn from_terms(terms: impl IntoIterator<Item = f64>) -> Self {
        let terms: Vec<f64> = terms.into_iter().collect();
        ExpandedSum {
            value: compensated_sum(terms.iter().copied()),
            magnitude: compensated_sum(terms.iter().map(|t| t.abs())),
        }
    }

    /// `Σ |terms| / |Σ terms|`; the relative rounding error is roughly this
    /// times machine epsilon.
    pub fn condition_number(&self) -> f64 {
        if self.magnitude == 0.0 {
            1.0
        } else {
            self.magnitude / self.value.abs()
        }
    }

    fn well_conditioned(&self) -> bool {
        self.magnitude <= CONDITION_LIMIT * self.value.abs()
    }
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    binomial(u64::from(n), u64::from(k)).expect("n <= 30") as f64
}

/// `P(more than N - M components down)` with each down with probability `q`.
fn binomial_tail(m: u32, n: u32, q: f64) -> f64 {
    let a = 1.0 - q;
    compensated_sum(
        (n - m + 1..=n).map(|j| binomial_f64(n, j) * q.powi(j as i32) * a.powi((n - j) as i32)),
    )
}

/// Largest `q` at the end of an interval handled by the quadrature.
const QUADRATURE_Q_LIMIT: f64 = 0.9;

/// `∫ U(t) dt` over `[start, end)` from the binomial form.
///
/// With `q = 1 - exp(-λ(t - E start))`, `dt = dq / (λ (1 - q))` and
/// `U / (1 - q)` is a polynomial of degree `N - 1` plus `q^N / (1 - q)`.
/// Panels are kept short next to the pole at `q = 1`. Returns `None` when
/// `q` gets close to 1; the expanded form is well conditioned there anyway.
fn tail_integral(m: u32, n: u32, lambda: f64, e: f64, start: f64, end: f64) -> Option<f64> {
    let q_start = -(-lambda * (1.0 - e) * start).exp_m1();
    let q_end = -(-lambda * (end - e * start)).exp_m1();
    if q_end > QUADRATURE_Q_LIMIT {
        return None;
    }
    let integrand = |q: f64| {
        let a = 1.0 - q;
        let poly = (n - m + 1..n)
            .map(|j| binomial_f64(n, j) * q.powi(j as i32) * a.powi((n - j - 1) as i32));
        compensated_sum(poly.chain(std::iter::once(q.powi(n as i32) / a)))
    };
    let width = q_end - q_start;
    let panels = (width / (1.0 - q_end)).ceil().max(1.0) as usize;
    let h = width / panels as f64;
    let total = compensated_sum((0..panels).map(|k| {
        let lo = q_start + k as f64 * h;
        let hi = if k + 1 == panels { q_end } else { lo + h };
        gauss_legendre_16(integrand, lo, hi)
    }));
    Some(total / lambda)
}

/// Availability of a single component.
pub fn component_availability(
    at: impl Into<Instant>,
    policy: &TestPolicy,
    lambda: f64,
    mode: EvaluationMode,
) -> Result<f64> {
    let at = at.into();
    let schedule = policy.schedule();
    let index = match schedule.locate(at)? {
        Position::Renewed => return Ok(1.0),
        Position::Within { index } => index,
    };
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let prev = schedule.start(index);
    let e = policy.efficiency();
    Ok(match mode {
        EvaluationMode::Exact => (e * lambda * prev - lambda * at.time).exp(),
        EvaluationMode::Approximate => clamp_unit(1.0 + e * lambda * prev - lambda * at.time),
    })
}

/// Unavailability `U(t) = 1 - A(t)` of the system.
pub fn system_unavailability(
    at: impl Into<Instant>,
    system: &SystemSpec,
    policy: &TestPolicy,
    mode: EvaluationMode,
) -> Result<f64> {
    let at = at.into();
    let schedule = policy.schedule();
    let index = match schedule.locate(at)? {
        Position::Renewed => return Ok(0.0),
        Position::Within { index } => index,
    };
    let lambda = system.lambda();
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let prev = schedule.start(index);
    let e = policy.efficiency();
    Ok(match mode {
        EvaluationMode::Exact => {
            // ln A_e(t) <= 0
            let log_component = e * lambda * prev - lambda * at.time;
            let s = coefficients(system);
            let sum = ExpandedSum::from_terms(
                s.iter()
                    .map(|(x, sx)| sx as f64 * -(f64::from(x) * log_component).exp_m1()),
            );
            clamp_unit(if sum.well_conditioned() {
                sum.value
            } else {
                binomial_tail(system.m(), system.n_components(), -log_component.exp_m1())
            })
        }
        EvaluationMode::Approximate => {
            let (c, order) = approx_prefactor(system);
            clamp_unit(c * (lambda * (at.time - e * prev)).powi(order))
        }
    })
}

/// System availability `A(t)`.
pub fn system_availability(
    at: impl Into<Instant>,
    system: &SystemSpec,
    policy: &TestPolicy,
    mode: EvaluationMode,
) -> Result<f64> {
    Ok(1.0 - system_unavailability(at, system, policy, mode)?)
}

fn pfd_interval_exact(s: &SCoefficients, lambda: f64, e: f64, start: f64, end: f64) -> f64 {
    let length = end - start;
    let sum = ExpandedSum::from_terms(s.iter().map(|(x, sx)| {
        let xl = f64::from(x) * lambda;
        sx as f64 * one_minus_shifted_mean(xl * (1.0 - e) * start, xl * length)
    }));
    if sum.well_conditioned() {
        return sum.value;
    }
    tail_integral(s.m(), s.n_components(), lambda, e, start, end)
        .map_or(sum.value, |integral| integral / length)
}

fn pfd_interval_approx(system: &SystemSpec, e: f64, start: f64, end: f64) -> f64 {
    let (c, order) = approx_prefactor(system);
    let lambda = system.lambda();
    let high = (end - e * start).powi(order + 1);
    let low = (start * (1.0 - e)).powi(order + 1);
    c * lambda.powi(order) / f64::from(order + 1) * (high - low) / (end - start)
}

/// Average PFD over interval `i` (1-based), `[t_{i-1}, t_i)`.
pub fn pfd_interval(
    index: usize,
    system: &SystemSpec,
    policy: &TestPolicy,
    mode: EvaluationMode,
) -> Result<f64> {
    let schedule = policy.schedule();
    schedule.check_index(index)?;
    let lambda = system.lambda();
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let (start, end) = (schedule.start(index), schedule.end(index));
    let e = policy.efficiency();
    Ok(clamp_unit(match mode {
        EvaluationMode::Exact => pfd_interval_exact(&coefficients(system), lambda, e, start, end),
        EvaluationMode::Approximate => pfd_interval_approx(system, e, start, end),
    }))
}

/// Average PFD over the full test interval, without the per-interval detail.
///
/// This is the objective minimised by [`crate::optimize`].
pub fn pfd_average_value(system: &SystemSpec, policy: &TestPolicy, mode: EvaluationMode) -> f64 {
    let lambda = system.lambda();
    if lambda == 0.0 {
        return 0.0;
    }
    let schedule = policy.schedule();
    let tau = schedule.full_interval();
    let e = policy.efficiency();
    match mode {
        EvaluationMode::Exact => {
            let s = coefficients(system);
            pfd_average_exact(&s, lambda, e, schedule.times())
        }
        EvaluationMode::Approximate => {
            let (c, order) = approx_prefactor(system);
            let sum = compensated_sum(schedule.segments().map(|(_, start, end)| {
                (end - e * start).powi(order + 1) - (start * (1.0 - e)).powi(order + 1)
            }));
            clamp_unit(c * lambda.powi(order) / f64::from(order + 1) * sum / tau)
        }
    }
}

/// The expanded exact average PFD, `Σ_x S(M, N, x) (1 - f_x)`, with no
/// fallback. Exact mode uses it whenever its condition number is at most
/// [`CONDITION_LIMIT`].
pub fn pfd_average_expanded(system: &SystemSpec, policy: &TestPolicy) -> ExpandedSum {
    let lambda = system.lambda();
    if lambda == 0.0 {
        return ExpandedSum::from_terms([0.0]);
    }
    expanded_average(
        &coefficients(system),
        lambda,
        policy.efficiency(),
        policy.schedule().times(),
    )
}

fn expanded_average(s: &SCoefficients, lambda: f64, e: f64, times: &[f64]) -> ExpandedSum {
    ExpandedSum::from_terms(
        s.iter()
            .map(|(x, sx)| sx as f64 * exact_average_term(f64::from(x) * lambda, e, times)),
    )
}

/// `1 - f_x`: the average over `[0, tau]` of `1 - A_e(t)^x`.
fn exact_average_term(xl: f64, e: f64, times: &[f64]) -> f64 {
    let tau = times[times.len() - 1];
    compensated_sum(times.iter().scan(0.0, |start, &end| {
        let length = end - *start;
        let term = length / tau * one_minus_shifted_mean(xl * (1.0 - e) * *start, xl * length);
        *start = end;
        Some(term)
    }))
}

/// Binomial-form average PFD, or `None` if some interval is out of reach of
/// the quadrature.
fn tail_average(m: u32, n: u32, lambda: f64, e: f64, times: &[f64]) -> Option<f64> {
    let tau = times[times.len() - 1];
    let mut start = 0.0;
    let mut total = crate::numeric::CompensatedSum::default();
    for &end in times {
        total.add(tail_integral(m, n, lambda, e, start, end)?);
        start = end;
    }
    Some(total.total() / tau)
}

/// Exact average PFD for strictly increasing `times` (last one is `tau`).
pub(crate) fn pfd_average_exact(s: &SCoefficients, lambda: f64, e: f64, times: &[f64]) -> f64 {
    let sum = expanded_average(s, lambda, e, times);
    let value = if sum.well_conditioned() {
        sum.value
    } else {
        tail_average(s.m(), s.n_components(), lambda, e, times).unwrap_or(sum.value)
    };
    clamp_unit(value)
}

/// Full report: average PFD, per-interval PFD and the maximum unavailability.
pub fn pfd_average(system: &SystemSpec, policy: &TestPolicy, mode: EvaluationMode) -> PfdReport {
    let schedule = policy.schedule();
    let per_interval = schedule
        .segments()
        .map(|(index, start, end)| IntervalPfd {
            index,
            start,
            end,
            pfd: pfd_interval(index, system, policy, mode).expect("index in range"),
        })
        .collect();
    let (max_unavailability, max_unavailability_time) = max_unavailability(system, policy, mode);
    PfdReport {
        pfd_avg: pfd_average_value(system, policy, mode),
        per_interval,
        max_unavailability,
        max_unavailability_time,
        mode,
    }
}

/// Average PFD with only the full test at `tau`.
pub fn pfd_average_no_partial(system: &SystemSpec, tau: f64, mode: EvaluationMode) -> Result<f64> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidInterval(tau));
    }
    let lambda = system.lambda();
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(match mode {
        EvaluationMode::Exact => {
            let s = coefficients(system);
            let sum = ExpandedSum::from_terms(
                s.iter()
                    .map(|(x, sx)| sx as f64 * one_minus_mean_decay(f64::from(x) * lambda * tau)),
            );
            clamp_unit(if sum.well_conditioned() {
                sum.value
            } else {
                tail_average(s.m(), s.n_components(), lambda, 0.0, &[tau]).unwrap_or(sum.value)
            })
        }
        EvaluationMode::Approximate => {
            let (c, order) = approx_prefactor(system);
            clamp_unit(c * (lambda * tau).powi(order) / f64::from(order + 1))
        }
    })
}

/// Average PFD with `n` equally spaced tests, the last being the full test.
pub fn pfd_average_periodic(
    system: &SystemSpec,
    efficiency: f64,
    n: usize,
    tau: f64,
    mode: EvaluationMode,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoTests);
    }
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidInterval(tau));
    }
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(Error::InvalidEfficiency(efficiency));
    }
    let lambda = system.lambda();
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let period = tau / n as f64;
    let nf = n as f64;
    Ok(match mode {
        EvaluationMode::Exact => {
            let s = coefficients(system);
            let sum = ExpandedSum::from_terms(s.iter().map(|(x, sx)| {
                let xl = f64::from(x) * lambda;
                let b = xl * period;
                let c = xl * (1.0 - efficiency) * period;
                // 1 - g(b) * mean_j e^{-jc} = h(b) + g(b) * mean_j (1 - e^{-jc})
                let decayed = compensated_sum((0..n).map(|j| -(-(j as f64) * c).exp_m1())) / nf;
                sx as f64 * (one_minus_mean_decay(b) + mean_exp_decay(b) * decayed)
            }));
            clamp_unit(if sum.well_conditioned() {
                sum.value
            } else {
                let times = periodic_schedule(n, tau)?;
                tail_average(s.m(), s.n_components(), lambda, efficiency, times.times())
                    .unwrap_or(sum.value)
            })
        }
        EvaluationMode::Approximate => {
            let (c, order) = approx_prefactor(system);
            let d = 1.0 - efficiency;
            let sum = compensated_sum((0..n).map(|j| {
                let j = j as f64;
                (1.0 + j * d).powi(order + 1) - (j * d).powi(order + 1)
            }));
            clamp_unit(c * (lambda * period).powi(order) / f64::from(order + 1) * sum / nf)
        }
    })
}

/// Samples `A(t)` and `U(t)` on a grid of spacing `step` over `[0, tau]`.
///
/// Every test instant appears twice: first the left limit, then the value
/// after the test. The final pair at `tau` shows the full-test renewal.
pub fn availability_curve(
    system: &SystemSpec,
    policy: &TestPolicy,
    step: f64,
    mode: EvaluationMode,
) -> Result<Vec<CurvePoint>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidStep(step));
    }
    let tests = policy.schedule().times();
    let tau = policy.full_interval();
    let mut instants = Vec::new();
    let mut next_test = 0;
    let mut k = 0u64;
    loop {
        let t = k as f64 * step;
        while next_test < tests.len() && tests[next_test] <= t.min(tau) {
            let ti = tests[next_test];
            instants.push(Instant::before(ti));
            instants.push(Instant::at(ti));
            next_test += 1;
        }
        if t >= tau {
            break;
        }
        if instants.last().is_none_or(|last| last.time < t) {
            instants.push(Instant::at(t));
        }
        k += 1;
    }
    instants
        .into_iter()
        .map(|at| {
            let availability = system_availability(at, system, policy, mode)?;
            Ok(CurvePoint {
                t: at.time,
                availability,
                unavailability: 1.0 - availability,
            })
        })
        .collect()
}

/// Maximum of `U(t)` over `[0, tau]` and the test instant whose left limit
/// attains it. `U` only grows between tests, so only the `n` left limits are
/// candidates; ties go to the earliest.
pub fn max_unavailability(
    system: &SystemSpec,
    policy: &TestPolicy,
    mode: EvaluationMode,
) -> (f64, f64) {
    let mut best = (0.0, policy.schedule().times()[0]);
    for &t in policy.schedule().times() {
        let u = system_unavailability(Instant::before(t), system, policy, mode)
            .expect("test instants lie in [0, tau]");
        if u > best.0 {
            best = (u, t);
        }
    }
    best
}

/// Convenience for the periodic policy `periodic_schedule(n, tau)`.
pub fn periodic_policy(n: usize, tau: f64, efficiency: f64) -> Result<TestPolicy> {
    TestPolicy::new(periodic_schedule(n, tau)?, efficiency)
}
