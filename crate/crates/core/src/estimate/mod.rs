//! Failure rate and partial-test effectiveness from test feedback.
//!
//! At the `i`-th test a component is found failed with probability
//!
//! ```text
//! Obs_i ≈ E λ T_i                      i < n
//! Obs_n ≈ E λ T_n + (1 - E) λ τ
//! ```
//!
//! Replacing `Obs_i` by the observed fraction `k_i / K` and solving gives
//! `λ̂ = Σ k_i / (K τ)` and `Ê = (τ / t_{n-1}) Σ_{i<n} k_i / Σ k_i`.

mod beta;

use crate::model::TestSchedule;
use crate::{Error, Result};

/// Per-test failure counts `k_1..k_n` out of `K` observed components.
#[derive(Debug, Clone, PartialEq)]
pub struct TestObservations {
    schedule: TestSchedule,
    counts: Vec<u64>,
    observed: u64,
}

impl TestObservations {
    pub fn new(schedule: TestSchedule, counts: Vec<u64>, observed: u64) -> Result<Self> {
        if counts.len() != schedule.len() {
            return Err(Error::CountLengthMismatch {
                got: counts.len(),
                expected: schedule.len(),
            });
        }
        if observed == 0 {
            return Err(Error::NoObservedComponents);
        }
        if let Some((idx, &count)) = counts.iter().enumerate().find(|(_, &c)| c > observed) {
            return Err(Error::CountExceedsObserved {
                index: idx + 1,
                count,
                k: observed,
            });
        }
        Ok(Self {
            schedule,
            counts,
            observed,
        })
    }

    pub fn schedule(&self) -> &TestSchedule {
        &self.schedule
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `K`, the equivalent number of components observed at each test.
    pub fn observed(&self) -> u64 {
        self.observed
    }

    pub fn total_failures(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Failures found by partial tests, `Σ_{i<n} k_i`.
    pub fn partial_failures(&self) -> u64 {
        self.counts[..self.counts.len() - 1].iter().sum()
    }
}

/// Probability that one component is found failed at test `index` (1-based).
pub fn observe_probability(
    index: usize,
    lambda: f64,
    efficiency: f64,
    schedule: &TestSchedule,
) -> Result<f64> {
    schedule.check_index(index)?;
    let mut p = efficiency * lambda * schedule.interval(index);
    if index == schedule.len() {
        p += (1.0 - efficiency) * lambda * schedule.full_interval();
    }
    Ok(p.clamp(0.0, 1.0))
}

/// `λ̂ = Σ k_i / (K τ)`, per hour.
pub fn estimate_lambda(obs: &TestObservations) -> f64 {
    obs.total_failures() as f64 / (obs.observed as f64 * obs.schedule.full_interval())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyEstimate {
    /// `Ê` clamped to `[0, 1]`.
    pub value: f64,
    /// `Ê` before clamping; exceeds 1 when the partial counts are noisy-high.
    pub unclamped: f64,
}

/// `Ê = (τ / t_{n-1}) Σ_{i<n} k_i / Σ k_i`.
///
/// Returns `Ok(None)` when no failure was observed at all.
pub fn estimate_efficiency(obs: &TestObservations) -> Result<Option<EfficiencyEstimate>> {
    let n = obs.schedule.len();
    if n < 2 {
        return Err(Error::NoPartialTests(n));
    }
    let total = obs.total_failures();
    if total == 0 {
        return Ok(None);
    }
    let tau = obs.schedule.full_interval();
    let last_partial = obs.schedule.end(n - 1);
    let unclamped = tau / last_partial * (obs.partial_failures() as f64 / total as f64);
    Ok(Some(EfficiencyEstimate {
        value: unclamped.clamp(0.0, 1.0),
        unclamped,
    }))
}

/// Clopper-Pearson interval on the aggregate proportion `p = Σ k_i / K`,
/// rescaled to a rate by `1 / τ`.
///
/// The bounds are beta quantiles (equivalently F quantiles):
/// `p_lo = B⁻¹(α/2; x, K-x+1)` and `p_hi = B⁻¹(1-α/2; x+1, K-x)` with
/// `α = 1 - level`. Fails when `Σ k_i > K`, where the aggregate is no longer a
/// binomial proportion.
pub fn lambda_confidence_interval(obs: &TestObservations, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfidenceLevel(level));
    }
    let x = obs.total_failures();
    let k = obs.observed;
    if x > k {
        return Err(Error::CountExceedsObserved {
            index: 0,
            count: x,
            k,
        });
    }
    let alpha = 1.0 - level;
    let (xf, kf) = (x as f64, k as f64);
    let lower = if x == 0 {
        0.0
    } else {
        beta::inverse_regularized_incomplete_beta(xf, kf - xf + 1.0, alpha / 2.0)
    };
    let upper = if x == k {
        1.0
    } else {
        beta::inverse_regularized_incomplete_beta(xf + 1.0, kf - xf, 1.0 - alpha / 2.0)
    };
    let tau = obs.schedule.full_interval();
    Ok((lower / tau, upper / tau))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EfficiencyOutcome {
    Estimated(EfficiencyEstimate),
    /// No failures at all: `Ê` is 0/0.
    NoFailures,
    /// A single (full) test per interval: `E` cannot be identified.
    NoPartialTests,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub lambda_hat: f64,
    pub efficiency: EfficiencyOutcome,
    /// `None` when `Σ k_i > K`.
    pub lambda_ci: Option<(f64, f64)>,
    pub level: f64,
}

pub fn estimate(obs: &TestObservations, level: f64) -> Result<EstimationResult> {
    let lambda_ci = match lambda_confidence_interval(obs, level) {
        Ok(ci) => Some(ci),
        Err(Error::CountExceedsObserved { .. }) => None,
        Err(e) => return Err(e),
    };
    let efficiency = match estimate_efficiency(obs) {
        Ok(Some(e)) => EfficiencyOutcome::Estimated(e),
        Ok(None) => EfficiencyOutcome::NoFailures,
        Err(Error::NoPartialTests(_)) => EfficiencyOutcome::NoPartialTests,
        Err(e) => return Err(e),
    };
    Ok(EstimationResult {
        lambda_hat: estimate_lambda(obs),
        efficiency,
        lambda_ci,
        level,
    })
}
