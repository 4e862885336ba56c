//! Monte Carlo oracle for the analytic results.
//!
//! Each component carries two independent exponential failure modes: one with
//! rate `E λ` that every test reveals and repairs, one with rate `(1 - E) λ`
//! that only the full test at `tau` reveals. The partial-mode clock restarts
//! after every test; the full-mode failure time is drawn once per trial. The
//! system is down while fewer than `M` components are up, and a trial's
//! statistic is its exact fraction of downtime over `[0, tau]`, obtained from
//! the event times.
//!
//! ## Reproducibility
//!
//! Trial `k` draws from ChaCha8 seeded with `master_seed` on stream `k`. Trials
//! are grouped into fixed batches whose partial results are merged in batch
//! order, so results are bit-identical for any number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::{SystemSpec, TestPolicy};
use crate::{Error, Result};

const BATCH: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub trials: u64,
    pub master_seed: u64,
    /// When set, the availability curve is also estimated on this grid (hours).
    pub time_grid_step: Option<f64>,
}

impl SimulationConfig {
    pub fn new(trials: u64, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            time_grid_step: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::NoTrials);
        }
        if let Some(step) = self.time_grid_step {
            if !step.is_finite() || step <= 0.0 {
                return Err(Error::InvalidStep(step));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub pfd_avg_estimate: f64,
    /// Sample standard deviation of the per-trial downtime fraction over
    /// `sqrt(trials)`; infinite when there is a single trial.
    pub standard_error: f64,
    pub trials: u64,
    /// `(t, fraction of trials up just before t)` on the configured grid.
    pub curve_estimate: Option<Vec<(f64, f64)>>,
}

impl SimulationResult {
    pub fn has_standard_error(&self) -> bool {
        self.standard_error.is_finite()
    }
}

/// Failure times of one trial, in hours from 0.
struct TrialSample {
    /// Full-test-only mode, one per component.
    hidden: Vec<f64>,
    /// Partial-test mode, `segments × components`, measured from 0.
    revealed: Vec<f64>,
    components: usize,
}

impl TrialSample {
    fn new(components: usize, segments: usize) -> Self {
        Self {
            hidden: vec![0.0; components],
            revealed: vec![0.0; components * segments],
            components,
        }
    }

    fn draw(&mut self, rng: &mut ChaCha8Rng, lambda: f64, efficiency: f64, tests: &[f64]) {
        let hidden_rate = (1.0 - efficiency) * lambda;
        let revealed_rate = efficiency * lambda;
        for h in self.hidden.iter_mut() {
            *h = exponential(rng, hidden_rate);
        }
        let mut start = 0.0;
        for (seg, &end) in tests.iter().enumerate() {
            let row = &mut self.revealed[seg * self.components..(seg + 1) * self.components];
            for r in row.iter_mut() {
                *r = start + exponential(rng, revealed_rate);
            }
            start = end;
        }
    }

    /// Instant at which component `j` is first down in segment `seg`
    /// starting at `start`, if before the segment ends.
    fn down_from(&self, seg: usize, j: usize, start: f64, end: f64) -> Option<f64> {
        let hidden = self.hidden[j];
        let first = if hidden < start {
            start
        } else {
            hidden.min(self.revealed[seg * self.components + j])
        };
        (first < end).then_some(first)
    }
}

fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let u: f64 = rng.random();
    -(-u).ln_1p() / rate
}

fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

struct Evaluator<'a> {
    tests: &'a [f64],
    failures_to_down: usize,
    lambda: f64,
    efficiency: f64,
}

impl Evaluator<'_> {
    fn new<'a>(system: &SystemSpec, policy: &'a TestPolicy) -> Evaluator<'a> {
        Evaluator {
            tests: policy.schedule().times(),
            failures_to_down: (system.n_components() - system.m() + 1) as usize,
            lambda: system.lambda(),
            efficiency: policy.efficiency(),
        }
    }

    fn tau(&self) -> f64 {
        self.tests[self.tests.len() - 1]
    }

    /// Exact downtime fraction of the system over `[0, tau]`.
    fn downtime_fraction(&self, sample: &TrialSample, scratch: &mut Vec<f64>) -> f64 {
        let r = self.failures_to_down;
        let mut downtime = 0.0;
        let mut start = 0.0;
        for (seg, &end) in self.tests.iter().enumerate() {
            scratch.clear();
            scratch.extend(
                (0..sample.components).filter_map(|j| sample.down_from(seg, j, start, end)),
            );
            if scratch.len() >= r {
                // failures only accumulate within a segment: the system goes
                // down at the r-th component failure and stays down
                let (_, &mut down_at, _) =
                    scratch.select_nth_unstable_by(r - 1, |a, b| a.total_cmp(b));
                downtime += end - down_at;
            }
            start = end;
        }
        (downtime / self.tau()).clamp(0.0, 1.0)
    }

    /// Whether the system is up just before `t` (left limit at test instants).
    fn up_before(&self, sample: &TrialSample, t: f64) -> bool {
        if t <= 0.0 {
            return true;
        }
        let seg = self.tests.partition_point(|&ti| ti < t);
        let start = if seg == 0 { 0.0 } else { self.tests[seg - 1] };
        let down = (0..sample.components)
            .filter(|&j| sample.down_from(seg, j, start, t).is_some())
            .count();
        down < self.failures_to_down
    }
}

/// Downtime fraction of a single trial; exposed for inspection and tests.
pub fn trial_downtime(
    system: &SystemSpec,
    policy: &TestPolicy,
    master_seed: u64,
    trial: u64,
) -> f64 {
    let eval = Evaluator::new(system, policy);
    let mut sample = TrialSample::new(system.n_components() as usize, eval.tests.len());
    let mut rng = trial_rng(master_seed, trial);
    sample.draw(&mut rng, eval.lambda, eval.efficiency, eval.tests);
    eval.downtime_fraction(&sample, &mut Vec::new())
}

/// Welford accumulator plus up-counts on the curve grid.
#[derive(Debug, Clone)]
struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
    up_counts: Vec<u64>,
}

impl Accumulator {
    fn new(grid_len: usize) -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            up_counts: vec![0; grid_len],
        }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / total as f64;
        self.count = total;
        for (a, b) in self.up_counts.iter_mut().zip(&other.up_counts) {
            *a += b;
        }
    }
}

fn batches(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(BATCH))
        .map(|b| (b * BATCH, ((b + 1) * BATCH).min(trials)))
        .collect()
}

fn grid(tau: f64, step: f64) -> Vec<f64> {
    let mut points = Vec::new();
    let mut k = 0u64;
    loop {
        let t = k as f64 * step;
        if t >= tau {
            break;
        }
        points.push(t);
        k += 1;
    }
    points.push(tau);
    points
}

/// Monte Carlo estimate of the average PFD, with its standard error.
pub fn simulate_pfd(
    system: &SystemSpec,
    policy: &TestPolicy,
    config: &SimulationConfig,
) -> Result<SimulationResult> {
    config.validate()?;
    let eval = Evaluator::new(system, policy);
    let grid_points = config
        .time_grid_step
        .map(|step| grid(eval.tau(), step))
        .unwrap_or_default();

    if system.lambda() == 0.0 {
        return Ok(SimulationResult {
            pfd_avg_estimate: 0.0,
            standard_error: 0.0,
            trials: config.trials,
            curve_estimate: config
                .time_grid_step
                .map(|_| grid_points.iter().map(|&t| (t, 1.0)).collect()),
        });
    }

    let components = system.n_components() as usize;
    let partials: Vec<Accumulator> = batches(config.trials)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = Accumulator::new(grid_points.len());
            let mut sample = TrialSample::new(components, eval.tests.len());
            let mut scratch = Vec::with_capacity(components);
            for trial in lo..hi {
                let mut rng = trial_rng(config.master_seed, trial);
                sample.draw(&mut rng, eval.lambda, eval.efficiency, eval.tests);
                acc.push(eval.downtime_fraction(&sample, &mut scratch));
                for (slot, &t) in acc.up_counts.iter_mut().zip(&grid_points) {
                    if eval.up_before(&sample, t) {
                        *slot += 1;
                    }
                }
            }
            acc
        })
        .collect();

    let mut total = Accumulator::new(grid_points.len());
    for p in &partials {
        total.merge(p);
    }
    let n = total.count as f64;
    let standard_error = if total.count < 2 {
        f64::INFINITY
    } else {
        (total.m2.max(0.0) / (n - 1.0)).sqrt() / n.sqrt()
    };
    let curve_estimate = config.time_grid_step.map(|_| {
        grid_points
            .iter()
            .zip(&total.up_counts)
            .map(|(&t, &up)| (t, up as f64 / n))
            .collect()
    });
    Ok(SimulationResult {
        pfd_avg_estimate: total.mean.clamp(0.0, 1.0),
        standard_error,
        trials: config.trials,
        curve_estimate,
    })
}

/// Fraction of trials in which the system is up just before `t`, with its
/// binomial standard error.
pub fn simulate_availability(
    system: &SystemSpec,
    policy: &TestPolicy,
    config: &SimulationConfig,
    t: f64,
) -> Result<(f64, f64)> {
    config.validate()?;
    let tau = policy.full_interval();
    if !(0.0..=tau).contains(&t) {
        return Err(Error::TimeOutOfRange { t, tau });
    }
    if system.lambda() == 0.0 || t == 0.0 {
        return Ok((1.0, 0.0));
    }
    let eval = Evaluator::new(system, policy);
    let components = system.n_components() as usize;
    let up: u64 = batches(config.trials)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut sample = TrialSample::new(components, eval.tests.len());
            (lo..hi)
                .filter(|&trial| {
                    let mut rng = trial_rng(config.master_seed, trial);
                    sample.draw(&mut rng, eval.lambda, eval.efficiency, eval.tests);
                    eval.up_before(&sample, t)
                })
                .count() as u64
        })
        .sum();
    let n = config.trials as f64;
    let p = up as f64 / n;
    Ok((p, (p * (1.0 - p) / n).sqrt()))
}
