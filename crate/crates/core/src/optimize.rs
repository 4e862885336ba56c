//! Placement of the `n - 1` partial tests inside `[0, tau]` that minimises the
//! exact average PFD, with the number of tests and the full test fixed.
//!
//! The search is deterministic: a multi-start coordinate descent where each
//! coordinate move is a golden-section line search on one test instant
//! between its two neighbours. Moving `t_i` transfers length between the
//! adjacent gaps `T_i` and `T_{i+1}`, so every iterate stays on the simplex
//! `Σ T_i = tau` with all gaps at least `min_gap_fraction * tau`.

use rayon::prelude::*;

use crate::analytic::{coefficients, max_unavailability, pfd_average_exact, EvaluationMode};
use crate::combinatorics::SCoefficients;
use crate::model::{periodic_schedule, SystemSpec, TestPolicy, TestSchedule};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Objective evaluations allowed per start.
    pub max_evaluations_per_start: usize,
    /// Stop a start once a full sweep improves by less than this (relative).
    pub relative_tolerance: f64,
    /// Line-search bracket width, as a fraction of `tau`.
    pub line_tolerance: f64,
    /// Relative size of the lattice perturbations applied to the periodic gaps.
    pub perturbation: f64,
    /// Smallest gap in the returned schedule, as a fraction of `tau`.
    pub min_gap_fraction: f64,
    /// Objectives within this relative distance of the best count as ties.
    pub tie_tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evaluations_per_start: 10_000,
            relative_tolerance: 1e-12,
            line_tolerance: 1e-10,
            perturbation: 0.25,
            min_gap_fraction: 1e-6,
            tie_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OptimizerDiagnostics {
    /// The objective does not depend on the schedule (`E = 0` or `λ = 0`).
    pub flat_objective: bool,
    pub starts: usize,
    pub evaluations: usize,
    /// Coordinate sweeps, summed over starts.
    pub sweeps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedPolicy {
    pub schedule: TestSchedule,
    pub pfd_avg_star: f64,
    pub reference_pfd_avg: f64,
    /// `1 - pfd_avg_star / reference_pfd_avg` (0 when the reference is 0).
    pub improvement_fraction: f64,
    pub u_max_star: f64,
    pub u_max_reference: f64,
    pub diagnostics: OptimizerDiagnostics,
}

impl OptimizedPolicy {
    /// Relative reduction of the maximum unavailability.
    pub fn u_max_reduction(&self) -> f64 {
        if self.u_max_reference > 0.0 {
            1.0 - self.u_max_star / self.u_max_reference
        } else {
            0.0
        }
    }
}

/// The objective: exact average PFD of `schedule` with efficiency `E`.
pub fn evaluate_candidate(system: &SystemSpec, efficiency: f64, schedule: &TestSchedule) -> f64 {
    if system.lambda() == 0.0 {
        return 0.0;
    }
    pfd_average_exact(
        &coefficients(system),
        system.lambda(),
        efficiency,
        schedule.times(),
    )
}

pub fn optimize_schedule(
    system: &SystemSpec,
    efficiency: f64,
    n: usize,
    tau: f64,
    reference: &TestSchedule,
) -> Result<OptimizedPolicy> {
    optimize_schedule_with(
        system,
        efficiency,
        n,
        tau,
        reference,
        &OptimizerConfig::default(),
    )
}

pub fn optimize_schedule_with(
    system: &SystemSpec,
    efficiency: f64,
    n: usize,
    tau: f64,
    reference: &TestSchedule,
    config: &OptimizerConfig,
) -> Result<OptimizedPolicy> {
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(Error::InvalidEfficiency(efficiency));
    }
    let periodic = periodic_schedule(n, tau)?;
    if reference.len() != n {
        return Err(Error::IncompatibleReference(format!(
            "reference has {} tests, expected {n}",
            reference.len()
        )));
    }
    if reference.full_interval() != tau {
        return Err(Error::IncompatibleReference(format!(
            "reference full test at {} h, expected {tau} h",
            reference.full_interval()
        )));
    }

    let reference_pfd_avg = evaluate_candidate(system, efficiency, reference);
    let flat = efficiency == 0.0 || system.lambda() == 0.0;

    let (schedule, pfd_avg_star, diagnostics) = if flat || n == 1 {
        let diagnostics = OptimizerDiagnostics {
            flat_objective: flat,
            starts: 0,
            evaluations: 1,
            sweeps: 0,
        };
        (reference.clone(), reference_pfd_avg, diagnostics)
    } else {
        search(system, efficiency, &periodic, reference, config)
    };

    let policy = |s: &TestSchedule| TestPolicy::new(s.clone(), efficiency).expect("validated");
    let (u_max_star, _) = max_unavailability(system, &policy(&schedule), EvaluationMode::Exact);
    let (u_max_reference, _) =
        max_unavailability(system, &policy(reference), EvaluationMode::Exact);
    let improvement_fraction = if reference_pfd_avg > 0.0 {
        1.0 - pfd_avg_star / reference_pfd_avg
    } else {
        0.0
    };
    Ok(OptimizedPolicy {
        schedule,
        pfd_avg_star,
        reference_pfd_avg,
        improvement_fraction,
        u_max_star,
        u_max_reference,
        diagnostics,
    })
}

struct Objective<'a> {
    s: &'a SCoefficients,
    lambda: f64,
    efficiency: f64,
}

impl Objective<'_> {
    fn eval(&self, times: &[f64]) -> f64 {
        pfd_average_exact(self.s, self.lambda, self.efficiency, times)
    }
}

struct Candidate {
    times: Vec<f64>,
    value: f64,
    evaluations: usize,
    sweeps: usize,
}

fn search(
    system: &SystemSpec,
    efficiency: f64,
    periodic: &TestSchedule,
    reference: &TestSchedule,
    config: &OptimizerConfig,
) -> (TestSchedule, f64, OptimizerDiagnostics) {
    let s = coefficients(system);
    let objective = Objective {
        s: &s,
        lambda: system.lambda(),
        efficiency,
    };
    let starts = starting_points(periodic, reference, config);
    // collect() keeps start order whatever the thread count
    let results: Vec<Candidate> = starts
        .par_iter()
        .map(|start| refine(&objective, start, config))
        .collect();

    let best_value = results
        .iter()
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    let periodic_gaps = periodic.intervals();
    let distance = |times: &[f64]| {
        gaps(times)
            .iter()
            .zip(&periodic_gaps)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
    };
    let threshold = best_value + config.tie_tolerance * best_value.abs();
    let mut winner: Option<(&Candidate, f64)> = None;
    for candidate in results.iter().filter(|c| c.value <= threshold) {
        let d = distance(&candidate.times);
        // strict comparison: earlier starts win exact ties
        if winner.is_none_or(|(_, best)| d < best) {
            winner = Some((candidate, d));
        }
    }
    let (best, _) = winner.expect("at least one start");
    let diagnostics = OptimizerDiagnostics {
        flat_objective: false,
        starts: results.len(),
        evaluations: results.iter().map(|c| c.evaluations).sum(),
        sweeps: results.iter().map(|c| c.sweeps).sum(),
    };
    let schedule = TestSchedule::new(best.times.clone()).expect("gaps kept positive");
    (schedule, best.value, diagnostics)
}

fn gaps(times: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    times
        .iter()
        .map(|&t| {
            let g = t - prev;
            prev = t;
            g
        })
        .collect()
}

/// Periodic schedule, then the `2^{n-1}` lattice of perturbed periodic gaps
/// (each free gap scaled by `1 ± perturbation`, renormalised to `tau`), then
/// the reference.
fn starting_points(
    periodic: &TestSchedule,
    reference: &TestSchedule,
    config: &OptimizerConfig,
) -> Vec<Vec<f64>> {
    let n = periodic.len();
    let tau = periodic.full_interval();
    let free = n - 1;
    let mut starts = vec![periodic.times().to_vec()];
    for mask in 0u64..(1u64 << free) {
        let mut g: Vec<f64> = (0..n)
            .map(|i| {
                if i == free {
                    1.0
                } else if mask & (1 << i) != 0 {
                    1.0 + config.perturbation
                } else {
                    1.0 - config.perturbation
                }
            })
            .collect();
        let total: f64 = g.iter().sum();
        g.iter_mut().for_each(|x| *x *= tau / total);
        let mut acc = 0.0;
        let mut times: Vec<f64> = g
            .iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect();
        times[free] = tau;
        starts.push(times);
    }
    starts.push(reference.times().to_vec());
    starts
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimum of `f` on `[lo, hi]`; returns the best point probed.
fn golden_section(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tolerance: f64,
    evaluations: &mut usize,
) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    *evaluations += 2;
    while hi - lo > tolerance {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        *evaluations += 1;
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn refine(objective: &Objective<'_>, start: &[f64], config: &OptimizerConfig) -> Candidate {
    let n = start.len();
    let tau = start[n - 1];
    let min_gap = config.min_gap_fraction * tau;
    let mut times = start.to_vec();
    let mut value = objective.eval(&times);
    let mut evaluations = 1;
    let mut sweeps = 0;
    let mut trial = times.clone();

    while evaluations < config.max_evaluations_per_start {
        let sweep_start = value;
        for j in 0..n - 1 {
            let lo = if j == 0 { 0.0 } else { times[j - 1] } + min_gap;
            let hi = times[j + 1] - min_gap;
            if hi <= lo {
                continue;
            }
            trial.copy_from_slice(&times);
            let (x, fx) = golden_section(
                |x| {
                    trial[j] = x;
                    objective.eval(&trial)
                },
                lo,
                hi,
                config.line_tolerance * tau,
                &mut evaluations,
            );
            if fx < value {
                times[j] = x;
                value = fx;
            }
        }
        sweeps += 1;
        if sweep_start - value <= config.relative_tolerance * sweep_start.abs() {
            break;
        }
    }
    Candidate {
        times,
        value,
        evaluations,
        sweeps,
    }
}
