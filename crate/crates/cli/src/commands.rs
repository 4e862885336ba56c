use std::fmt::Write;

use pfd_core::analytic::{availability_curve, pfd_average, pfd_average_no_partial, EvaluationMode};
use pfd_core::estimate::{estimate, EfficiencyOutcome};
use pfd_core::model::{SystemSpec, TestPolicy, TestSchedule};
use pfd_core::optimize::optimize_schedule;
use pfd_core::sil::SilBand;
use pfd_core::simulate::{simulate_pfd, SimulationConfig};

use crate::config::{ConfigDocument, Unit};
use crate::CliError;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_LEVEL: f64 = 0.90;
/// Default curve step as a fraction of the full test interval.
pub const DEFAULT_STEP_FRACTION: f64 = 0.01;

/// Three significant digits, e.g. `2.06e-3`.
fn sig3(x: f64) -> String {
    format!("{x:.2e}")
}

fn mode_name(mode: EvaluationMode) -> &'static str {
    match mode {
        EvaluationMode::Exact => "exact",
        EvaluationMode::Approximate => "approximate",
    }
}

fn in_unit(hours: f64, unit: Unit) -> f64 {
    hours / unit.hours()
}

fn echo_schedule(out: &mut String, doc: &ConfigDocument, schedule: &TestSchedule) {
    let unit = doc.time_unit();
    let times: Vec<String> = schedule
        .times()
        .iter()
        .map(|t| format!("{}", in_unit(*t, unit)))
        .collect();
    let form = if doc.policy.schedule.periodic.is_some() {
        "periodic"
    } else {
        "explicit"
    };
    let _ = writeln!(
        out,
        "  schedule       {} {} ({form}, {} tests, full test last)",
        times.join(", "),
        unit.name(),
        schedule.len()
    );
    let _ = writeln!(out, "  full test      {} h", schedule.full_interval());
}

fn echo_system(out: &mut String, doc: &ConfigDocument, system: &SystemSpec) {
    let s = doc.system.as_ref().expect("system validated");
    let _ = writeln!(
        out,
        "  architecture   {}oo{}",
        system.m(),
        system.n_components()
    );
    let _ = writeln!(
        out,
        "  lambda         {:e} /{} ({:e} /h)",
        s.lambda,
        s.lambda_unit.name(),
        system.lambda()
    );
}

fn echo_policy(out: &mut String, doc: &ConfigDocument, system: &SystemSpec, policy: &TestPolicy) {
    let _ = writeln!(out, "Inputs");
    echo_system(out, doc, system);
    let _ = writeln!(out, "  efficiency     {}", policy.efficiency());
    echo_schedule(out, doc, policy.schedule());
}

pub fn assess(doc: &ConfigDocument, mode: EvaluationMode) -> Result<String, CliError> {
    let system = doc.system()?;
    let policy = doc.policy()?;
    let unit = doc.time_unit();
    let mut out = String::new();
    echo_policy(&mut out, doc, &system, &policy);
    let _ = writeln!(out, "  mode           {}", mode_name(mode));

    let lambda_tau = system.lambda() * policy.full_interval();
    if mode == EvaluationMode::Approximate && lambda_tau > 1e-2 {
        let _ = writeln!(
            out,
            "warning: lambda*tau = {} exceeds 1e-2; the approximate formulas are unreliable here",
            sig3(lambda_tau)
        );
    }

    let report = pfd_average(&system, &policy, mode);
    let _ = writeln!(out, "\nResults");
    let _ = writeln!(out, "  PFD_avg = {}", sig3(report.pfd_avg));
    let _ = writeln!(
        out,
        "\n  {:>3}  {:>12}  {:>12}  {:>10}",
        "i",
        format!("start ({})", unit.name()),
        format!("end ({})", unit.name()),
        "PFD_i"
    );
    for row in &report.per_interval {
        let _ = writeln!(
            out,
            "  {:>3}  {:>12}  {:>12}  {:>10}",
            row.index,
            format!("{:.4}", in_unit(row.start, unit)),
            format!("{:.4}", in_unit(row.end, unit)),
            sig3(row.pfd)
        );
    }
    let _ = writeln!(
        out,
        "\n  U_max = {} (just before the test at {:.4} {})",
        sig3(report.max_unavailability),
        in_unit(report.max_unavailability_time, unit),
        unit.name()
    );
    let _ = writeln!(
        out,
        "  SIL band (informative, IEC 61508 low demand): {}",
        SilBand::from_pfd_avg(report.pfd_avg)
    );
    if policy.efficiency() == 0.0 {
        let none = pfd_average_no_partial(&system, policy.full_interval(), mode)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let _ = writeln!(
            out,
            "note: E = 0, partial tests are ineffective; PFD_avg equals the value without partial tests ({})",
            sig3(none)
        );
    }
    Ok(out)
}

pub fn curve(
    doc: &ConfigDocument,
    mode: EvaluationMode,
    step: Option<f64>,
) -> Result<String, CliError> {
    let system = doc.system()?;
    let policy = doc.policy()?;
    let step = step.unwrap_or(DEFAULT_STEP_FRACTION * policy.full_interval());
    let points = availability_curve(&system, &policy, step, mode)
        .map_err(|e| CliError::Input(format!("--step: {e}")))?;
    let mut out = String::from("t_hours,availability,unavailability\n");
    for p in points {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e}",
            p.t, p.availability, p.unavailability
        );
    }
    Ok(out)
}

pub fn estimate_report(doc: &ConfigDocument, level: f64) -> Result<String, CliError> {
    let obs = doc.observations()?;
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::Input(format!(
            "--level: confidence level must lie strictly between 0 and 1 (got {level})"
        )));
    }
    let result = estimate(&obs, level).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "Inputs");
    let _ = writeln!(out, "  K              {}", obs.observed());
    let counts: Vec<String> = obs.counts().iter().map(u64::to_string).collect();
    let _ = writeln!(out, "  counts         {}", counts.join(", "));
    echo_schedule(&mut out, doc, obs.schedule());
    let _ = writeln!(out, "  level          {level}");
    let _ = writeln!(out, "\nResults");
    let _ = writeln!(out, "  lambda_hat = {} /h", sig3(result.lambda_hat));
    match result.lambda_ci {
        Some((lo, hi)) => {
            let _ = writeln!(
                out,
                "  {}% confidence interval: [{}, {}] /h (Clopper-Pearson on total count / K)",
                level * 100.0,
                sig3(lo),
                sig3(hi)
            );
        }
        None => {
            let _ = writeln!(
                out,
                "  confidence interval undefined: total count {} exceeds K = {}",
                obs.total_failures(),
                obs.observed()
            );
        }
    }
    match result.efficiency {
        EfficiencyOutcome::Estimated(e) if e.value != e.unclamped => {
            let _ = writeln!(
                out,
                "  E_hat = {:.3} (clamped; raw estimate {:.3})",
                e.value, e.unclamped
            );
        }
        EfficiencyOutcome::Estimated(e) => {
            let _ = writeln!(out, "  E_hat = {:.3}", e.value);
        }
        EfficiencyOutcome::NoFailures => {
            let _ = writeln!(out, "  E_hat undefined: no failures observed");
        }
        EfficiencyOutcome::NoPartialTests => {
            let _ = writeln!(out, "  E_hat undefined: the schedule has no partial tests");
        }
    }
    Ok(out)
}

pub fn optimize_report(doc: &ConfigDocument) -> Result<String, CliError> {
    let system = doc.system()?;
    let policy = doc.policy()?;
    let reference = policy.schedule();
    let tau = reference.full_interval();
    let unit = doc.time_unit();
    let opt = optimize_schedule(
        &system,
        policy.efficiency(),
        reference.len(),
        tau,
        reference,
    )
    .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut out = String::new();
    echo_policy(&mut out, doc, &system, &policy);
    let _ = writeln!(out, "\n{:<22}{:>14}{:>14}", "", "reference", "optimized");
    for (i, (r, o)) in reference
        .times()
        .iter()
        .zip(opt.schedule.times())
        .enumerate()
    {
        let label = format!("t_{} ({})", i + 1, unit.name());
        let _ = writeln!(
            out,
            "{label:<22}{:>14.2}{:>14.2}",
            in_unit(*r, unit),
            in_unit(*o, unit)
        );
    }
    for (i, (r, o)) in reference
        .intervals()
        .iter()
        .zip(opt.schedule.intervals())
        .enumerate()
    {
        let label = format!("T_{} ({})", i + 1, unit.name());
        let _ = writeln!(
            out,
            "{label:<22}{:>14.2}{:>14.2}",
            in_unit(*r, unit),
            in_unit(o, unit)
        );
    }
    let _ = writeln!(
        out,
        "{:<22}{:>14}{:>14}",
        "PFD_avg",
        sig3(opt.reference_pfd_avg),
        sig3(opt.pfd_avg_star)
    );
    let _ = writeln!(
        out,
        "{:<22}{:>14}{:>14}",
        "U_max",
        sig3(opt.u_max_reference),
        sig3(opt.u_max_star)
    );
    let _ = writeln!(
        out,
        "\nimprovement = {:.1}%",
        100.0 * opt.improvement_fraction
    );
    let _ = writeln!(
        out,
        "U_max reduction = {:.1}%",
        100.0 * opt.u_max_reduction()
    );
    let precise: Vec<String> = opt
        .schedule
        .times()
        .iter()
        .map(|t| format!("{}", in_unit(*t, unit)))
        .collect();
    let _ = writeln!(
        out,
        "optimized times ({}): {}",
        unit.name(),
        precise.join(", ")
    );
    if opt.diagnostics.flat_objective {
        let _ = writeln!(
            out,
            "note: PFD_avg does not depend on the schedule here (E = 0 or lambda = 0); the reference is returned"
        );
    }
    Ok(out)
}

pub fn simulate_report(
    doc: &ConfigDocument,
    mode: EvaluationMode,
    trials: Option<u64>,
    seed: Option<u64>,
) -> Result<String, CliError> {
    let system = doc.system()?;
    let policy = doc.policy()?;
    let from_doc = doc.simulation.as_ref();
    let trials = trials
        .or(from_doc.and_then(|s| s.trials))
        .unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(CliError::Input("--trials: must be at least 1".into()));
    }
    let seed = seed
        .or(from_doc.and_then(|s| s.seed))
        .unwrap_or(DEFAULT_SEED);
    let result = simulate_pfd(&system, &policy, &SimulationConfig::new(trials, seed))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let analytic = pfd_average(&system, &policy, mode).pfd_avg;

    let mut out = String::new();
    echo_policy(&mut out, doc, &system, &policy);
    let _ = writeln!(out, "  trials         {trials}");
    let _ = writeln!(out, "  seed           {seed}");
    let _ = writeln!(out, "\nResults");
    if result.has_standard_error() {
        let _ = writeln!(
            out,
            "  PFD_avg (simulated)  = {} ± {} (standard error)",
            sig3(result.pfd_avg_estimate),
            sig3(result.standard_error)
        );
    } else {
        let _ = writeln!(
            out,
            "  PFD_avg (simulated)  = {} ± undefined (standard error needs at least 2 trials)",
            sig3(result.pfd_avg_estimate)
        );
    }
    let _ = writeln!(
        out,
        "  PFD_avg (analytic, {}) = {}",
        mode_name(mode),
        sig3(analytic)
    );
    if result.has_standard_error() && result.standard_error > 0.0 {
        let z = (result.pfd_avg_estimate - analytic) / result.standard_error;
        let _ = writeln!(out, "  difference = {z:.2} standard errors");
    }
    Ok(out)
}
