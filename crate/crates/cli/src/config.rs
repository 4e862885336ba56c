//! JSON configuration documents and their validation.

use pfd_core::estimate::TestObservations;
use pfd_core::model::{periodic_schedule, SystemSpec, TestPolicy, TestSchedule, TimeUnit};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Hour,
    Month,
    Year,
}

impl From<Unit> for TimeUnit {
    fn from(u: Unit) -> Self {
        match u {
            Unit::Hour => TimeUnit::Hour,
            Unit::Month => TimeUnit::Month,
            Unit::Year => TimeUnit::Year,
        }
    }
}

impl Unit {
    pub fn hours(self) -> f64 {
        TimeUnit::from(self).hours()
    }

    pub fn name(self) -> &'static str {
        TimeUnit::from(self).name()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDoc>,
    pub policy: PolicyDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<ObservationsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub m: u32,
    pub n: u32,
    /// Failures per `lambda_unit`.
    pub lambda: f64,
    #[serde(default)]
    pub lambda_unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<f64>,
    pub schedule: ScheduleDoc,
    #[serde(default)]
    pub time_unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<PeriodicDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicDoc {
    pub n_tests: usize,
    pub full_test_interval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationsDoc {
    #[serde(rename = "K")]
    pub k: u64,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{field}: {msg}"))
}

pub fn parse(text: &str, origin: &str) -> Result<ConfigDocument, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{origin}: {e}")))
}

pub fn load(path: &std::path::Path) -> Result<ConfigDocument, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

pub fn dump(doc: &ConfigDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document is serializable");
    text.push('\n');
    text
}

impl ConfigDocument {
    pub fn time_unit(&self) -> Unit {
        self.policy.time_unit
    }

    /// Schedule in hours.
    pub fn schedule(&self) -> Result<TestSchedule, CliError> {
        let unit = self.policy.time_unit;
        let s = &self.policy.schedule;
        match (&s.periodic, &s.times) {
            (Some(p), None) => {
                let tau = p.full_test_interval * unit.hours();
                if !(tau.is_finite() && tau > 0.0) {
                    return Err(invalid(
                        "policy.schedule.periodic.full_test_interval",
                        format!("must be finite and positive (got {})", p.full_test_interval),
                    ));
                }
                periodic_schedule(p.n_tests, tau)
                    .map_err(|e| invalid("policy.schedule.periodic.n_tests", e))
            }
            (None, Some(times)) => {
                TestSchedule::new(times.iter().map(|t| t * unit.hours()).collect())
                    .map_err(|e| invalid("policy.schedule.times", e))
            }
            _ => Err(invalid(
                "policy.schedule",
                "exactly one of `periodic` or `times` is required",
            )),
        }
    }

    pub fn system(&self) -> Result<SystemSpec, CliError> {
        let s = self
            .system
            .as_ref()
            .ok_or_else(|| invalid("system", "missing; this command needs {m, n, lambda}"))?;
        let lambda = s.lambda / s.lambda_unit.hours();
        SystemSpec::new(s.m, s.n, lambda).map_err(|e| {
            use pfd_core::Error::*;
            let field = match e {
                MinimumBelowOne(_) | MExceedsN { .. } => "system.m",
                UnsupportedArchitecture(_) => "system.n",
                _ => "system.lambda",
            };
            invalid(field, e)
        })
    }

    pub fn efficiency(&self) -> Result<f64, CliError> {
        let e = self
            .policy
            .efficiency
            .ok_or_else(|| invalid("policy.efficiency", "missing; this command needs E"))?;
        if !(0.0..=1.0).contains(&e) {
            return Err(invalid(
                "policy.efficiency",
                format!("must lie in [0, 1] (got {e})"),
            ));
        }
        Ok(e)
    }

    pub fn policy(&self) -> Result<TestPolicy, CliError> {
        let schedule = self.schedule()?;
        TestPolicy::new(schedule, self.efficiency()?).map_err(|e| invalid("policy", e))
    }

    pub fn observations(&self) -> Result<TestObservations, CliError> {
        let o = self
            .observations
            .as_ref()
            .ok_or_else(|| invalid("observations", "missing; this command needs {K, counts}"))?;
        TestObservations::new(self.schedule()?, o.counts.clone(), o.k).map_err(|e| {
            use pfd_core::Error::*;
            let field = match e {
                NoObservedComponents => "observations.K",
                _ => "observations.counts",
            };
            invalid(field, e)
        })
    }

    /// Checks every section that is present.
    pub fn validate(&self) -> Result<(), CliError> {
        self.schedule()?;
        if self.system.is_some() {
            self.system()?;
        }
        if self.policy.efficiency.is_some() {
            self.efficiency()?;
        }
        if self.observations.is_some() {
            self.observations()?;
        }
        if let Some(SimulationDoc {
            trials: Some(0), ..
        }) = self.simulation
        {
            return Err(invalid("simulation.trials", "must be at least 1"));
        }
        Ok(())
    }
}
