//! Run configuration: a TOML file with nested sections, overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use levywalk::{DirectionMeasure, HeavyTailLaw, MixingDensity, Scenario, SubordinatorLaw};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Lw,
    Olw,
    Glw,
    Golw,
    LimitStable,
    LimitDistributed,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lw => "lw",
            ModelKind::Olw => "olw",
            ModelKind::Glw => "glw",
            ModelKind::Golw => "golw",
            ModelKind::LimitStable => "limit-stable",
            ModelKind::LimitDistributed => "limit-distributed",
        }
    }

    pub fn is_limit(self) -> bool {
        matches!(self, ModelKind::LimitStable | ModelKind::LimitDistributed)
    }

    pub fn is_distributed(self) -> bool {
        matches!(
            self,
            ModelKind::Glw | ModelKind::Golw | ModelKind::LimitDistributed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Scale of the generalized walks, or the rescaling factor of LW/OLW.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    /// Truncation cutoff of the limit simulation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub paths: u64,
    /// Physical times at which positions are recorded.
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// Operational-time block used to extend limit paths until they cover the last time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_step: Option<f64>,
}

fn default_times() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_prefix")]
    pub prefix: String,
    /// Also write full paths or jump lists as binary frames.
    #[serde(default)]
    pub binary: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_prefix() -> String {
    "run".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            prefix: default_prefix(),
            binary: false,
        }
    }
}

/// Probe grids of the verification suites; unset fields take suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laplace_horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laplace_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub model: ModelSection,
    pub direction: DirectionMeasure,
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "is_default_verify")]
    pub verify: VerifySection,
}

fn is_default_verify(v: &VerifySection) -> bool {
    *v == VerifySection::default()
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub paths: Option<u64>,
    pub out: Option<PathBuf>,
    pub suite: Option<String>,
}

pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_B: f64 = 2.0;

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().to_string())
                .map_or_else(|| "config".to_string(), |line| format!("line {line}"));
            CliError::config(field, message)
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(t) = o.threads {
            self.threads = Some(t);
        }
        if let Some(p) = o.paths {
            self.run.paths = p;
        }
        if let Some(dir) = &o.out {
            self.output.dir = dir.clone();
        }
        if let Some(s) = &o.suite {
            self.verify.suite = Some(s.clone());
        }
    }

    /// Checks every field before any work starts.
    pub fn validate(&self) -> CliResult<()> {
        let m = &self.model;
        if m.kind.is_distributed() {
            if m.alpha.is_some() {
                return Err(CliError::config(
                    "model.alpha",
                    format!("not used by `{}`; give gamma and b", m.kind.name()),
                ));
            }
            let gamma = m.gamma.ok_or_else(|| {
                CliError::config("model.gamma", "required by distributed-order models")
            })?;
            let b = m.b.unwrap_or(DEFAULT_B);
            let p = MixingDensity::unchecked(gamma, b)
                .map_err(|e| CliError::config("model.gamma", e.to_string()))?;
            if b <= 1.0 {
                return Err(CliError::config(
                    "model.b",
                    format!("b = {b} violates the integrability condition ∫₀¹ p(β)/(1−β) dβ < ∞, which requires b > 1"),
                ));
            }
            let _ = p;
        } else {
            if m.gamma.is_some() || m.b.is_some() {
                return Err(CliError::config(
                    "model.gamma",
                    format!("not used by `{}`; give alpha", m.kind.name()),
                ));
            }
            let alpha = m
                .alpha
                .ok_or_else(|| CliError::config("model.alpha", "required by this model"))?;
            HeavyTailLaw::new(alpha).map_err(|e| CliError::config("model.alpha", e.to_string()))?;
        }
        if m.scenario.is_some() && !m.kind.is_limit() {
            return Err(CliError::config(
                "model.scenario",
                "only limit models take a scenario",
            ));
        }
        if let Some(n) = m.n {
            if !(n >= 1.0 && n.is_finite()) {
                return Err(CliError::config(
                    "model.n",
                    format!("must be at least 1, got {n}"),
                ));
            }
            if matches!(m.kind, ModelKind::Glw | ModelKind::Golw) && n.fract() != 0.0 {
                return Err(CliError::config(
                    "model.n",
                    format!("must be an integer for generalized walks, got {n}"),
                ));
            }
        } else if matches!(m.kind, ModelKind::Glw | ModelKind::Golw) {
            return Err(CliError::config("model.n", "required by generalized walks"));
        }
        if let Some(eps) = m.eps {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(CliError::config(
                    "model.eps",
                    format!("must be positive, got {eps}"),
                ));
            }
        }
        if self.run.paths == 0 {
            return Err(CliError::config("run.paths", "must be at least 1"));
        }
        let t = &self.run.times;
        if t.is_empty() {
            return Err(CliError::config(
                "run.times",
                "at least one time is required",
            ));
        }
        if t.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(CliError::config(
                "run.times",
                "times must be non-negative and finite",
            ));
        }
        if t.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::config(
                "run.times",
                "times must be non-decreasing",
            ));
        }
        if !m.kind.is_limit() && t.iter().all(|v| *v == 0.0) {
            return Err(CliError::config(
                "run.times",
                "the walk horizon must be positive",
            ));
        }
        if let Some(step) = self.run.tau_step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(CliError::config(
                    "run.tau_step",
                    format!("must be positive, got {step}"),
                ));
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::config("threads", "must be at least 1"));
        }
        if self.output.prefix.is_empty() || self.output.prefix.contains(['/', '\\']) {
            return Err(CliError::config(
                "output.prefix",
                "must be a plain non-empty file-name prefix",
            ));
        }
        Ok(())
    }

    pub fn alpha(&self) -> Option<f64> {
        self.model.alpha
    }

    pub fn mixing(&self) -> Option<MixingDensity> {
        self.model
            .gamma
            .and_then(|g| MixingDensity::new(g, self.model.b.unwrap_or(DEFAULT_B)).ok())
    }

    pub fn eps(&self) -> f64 {
        self.model.eps.unwrap_or(DEFAULT_EPS)
    }

    pub fn scenario(&self) -> Scenario {
        self.model.scenario.unwrap_or(Scenario::WaitFirst)
    }

    /// Subordinator law of a limit model.
    pub fn subordinator(&self) -> CliResult<SubordinatorLaw> {
        Ok(match self.model.kind {
            ModelKind::LimitDistributed | ModelKind::Glw | ModelKind::Golw => {
                SubordinatorLaw::distributed(
                    self.mixing()
                        .ok_or_else(|| CliError::config("model.gamma", "invalid mixing density"))?,
                )?
            }
            _ => SubordinatorLaw::stable(
                self.alpha()
                    .ok_or_else(|| CliError::config("model.alpha", "missing"))?,
            )?,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }
}
