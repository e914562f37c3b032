//! Declarative experiment configuration, read from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ermakov::{FrequencyProtocol, OscillatorParams, Tolerances};
use serde::{Deserialize, Serialize};

use crate::ConfigError;

/// Column names of the trajectory CSV, in order.
pub const COLUMNS: [&str; 11] = ["t", "omega", "sigma", "sigma_dot", "Q", "r", "phi", "chi", "n_exc", "var_q", "var_p"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: FrequencyProtocol,
    #[serde(default)]
    pub oscillator: OscillatorConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub initial: InitialConditions,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorConfig {
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    /// Ermakov constant; 1/M² when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ermakov_c: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0, ermakov_c: None }
    }
}

impl OscillatorConfig {
    pub fn params(&self) -> Result<OscillatorParams, ConfigError> {
        let p = match self.ermakov_c {
            Some(c) => OscillatorParams::with_c(self.mass, self.hbar, c),
            None => OscillatorParams::new(self.mass, self.hbar),
        };
        p.map_err(|e| ConfigError::Invalid { field: "oscillator".into(), message: e.to_string() })
    }
}

/// Whether times are physical or in the ramp-rescaled variable s = δ^{1/3} t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnits {
    #[default]
    Physical,
    RampScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    /// Start of integration; tanh protocols default to τ - 20ε.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    pub end: f64,
    /// Uniform output grid size.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub units: TimeUnits,
}

fn default_samples() -> usize {
    1001
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_rel")]
    pub rel: f64,
    #[serde(default = "default_abs")]
    pub abs: f64,
}

fn default_rel() -> f64 {
    Tolerances::default().rel
}

fn default_abs() -> f64 {
    Tolerances::default().abs
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel: default_rel(), abs: default_abs() }
    }
}

impl IntegratorConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances { rel: self.rel, abs: self.abs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConditions {
    #[default]
    Equilibrium,
    Adiabatic,
    Explicit {
        sigma: f64,
        sigma_dot: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// File stem for the trajectory CSV and report.
    #[serde(default = "default_name")]
    pub name: String,
    /// Also write the raw Ermakov state (t, omega, sigma, sigma_dot, phase_integral).
    #[serde(default)]
    pub ermakov_csv: bool,
    /// Number of PMF entries p(0), p(2), ... recorded in the report.
    #[serde(default = "default_pmf_head")]
    pub pmf_head: usize,
    /// Final-time observables recorded in the report summary.
    #[serde(default = "default_observables")]
    pub observables: Vec<String>,
}

fn default_name() -> String {
    "trajectory".into()
}

fn default_pmf_head() -> usize {
    8
}

fn default_observables() -> Vec<String> {
    ["Q", "r", "n_exc"].iter().map(|s| s.to_string()).collect()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { name: default_name(), ermakov_csv: false, pmf_head: default_pmf_head(), observables: default_observables() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<SweepAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path such as "protocol.delta" or "oscillator.mass".
    pub parameter: String,
    pub values: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        // The tagged protocol table loses field positions, so check it first.
        if let Some(problem) = protocol_problem(text) {
            return Err(ConfigError::Parse(problem));
        }
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            ConfigError::Parse(m) => ConfigError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.protocol.validate().map_err(|e| ConfigError::Invalid { field: "protocol".into(), message: e.to_string() })?;
        self.oscillator.params()?;
        let (t0, t1) = self.time_span()?;
        if !(t1 > t0) {
            return Err(ConfigError::Invalid { field: "time".into(), message: format!("end {t1} must exceed start {t0}") });
        }
        if self.time.samples < 2 {
            return Err(ConfigError::Invalid { field: "time.samples".into(), message: "need at least 2 samples".into() });
        }
        if !(self.integrator.rel > 0.0 && self.integrator.abs > 0.0) {
            return Err(ConfigError::Invalid { field: "integrator".into(), message: "tolerances must be positive".into() });
        }
        if let InitialConditions::Explicit { sigma, sigma_dot } = self.initial {
            if !(sigma > 0.0 && sigma_dot.is_finite()) {
                return Err(ConfigError::Invalid { field: "initial".into(), message: format!("sigma = {sigma}, sigma_dot = {sigma_dot}") });
            }
        }
        for name in &self.output.observables {
            if !COLUMNS.contains(&name.as_str()) {
                return Err(ConfigError::Invalid { field: "output.observables".into(), message: format!("unknown observable {name:?}") });
            }
        }
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return Err(ConfigError::Invalid { field: "output.name".into(), message: "must be a plain file stem".into() });
        }
        if let Some(sweep) = &self.sweep {
            if sweep.axes.is_empty() || sweep.axes.iter().any(|a| a.values.is_empty()) {
                return Err(ConfigError::Invalid { field: "sweep.axes".into(), message: "axes must be non-empty".into() });
            }
            for axis in &sweep.axes {
                self.with_parameter(&axis.parameter, axis.values[0])?;
            }
        }
        Ok(())
    }

    fn time_scale(&self) -> f64 {
        match (self.time.units, &self.protocol) {
            (TimeUnits::RampScaled, FrequencyProtocol::LinearSymmetric { delta } | FrequencyProtocol::NonlinearSymmetric { delta, .. }) => {
                delta.cbrt()
            }
            _ => 1.0,
        }
    }

    /// Physical integration span.
    pub fn time_span(&self) -> Result<(f64, f64), ConfigError> {
        if self.time.units == TimeUnits::RampScaled
            && !matches!(self.protocol, FrequencyProtocol::LinearSymmetric { .. } | FrequencyProtocol::NonlinearSymmetric { .. })
        {
            return Err(ConfigError::Invalid { field: "time.units".into(), message: "ramp_scaled requires a ramp protocol".into() });
        }
        let scale = self.time_scale();
        let start = match self.time.start {
            Some(s) => s / scale,
            None => self
                .protocol
                .default_start()
                .ok_or_else(|| ConfigError::Invalid { field: "time.start".into(), message: "required for this protocol".into() })?,
        };
        Ok((start, self.time.end / scale))
    }

    /// Output grid, uniform over the span.
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        let (t0, t1) = self.time_span()?;
        let n = self.time.samples;
        Ok((0..n).map(|i| if i + 1 == n { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 }).collect())
    }

    /// Copy of the config with one dotted parameter replaced.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self, ConfigError> {
        let mut doc = toml::Value::try_from(self).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let unknown = || ConfigError::UnknownParameter(path.into());
        let (parents, leaf) = match path.rsplit_once('.') {
            Some((head, leaf)) => (head.split('.').collect::<Vec<_>>(), leaf),
            None => (Vec::new(), path),
        };
        let mut node = &mut doc;
        for part in parents {
            node = node.as_table_mut().and_then(|t| t.get_mut(part)).ok_or_else(unknown)?;
        }
        let slot = node.as_table_mut().and_then(|t| t.get_mut(leaf)).ok_or_else(unknown)?;
        *slot = match slot {
            toml::Value::Integer(_) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
            toml::Value::Integer(_) | toml::Value::Float(_) => toml::Value::Float(value),
            _ => return Err(unknown()),
        };
        let mut cfg: Self = doc.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.sweep = None;
        cfg.validate()?;
        cfg.sweep = self.sweep.clone();
        Ok(cfg)
    }
}

#[derive(Deserialize)]
struct ProtocolSpans {
    protocol: Option<BTreeMap<String, toml::Spanned<toml::Value>>>,
}

fn protocol_fields(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "constant" => &["omega0"],
        "sudden_quench" => &["omega_i", "omega_f", "t_q"],
        "tanh" => &["omega_i", "omega_f", "tau", "epsilon"],
        "linear_symmetric" => &["delta"],
        "nonlinear_symmetric" => &["delta", "eta"],
        "sampled" => &["t", "omega"],
        "reversed" => &["inner", "total"],
        _ => return None,
    })
}

/// Unknown or mistyped keys of the `[protocol]` table, with their line.
fn protocol_problem(text: &str) -> Option<String> {
    let table = toml::from_str::<ProtocolSpans>(text).ok()?.protocol?;
    let line = |v: &toml::Spanned<toml::Value>| text[..v.span().start].matches('\n').count() + 1;
    let kind = table.get("kind")?.get_ref().as_str()?;
    let fields = protocol_fields(kind)?;
    for (key, value) in &table {
        if key == "kind" {
            continue;
        }
        if !fields.contains(&key.as_str()) {
            return Some(format!("line {}: unknown field `protocol.{key}` for kind {kind:?}, expected one of {fields:?}", line(value)));
        }
        let numeric = matches!(value.get_ref(), toml::Value::Float(_) | toml::Value::Integer(_));
        if !numeric && !matches!(key.as_str(), "t" | "omega" | "inner") {
            return Some(format!("line {}: `protocol.{key}` must be a number, found {}", line(value), value.get_ref().type_str()));
        }
    }
    None
}

/// Resolve the output directory, defaulting to the working directory.
pub fn output_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}
