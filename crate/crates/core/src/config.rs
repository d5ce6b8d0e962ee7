//! Run configuration: one TOML document plus `key=value` overrides.
//!
//! Every key has a default, so an empty document resolves to the Fig. 2
//! working point. Unknown keys are rejected with the nearest valid key.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{Engine, EvolveSpec, InitialState, PopulationFeedback, TimeUnit};
use crate::ep::EpOptions;
use crate::model::{lambda_from_drive, DriveParams, DEFAULT_DISPERSIVE_RATIO};
use crate::oracle::DetuningConvention;
use crate::params::{CircuitParams, ModelOverrides, Scenario};
use crate::sweep::{Axis, SweepSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown key `{key}`{}", suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownKey { key: String, suggestion: Option<String> },
    #[error("invalid override `{0}`: expected key=value")]
    BadOverride(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Circuit block with flat per-qubit keys. Defaults: Fig. 2 caption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitConfig {
    pub omega_a: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_c: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_a: f64,
    pub gamma_c: f64,
    pub g_xy: f64,
    pub g_1: f64,
    pub g_2: f64,
    pub lambda_1: f64,
    pub lambda_2: f64,
    pub theta_1: f64,
    pub theta_2: f64,
    pub sigma_z_1: f64,
    pub sigma_z_2: f64,
}

impl From<CircuitParams> for CircuitConfig {
    fn from(p: CircuitParams) -> Self {
        CircuitConfig {
            omega_a: p.omega_a,
            omega_1: p.omega_q[0],
            omega_2: p.omega_q[1],
            omega_c: p.omega_c,
            gamma_1: p.gamma_q[0],
            gamma_2: p.gamma_q[1],
            gamma_a: p.gamma_a,
            gamma_c: p.gamma_c,
            g_xy: p.g_xy,
            g_1: p.g_qc[0],
            g_2: p.g_qc[1],
            lambda_1: p.lambda_q[0],
            lambda_2: p.lambda_q[1],
            theta_1: p.theta_q[0],
            theta_2: p.theta_q[1],
            sigma_z_1: p.sigma_z[0],
            sigma_z_2: p.sigma_z[1],
        }
    }
}

impl From<CircuitConfig> for CircuitParams {
    fn from(c: CircuitConfig) -> Self {
        CircuitParams {
            omega_a: c.omega_a,
            omega_q: [c.omega_1, c.omega_2],
            omega_c: c.omega_c,
            gamma_q: [c.gamma_1, c.gamma_2],
            gamma_a: c.gamma_a,
            gamma_c: c.gamma_c,
            g_xy: c.g_xy,
            g_qc: [c.g_1, c.g_2],
            lambda_q: [c.lambda_1, c.lambda_2],
            theta_q: [c.theta_1, c.theta_2],
            sigma_z: [c.sigma_z_1, c.sigma_z_2],
        }
    }
}

impl Default for CircuitConfig {
    fn default() -> Self {
        CircuitParams::fig2().into()
    }
}

/// Direct overrides of derived quantities. `delta_theta` (radians) or
/// `delta_theta_pi` (multiples of pi) set `theta_1 = theta_2 + delta_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_theta_pi: Option<f64>,
}

/// Drive-set resonator couplings; when present, replaces `lambda_1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveConfig {
    pub lambda0: [f64; 2],
    pub alpha: [f64; 2],
    pub drive_amp: [f64; 2],
    pub dispersive_ratio: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            lambda0: [50.0, 50.0],
            alpha: [-250.0, -250.0],
            drive_amp: [7.0, 7.0],
            dispersive_ratio: DEFAULT_DISPERSIVE_RATIO,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisUnit {
    #[default]
    Native,
    /// Values are multiples of pi.
    Pi,
}

/// One sweep axis: either `values` or `min`/`max`/`n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AxisConfig {
    pub kind: String,
    pub min: f64,
    pub max: f64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub unit: AxisUnit,
}

impl Default for AxisConfig {
    fn default() -> Self {
        AxisConfig::range("g_e", -3.0, 3.0, 601, AxisUnit::Native)
    }
}

impl AxisConfig {
    pub fn range(kind: &str, min: f64, max: f64, n: usize, unit: AxisUnit) -> Self {
        AxisConfig {
            kind: kind.to_string(),
            min,
            max,
            n,
            values: None,
            unit,
        }
    }

    pub fn to_spec(&self, key: &str) -> Result<SweepSpec, ConfigError> {
        let axis: Axis = self
            .kind
            .parse()
            .map_err(|e: crate::Error| bad(&format!("{key}.kind"), e.to_string()))?;
        let scale = match self.unit {
            AxisUnit::Native => 1.0,
            AxisUnit::Pi => PI,
        };
        let values = match &self.values {
            Some(v) => {
                if v.is_empty() {
                    return Err(bad(&format!("{key}.values"), "must not be empty"));
                }
                v.iter().map(|x| x * scale).collect()
            }
            None => {
                if self.n < 2 {
                    return Err(bad(&format!("{key}.n"), format!("must be >= 2, got {}", self.n)));
                }
                if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
                    return Err(bad(
                        key,
                        format!("need finite min < max, got [{}, {}]", self.min, self.max),
                    ));
                }
                crate::sweep::linspace(self.min * scale, self.max * scale, self.n)
            }
        };
        if values.iter().any(|v: &f64| !v.is_finite()) {
            return Err(bad(&format!("{key}.values"), "must be finite"));
        }
        Ok(SweepSpec::new(axis, values))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub axis1: AxisConfig,
    pub axis2: AxisConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            axis1: AxisConfig::range("g_e", -3.0, 3.0, 201, AxisUnit::Native),
            axis2: AxisConfig::range("delta_theta", 0.0, 1.0, 201, AxisUnit::Pi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Exact,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub initial_sigma_z: [f64; 2],
    pub t_max: f64,
    pub n_steps: usize,
    pub feedback: PopulationFeedback,
    pub engine: EngineKind,
    /// RK4 steps per output interval; 0 picks them automatically.
    pub substeps: usize,
    pub time_unit: TimeUnit,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            initial_sigma_z: [1.0, -1.0],
            t_max: 50.0,
            n_steps: 1000,
            feedback: PopulationFeedback::Frozen,
            engine: EngineKind::Exact,
            substeps: 0,
            time_unit: TimeUnit::OmegaN,
        }
    }
}

impl EvolveConfig {
    pub fn to_spec(&self) -> Result<EvolveSpec, ConfigError> {
        let initial = InitialState::from_sigma_pair(self.initial_sigma_z)
            .map_err(|e| bad("evolve.initial_sigma_z", e.to_string()))?;
        let engine = match self.engine {
            EngineKind::Exact => Engine::Exact,
            EngineKind::Rk4 => Engine::Rk4 {
                substeps: (self.substeps > 0).then_some(self.substeps),
            },
        };
        let spec = EvolveSpec {
            initial,
            t_max: self.t_max,
            n_steps: self.n_steps,
            feedback: self.feedback,
            engine,
            time_unit: self.time_unit,
        };
        spec.validate().map_err(|e| bad("evolve", e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EpMode {
    /// Search the `[sweep]` axis.
    #[serde(rename = "1d")]
    OneD,
    /// Search the `[scan]` plane for exceptional points.
    #[default]
    #[serde(rename = "2d")]
    TwoD,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpConfig {
    pub tol_disc: f64,
    pub max_depth: usize,
    pub mode: EpMode,
}

impl Default for EpConfig {
    fn default() -> Self {
        let o = EpOptions::default();
        EpConfig {
            tol_disc: o.tol_disc,
            max_depth: o.max_depth,
            mode: EpMode::TwoD,
        }
    }
}

impl EpConfig {
    pub fn options(&self) -> Result<EpOptions, ConfigError> {
        if !(self.tol_disc > 0.0 && self.tol_disc.is_finite()) {
            return Err(bad("ep.tol_disc", "must be positive"));
        }
        if self.max_depth == 0 {
            return Err(bad("ep.max_depth", "must be >= 1"));
        }
        Ok(EpOptions {
            tol_disc: self.tol_disc,
            max_depth: self.max_depth,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub gamma_a_schedule: Vec<f64>,
    pub convention: DetuningConvention,
    pub omega_c_values: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            gamma_a_schedule: vec![65.0, 130.0, 260.0, 520.0],
            convention: DetuningConvention::Effective,
            omega_c_values: vec![5200.0, 6000.0, 7500.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelftestConfig {
    /// Random circuits per identity check.
    pub draws: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { draws: 10_000 }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Output path. Never echoed into output headers.
    #[serde(skip_serializing)]
    pub output: Option<String>,
    pub seed: u64,
    pub format: OutputFormat,
    /// Worker count. Never echoed into output headers.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
    pub circuit: CircuitConfig,
    pub model: ModelConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveConfig>,
    pub sweep: AxisConfig,
    pub scan: ScanConfig,
    pub evolve: EvolveConfig,
    pub ep: EpConfig,
    pub oracle: OracleConfig,
    pub selftest: SelftestConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output: None,
            seed: 1,
            format: OutputFormat::Csv,
            threads: None,
            circuit: CircuitConfig::default(),
            model: ModelConfig::default(),
            drive: None,
            sweep: AxisConfig::default(),
            scan: ScanConfig::default(),
            evolve: EvolveConfig::default(),
            ep: EpConfig::default(),
            oracle: OracleConfig::default(),
            selftest: SelftestConfig::default(),
        }
    }
}

const TOP_KEYS: &[&str] = &["output", "seed", "format", "threads"];
const CIRCUIT_KEYS: &[&str] = &[
    "omega_a", "omega_1", "omega_2", "omega_c", "gamma_1", "gamma_2", "gamma_a", "gamma_c", "g_xy",
    "g_1", "g_2", "lambda_1", "lambda_2", "theta_1", "theta_2", "sigma_z_1", "sigma_z_2",
];
const MODEL_KEYS: &[&str] = &["g_e", "gamma_ratio", "delta_theta", "delta_theta_pi"];
const DRIVE_KEYS: &[&str] = &["lambda0", "alpha", "drive_amp", "dispersive_ratio"];
const AXIS_KEYS: &[&str] = &["kind", "min", "max", "n", "values", "unit"];
const EVOLVE_KEYS: &[&str] = &[
    "initial_sigma_z", "t_max", "n_steps", "feedback", "engine", "substeps", "time_unit",
];
const EP_KEYS: &[&str] = &["tol_disc", "max_depth", "mode"];
const ORACLE_KEYS: &[&str] = &["gamma_a_schedule", "convention", "omega_c_values"];
const SELFTEST_KEYS: &[&str] = &["draws"];

/// Every valid dotted key path.
pub fn known_keys() -> Vec<String> {
    let mut out: Vec<String> = TOP_KEYS.iter().map(|s| s.to_string()).collect();
    let sections: [(&str, &[&str]); 9] = [
        ("circuit", CIRCUIT_KEYS),
        ("model", MODEL_KEYS),
        ("drive", DRIVE_KEYS),
        ("sweep", AXIS_KEYS),
        ("scan.axis1", AXIS_KEYS),
        ("scan.axis2", AXIS_KEYS),
        ("evolve", EVOLVE_KEYS),
        ("ep", EP_KEYS),
        ("oracle", ORACLE_KEYS),
    ];
    for (sec, keys) in sections.into_iter().chain([("selftest", SELFTEST_KEYS)]) {
        out.extend(keys.iter().map(|k| format!("{sec}.{k}")));
    }
    out
}

fn section_keys(path: &str) -> Option<&'static [&'static str]> {
    Some(match path {
        "circuit" => CIRCUIT_KEYS,
        "model" => MODEL_KEYS,
        "drive" => DRIVE_KEYS,
        "sweep" | "scan.axis1" | "scan.axis2" => AXIS_KEYS,
        "evolve" => EVOLVE_KEYS,
        "ep" => EP_KEYS,
        "oracle" => ORACLE_KEYS,
        "selftest" => SELFTEST_KEYS,
        _ => return None,
    })
}

fn is_section(path: &str) -> bool {
    path == "scan" || section_keys(path).is_some()
}

/// Nearest valid key by Jaro-Winkler similarity over full dotted paths and
/// bare names (so `gama_a` finds `circuit.gamma_a`).
pub fn suggest_key(key: &str) -> Option<String> {
    let bare = key.rsplit('.').next().unwrap_or(key);
    known_keys()
        .into_iter()
        .map(|k| {
            let kb = k.rsplit('.').next().unwrap_or(&k).to_string();
            let score = strsim::jaro_winkler(key, &k).max(strsim::jaro_winkler(bare, &kb));
            (score, k)
        })
        .filter(|(s, _)| *s >= 0.7)
        .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .map(|(_, k)| k)
}

fn unknown(key: &str) -> ConfigError {
    ConfigError::UnknownKey {
        key: key.to_string(),
        suggestion: suggest_key(key),
    }
}

fn check_keys(table: &toml::Table, prefix: &str) -> Result<(), ConfigError> {
    for (k, v) in table {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        let allowed = if prefix.is_empty() {
            TOP_KEYS.contains(&k.as_str()) || is_section(k)
        } else if prefix == "scan" {
            k == "axis1" || k == "axis2"
        } else {
            section_keys(prefix).is_some_and(|keys| keys.contains(&k.as_str()))
        };
        if !allowed {
            return Err(unknown(&path));
        }
        if is_section(&path) {
            match v {
                toml::Value::Table(t) => check_keys(t, &path)?,
                _ => return Err(bad(&path, "expected a table")),
            }
        }
    }
    Ok(())
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn parse_error(source_name: &str, text: &str, e: &toml::de::Error) -> ConfigError {
    let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
    ConfigError::Parse {
        source_name: source_name.to_string(),
        line,
        column,
        message: e.message().trim().to_string(),
    }
}

/// Parse one override value: TOML syntax if it parses, otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Apply `a.b.c=value` onto a table.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::BadOverride(assignment.to_string()))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::BadOverride(assignment.to_string()));
    }
    if !known_keys().iter().any(|k| k == key) {
        return Err(unknown(key));
    }
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| bad(key, format!("`{p}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// Parse `text` and apply overrides. `source_name` labels parse errors.
pub fn parse_config(text: &str, source_name: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut table: toml::Table = text.parse().map_err(|e| parse_error(source_name, text, &e))?;
    check_keys(&table, "")?;
    // Type errors in the document itself keep their source position.
    toml::from_str::<RunConfig>(text).map_err(|e| parse_error(source_name, text, &e))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let cfg: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Invalid {
            key: "--set".into(),
            reason: e.message().trim().to_string(),
        })?;
    cfg.validate()?;
    Ok(cfg)
}

/// One heuristic unit warning.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitWarning {
    pub key: String,
    pub value: f64,
    pub message: String,
}

impl RunConfig {
    /// Structural checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.model.delta_theta.is_some() && self.model.delta_theta_pi.is_some() {
            return Err(bad("model.delta_theta", "set either delta_theta or delta_theta_pi, not both"));
        }
        if self.threads == Some(0) {
            return Err(bad("threads", "must be >= 1"));
        }
        if let Some(r) = self.model.gamma_ratio {
            if !r.is_finite() {
                return Err(bad("model.gamma_ratio", "must be finite"));
            }
        }
        self.circuit_params()?
            .validate()
            .map_err(|e| bad("circuit", e.to_string()))
    }

    /// Circuit with the model phase override and drive conversion applied.
    pub fn circuit_params(&self) -> Result<CircuitParams, ConfigError> {
        let mut p: CircuitParams = self.circuit.into();
        if let Some(d) = self.model.delta_theta {
            p.theta_q[0] = p.theta_q[1] + d;
        }
        if let Some(d) = self.model.delta_theta_pi {
            p.theta_q[0] = p.theta_q[1] + d * PI;
        }
        if let Some(drive) = &self.drive {
            for j in 0..2 {
                let dp = DriveParams {
                    lambda0: drive.lambda0[j],
                    alpha: drive.alpha[j],
                    drive_amp: drive.drive_amp[j],
                    delta_ja: p.detuning_qa(j),
                };
                let c = lambda_from_drive(&dp, drive.dispersive_ratio)
                    .map_err(|e| bad("drive", e.to_string()))?;
                p.lambda_q[j] = c.magnitude;
            }
        }
        Ok(p)
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        Ok(Scenario {
            circuit: self.circuit_params()?,
            overrides: ModelOverrides {
                g_e: self.model.g_e,
                gamma_ratio: self.model.gamma_ratio,
            },
        })
    }

    /// Heuristic unit checks. Frequencies are MHz; a resonator or qubit
    /// frequency below 100 looks like GHz, a decay or coupling above 1000
    /// looks like kHz or Hz.
    pub fn unit_sanity(&self) -> Vec<UnitWarning> {
        let c = &self.circuit;
        let mut out = Vec::new();
        let mut check = |key: &str, v: f64, low: bool| {
            let (trip, msg) = if low {
                (v.abs() < 100.0, "looks like GHz; frequencies are MHz")
            } else {
                (v.abs() > 1000.0, "is large for a MHz rate or coupling (kHz or Hz entered?)")
            };
            if trip {
                out.push(UnitWarning {
                    key: format!("circuit.{key}"),
                    value: v,
                    message: msg.to_string(),
                });
            }
        };
        for (k, v) in [
            ("omega_a", c.omega_a),
            ("omega_1", c.omega_1),
            ("omega_2", c.omega_2),
            ("omega_c", c.omega_c),
        ] {
            check(k, v, true);
        }
        for (k, v) in [
            ("gamma_1", c.gamma_1),
            ("gamma_2", c.gamma_2),
            ("gamma_a", c.gamma_a),
            ("gamma_c", c.gamma_c),
            ("g_xy", c.g_xy),
            ("g_1", c.g_1),
            ("g_2", c.g_2),
            ("lambda_1", c.lambda_1),
            ("lambda_2", c.lambda_2),
        ] {
            check(k, v, false);
        }
        out
    }

    /// Resolved configuration as TOML, without the worker count and output
    /// path.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_fig2() {
        let cfg = parse_config("", "<empty>", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.scenario().unwrap().circuit, CircuitParams::fig2());
    }

    #[test]
    fn single_override_keeps_defaults() {
        let cfg = parse_config("[circuit]\ngamma_a = 130\n", "c.toml", &[]).unwrap();
        let p = cfg.circuit_params().unwrap();
        assert_eq!(p.gamma_a, 130.0);
        assert_eq!(p, CircuitParams { gamma_a: 130.0, ..CircuitParams::fig2() });
    }

    #[test]
    fn typo_names_nearest_key() {
        let err = parse_config("[circuit]\ngama_a = 130\n", "c.toml", &[]).unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                key: "circuit.gama_a".into(),
                suggestion: Some("circuit.gamma_a".into())
            }
        );
        let err = parse_config("", "c", &["circuit.gama_a=1".into()]).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { suggestion: Some(ref s), .. } if s == "circuit.gamma_a"));
    }

    #[test]
    fn parse_error_has_position() {
        let err = parse_config("seed = 1\n[circuit]\ngamma_a = = 3\n", "c.toml", &[]).unwrap_err();
        match err {
            ConfigError::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 1);
            }
            other => panic!("{other:?}"),
        }
        let err = parse_config("[circuit]\ngamma_a = \"x\"\n", "c.toml", &[]).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn overrides_win_and_parse_as_toml() {
        let cfg = parse_config(
            "[circuit]\ngamma_a = 130\n",
            "c",
            &[
                "circuit.gamma_a=260".into(),
                "evolve.engine=rk4".into(),
                "scan.axis1.values=[0.5, 1.0]".into(),
                "format=json".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.circuit.gamma_a, 260.0);
        assert_eq!(cfg.evolve.engine, EngineKind::Rk4);
        assert_eq!(cfg.scan.axis1.values, Some(vec![0.5, 1.0]));
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn pi_unit_scales_axis() {
        let cfg = RunConfig::default();
        let s = cfg.scan.axis2.to_spec("scan.axis2").unwrap();
        assert_eq!(s.axis, Axis::DeltaTheta);
        assert_eq!(s.max(), PI);
        let cfg = parse_config("[model]\ndelta_theta_pi = 0.5\n", "c", &[]).unwrap();
        assert!((cfg.circuit_params().unwrap().delta_theta() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn unit_sanity_flags_ghz_and_hz() {
        let cfg = parse_config("[circuit]\nomega_a = 4.475\ngamma_a = 65000\n", "c", &[]).unwrap();
        let keys: Vec<_> = cfg.unit_sanity().into_iter().map(|w| w.key).collect();
        assert_eq!(keys, ["circuit.omega_a", "circuit.gamma_a"]);
        assert!(RunConfig::default().unit_sanity().is_empty());
    }

    #[test]
    fn resolved_toml_round_trips_without_threads() {
        let cfg = RunConfig {
            threads: Some(8),
            output: Some("x.csv".into()),
            drive: Some(DriveConfig::default()),
            ..RunConfig::default()
        };
        let text = cfg.to_toml();
        assert!(!text.contains("threads"));
        let back = parse_config(&text, "echo", &[]).unwrap();
        assert_eq!(back, RunConfig { threads: None, output: None, ..cfg });
    }

    #[test]
    fn invalid_circuit_is_rejected() {
        let err = parse_config("[circuit]\ngamma_a = 0\n", "c", &[]).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { .. }));
    }
}
