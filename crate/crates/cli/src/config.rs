//! Run configuration: JSON schema, defaults and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wavesteer::{SampledFunction, SolverChoice, StateSpec, DEFAULT_SAMPLES};

use crate::error::CliError;

/// One schema violation, located by its key path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn issue(path: &str, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue { path: path.into(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverName {
    Qp,
    #[serde(alias = "el")]
    EulerLagrange,
    #[default]
    Both,
}

impl From<SolverName> for SolverChoice {
    fn from(s: SolverName) -> Self {
        match s {
            SolverName::Qp => SolverChoice::Qp,
            SolverName::EulerLagrange => SolverChoice::EulerLagrange,
            SolverName::Both => SolverChoice::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    PaperExample,
    Zero,
    Trig,
}

/// Coefficients of the trig preset: v0 = a cos(w x), r0 = -a cos(w x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigParams {
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "three")]
    pub frequency: f64,
}

impl Default for TrigParams {
    fn default() -> Self {
        Self { amplitude: 1.0, frequency: 3.0 }
    }
}

/// Two-column CSV files (x, value) on [-1, 1]. Missing terminal profiles are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFiles {
    pub v0: PathBuf,
    pub r0: PathBuf,
    #[serde(default)]
    pub v1: Option<PathBuf>,
    #[serde(default)]
    pub r1: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_pps")]
    pub points_per_segment: usize,
    #[serde(default = "one")]
    pub cfl: f64,
    /// Resolutions of the refinement study.
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { enabled: false, points_per_segment: default_pps(), cfl: 1.0, levels: default_levels() }
    }
}

fn one() -> f64 {
    1.0
}
fn three() -> f64 {
    3.0
}
fn default_pps() -> usize {
    64
}
fn default_levels() -> Vec<usize> {
    vec![16, 32, 64]
}
fn default_p() -> usize {
    DEFAULT_SAMPLES
}
fn default_stride() -> usize {
    1
}

/// Validated configuration of a single run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "P", default = "default_p")]
    pub p: usize,
    #[serde(default)]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub trig: Option<TrigParams>,
    #[serde(default)]
    pub profiles: Option<ProfileFiles>,
    #[serde(default)]
    pub solver: SolverName,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Keep every k-th field node in the fields CSV.
    #[serde(default = "default_stride")]
    pub field_stride: usize,
}

impl RunConfig {
    pub fn preset(n: usize, m: usize, preset: Preset) -> Self {
        Self {
            n,
            m,
            p: DEFAULT_SAMPLES,
            preset: Some(preset),
            trig: None,
            profiles: None,
            solver: SolverName::Both,
            oracle: OracleConfig::default(),
            output_dir: None,
            field_stride: 1,
        }
    }

    /// Semantic checks that serde cannot express. Infeasible meshes (M = 1) pass.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push(issue("N", "must be at least 1"));
        }
        if self.m == 0 {
            out.push(issue("M", "must be at least 1"));
        }
        if self.p < 5 || self.p.is_multiple_of(2) {
            out.push(issue("P", format!("must be odd and at least 5, got {}", self.p)));
        }
        match (&self.preset, &self.profiles) {
            (None, None) => out.push(issue("preset", "either preset or profiles is required")),
            (Some(_), Some(_)) => out.push(issue("profiles", "cannot be combined with preset")),
            _ => {}
        }
        if self.trig.is_some() && self.preset != Some(Preset::Trig) {
            out.push(issue("trig", "only allowed with preset \"trig\""));
        }
        if let Some(t) = &self.trig {
            if !t.amplitude.is_finite() {
                out.push(issue("trig.amplitude", "must be finite"));
            }
            if !t.frequency.is_finite() {
                out.push(issue("trig.frequency", "must be finite"));
            }
        }
        if self.oracle.points_per_segment < 8 {
            out.push(issue("oracle.points_per_segment", "must be at least 8"));
        }
        if !(self.oracle.cfl > 0.0 && self.oracle.cfl <= 1.0) {
            out.push(issue("oracle.cfl", "must lie in (0, 1]"));
        }
        if self.oracle.levels.len() < 2 {
            out.push(issue("oracle.levels", "need at least two resolutions"));
        }
        for (i, &l) in self.oracle.levels.iter().enumerate() {
            if l < 8 {
                out.push(issue(&format!("oracle.levels[{i}]"), "must be at least 8"));
            }
        }
        if self.oracle.levels.windows(2).any(|w| w[1] <= w[0]) {
            out.push(issue("oracle.levels", "must be strictly increasing"));
        }
        if self.field_stride == 0 {
            out.push(issue("field_stride", "must be at least 1"));
        }
        out
    }

    /// Initial and terminal data on the grid for `n` segments.
    pub fn state(&self, n: usize) -> Result<StateSpec, CliError> {
        let p = self.p;
        let state = match (self.preset, &self.profiles) {
            (Some(Preset::PaperExample), _) => StateSpec::paper_example(n, p)?,
            (Some(Preset::Zero), _) => StateSpec::zero(n, p)?,
            (Some(Preset::Trig), _) => {
                let t = self.trig.unwrap_or_default();
                StateSpec::trig(n, p, t.amplitude, t.frequency)?
            }
            (None, Some(files)) => {
                let load = |f: &Option<PathBuf>| f.as_deref().map(load_profile).transpose();
                let v0 = load_profile(&files.v0)?;
                let r0 = load_profile(&files.r0)?;
                let v1 = load(&files.v1)?;
                let r1 = load(&files.r1)?;
                let at = |f: &Option<SampledFunction>, x: f64| f.as_ref().map_or(Ok(0.0), |g| g.at(x));
                let sample = |f: &dyn Fn(f64) -> wavesteer::Result<f64>| -> Result<SampledFunction, CliError> {
                    let len = n * (p - 1) + 1;
                    let grid = SampledFunction::zeros(-1.0, 1.0, len)?;
                    let values = grid.points().map(f).collect::<wavesteer::Result<Vec<_>>>()?;
                    Ok(SampledFunction::new(-1.0, 1.0, values)?)
                };
                StateSpec::new(
                    sample(&|x| v0.at(x))?,
                    sample(&|x| r0.at(x))?,
                    sample(&|x| at(&v1, x))?,
                    sample(&|x| at(&r1, x))?,
                )?
            }
            (None, None) => return Err(CliError::Config(vec![issue("preset", "missing")])),
        };
        Ok(state)
    }
}

/// Parse and check a JSON configuration. Every violation carries its key path.
pub fn validate_config(raw: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(raw);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "(root)".to_string() } else { path };
        CliError::Config(vec![issue(&path, e.inner().to_string())])
    })?;
    let issues = cfg.issues();
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Config(issues))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![issue("--config", format!("{}: {e}", path.display()))]))?;
    let mut cfg = validate_config(&raw)?;
    if let Some(files) = cfg.profiles.as_mut() {
        let base = path.parent().unwrap_or(Path::new("."));
        for f in [Some(&mut files.v0), Some(&mut files.r0), files.v1.as_mut(), files.r1.as_mut()]
            .into_iter()
            .flatten()
        {
            if f.is_relative() {
                *f = base.join(&*f);
            }
        }
    }
    Ok(cfg)
}

/// Read a uniformly sampled profile from a two-column CSV (x, value) covering [-1, 1].
/// A header row is allowed.
pub fn load_profile(path: &Path) -> Result<SampledFunction, CliError> {
    let bad = |msg: String| CliError::Config(vec![issue("profiles", format!("{}: {msg}", path.display()))]);
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != 2 {
            return Err(bad(format!("line {} has {} columns, expected 2", i + 1, rec.len())));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(v)) => {
                xs.push(x);
                vs.push(v);
            }
            _ if i == 0 => continue,
            _ => return Err(bad(format!("line {} is not numeric", i + 1))),
        }
    }
    if xs.len() < 5 || xs.len() % 2 == 0 {
        return Err(bad(format!("need an odd number (>= 5) of samples, got {}", xs.len())));
    }
    let h = 2.0 / (xs.len() - 1) as f64;
    if xs.iter().enumerate().any(|(i, &x)| (x - (-1.0 + i as f64 * h)).abs() > 1e-9) {
        return Err(bad("samples must be uniform on [-1, 1]".into()));
    }
    SampledFunction::new(-1.0, 1.0, vs).map_err(|e| bad(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = validate_config(r#"{"N": 4, "M": 4, "preset": "paper_example"}"#).unwrap();
        assert_eq!(cfg.p, 129);
        assert_eq!(cfg.solver, SolverName::Both);
        assert!(!cfg.oracle.enabled);
    }

    #[test]
    fn zero_segments_names_the_key() {
        let err = validate_config(r#"{"N": 0, "M": 4, "preset": "zero"}"#).unwrap_err();
        match err {
            CliError::Config(issues) => assert_eq!(issues[0].path, "N"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let err = validate_config(r#"{"N": 4, "M": 4, "preset": "zero", "oracle": {"enabld": true}}"#).unwrap_err();
        let CliError::Config(issues) = err else { panic!() };
        assert_eq!(issues[0].path, "oracle.enabld");
        assert!(issues[0].message.contains("enabld"));
    }

    #[test]
    fn single_layer_is_valid_at_parse_time() {
        assert!(validate_config(r#"{"M": 1, "N": 4, "preset": "paper_example"}"#).is_ok());
    }
}
