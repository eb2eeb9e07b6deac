//! Job documents (TOML or JSON) and their validation.
//!
//! ```toml
//! version = 1
//! field = "QQ"
//! variables = ["x", "y", "u", "v"]
//! fine_degrees = [[1, 0], [1, 0], [0, 1], [0, 1]]
//! lambda = [1, -1]
//! relations = []
//! tasks = ["analyze", "duality", "windows"]
//!
//! [box]
//! weights = [-8, 8]
//! fine_bound = 12
//! kmax = 32
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wallcross_core::analyzer::DualityMode;
use wallcross_core::ring::{validate_ring, FieldSpec, GradedRingSpec, RingError, ValidatedRing};
use wallcross_core::table::{BoxError, ProbeBox};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Cech,
    Localcoh,
    Crosscheck,
    Analyze,
    Duality,
    Windows,
    Gorenstein,
}

impl Task {
    pub const ALL: [Task; 7] =
        [Task::Cech, Task::Localcoh, Task::Crosscheck, Task::Analyze, Task::Duality, Task::Windows, Task::Gorenstein];

    pub fn name(self) -> &'static str {
        match self {
            Task::Cech => "cech",
            Task::Localcoh => "localcoh",
            Task::Crosscheck => "crosscheck",
            Task::Analyze => "analyze",
            Task::Duality => "duality",
            Task::Windows => "windows",
            Task::Gorenstein => "gorenstein",
        }
    }

    pub fn needs_table(self) -> bool {
        self != Task::Gorenstein
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputMode {
    #[default]
    Text,
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSection {
    /// `[i_min, i_max]`.
    pub weights: [i64; 2],
    pub fine_bound: u32,
    #[serde(default = "default_kmax")]
    pub kmax: u32,
}

fn default_kmax() -> u32 {
    wallcross_core::cech::Truncation::default().kmax
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDocument {
    pub version: u32,
    pub field: FieldSpec,
    pub variables: Vec<String>,
    pub fine_degrees: Vec<Vec<i64>>,
    pub lambda: Vec<i64>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub complete_intersection: bool,
    #[serde(rename = "box")]
    pub probe: BoxSection,
    pub tasks: Vec<Task>,
    #[serde(default = "default_mode")]
    pub mode: DualityMode,
    /// Duality parameter; defaults to `-sigma`.
    #[serde(default)]
    pub a: Option<i64>,
    /// Extra windows for slice and swap checks.
    #[serde(default)]
    pub windows: Vec<Vec<i64>>,
    #[serde(default)]
    pub output: OutputMode,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

fn default_mode() -> DualityMode {
    DualityMode::Weight
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("ring: {0}")]
    Ring(#[from] RingError),
}

impl ConfigError {
    fn schema(path: &str, message: impl Into<String>) -> Self {
        ConfigError::Schema { path: path.to_string(), message: message.into() }
    }
}

/// Parses a job document, reporting schema violations with their field path.
/// JSON is detected by a leading `{`.
pub fn parse_job(text: &str) -> Result<JobDocument, ConfigError> {
    let path_of = |p: &serde_path_to_error::Path| {
        let s = p.to_string();
        if s == "." {
            "<document>".to_string()
        } else {
            s
        }
    };
    if text.trim_start().starts_with('{') {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::schema(&path_of(e.path()), e.inner().to_string()))
    } else {
        let de = toml::Deserializer::new(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let msg = e.inner().message().to_string();
            ConfigError::schema(&path_of(e.path()), msg)
        })
    }
}

pub fn load_job(path: &Path) -> Result<JobDocument, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    parse_job(&text)
}

/// A job whose ring and box passed validation.
#[derive(Debug)]
pub struct Job {
    pub document: JobDocument,
    pub ring: ValidatedRing,
    pub probe: ProbeBox,
}

impl JobDocument {
    pub fn ring_spec(&self) -> GradedRingSpec {
        GradedRingSpec {
            field: self.field,
            variables: self.variables.clone(),
            fine_degrees: self.fine_degrees.clone(),
            lambda: self.lambda.clone(),
            relations: self.relations.clone(),
            complete_intersection: self.complete_intersection,
        }
    }

    pub fn validate(self) -> Result<Job, ConfigError> {
        if self.version != SCHEMA_VERSION {
            return Err(ConfigError::schema("version", format!("expected {SCHEMA_VERSION}, found {}", self.version)));
        }
        if self.tasks.is_empty() {
            return Err(ConfigError::schema("tasks", "at least one task is required"));
        }
        let [lo, hi] = self.probe.weights;
        let probe = ProbeBox::new(lo, hi, self.probe.fine_bound, self.probe.kmax).map_err(|e| {
            let field = match e {
                BoxError::WeightRange(..) => "box.weights",
                BoxError::FineBound => "box.fine_bound",
                BoxError::Kmax(_) => "box.kmax",
            };
            ConfigError::schema(field, e.to_string())
        })?;
        for (k, w) in self.windows.iter().enumerate() {
            if w.is_empty() {
                return Err(ConfigError::schema(&format!("windows[{k}]"), "window must be nonempty"));
            }
        }
        let ring = validate_ring(self.ring_spec())?;
        Ok(Job { document: self, ring, probe })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONIFOLD: &str = r#"
version = 1
field = "QQ"
variables = ["x", "y", "u", "v"]
fine_degrees = [[1, 0], [1, 0], [0, 1], [0, 1]]
lambda = [1, -1]
tasks = ["analyze"]

[box]
weights = [-8, 8]
fine_bound = 12
"#;

    #[test]
    fn toml_and_json_agree() {
        let t = parse_job(CONIFOLD).unwrap();
        let j = parse_job(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(t, j);
        assert_eq!(t.probe.kmax, 32);
        assert_eq!(t.mode, DualityMode::Weight);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let bad = CONIFOLD.replace("fine_bound = 12", "fine_bound = -1");
        let err = parse_job(&bad).unwrap_err().to_string();
        assert!(err.starts_with("box.fine_bound"), "{err}");
        let bad = CONIFOLD.replace("\"analyze\"", "\"plot\"");
        assert!(parse_job(&bad).unwrap_err().to_string().starts_with("tasks[0]"));
        let bad = CONIFOLD.replace("weights = [-8, 8]", "weights = [3, 3]");
        let err = parse_job(&bad).unwrap().validate().unwrap_err().to_string();
        assert!(err.starts_with("box.weights"), "{err}");
        let bad = CONIFOLD.replace("tasks = [\"analyze\"]", "tasks = []");
        assert!(parse_job(&bad).unwrap().validate().unwrap_err().to_string().starts_with("tasks"));
        let bad = CONIFOLD.replace("lambda", "lamda");
        assert!(parse_job(&bad).is_err());
    }
}
