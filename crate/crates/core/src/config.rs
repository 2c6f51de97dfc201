//! Pipeline configuration read from a TOML file. Relative paths are taken
//! relative to the directory holding the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::refine::BlockingConfig;
use crate::vault::PageRankParams;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config file {0} not found")]
    Missing(PathBuf),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("config key {0} is required for this command")]
    MissingKey(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Http,
    #[default]
    Stub,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub kind: OracleKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: Option<String>,
    pub max_parallel: usize,
    pub timeout_seconds: f64,
    pub retries: u32,
    pub backoff_seconds: f64,
    pub stub_path: Option<PathBuf>,
    pub price_per_call: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            kind: OracleKind::Stub,
            endpoint: None,
            model: None,
            api_key_env: None,
            max_parallel: 4,
            timeout_seconds: 60.0,
            retries: 2,
            backoff_seconds: 1.0,
            stub_path: None,
            price_per_call: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPageRank {
    #[serde(default = "d_damping")]
    damping: f64,
    #[serde(default = "d_tolerance")]
    tolerance: f64,
    #[serde(default = "d_iterations")]
    max_iterations: usize,
    #[serde(default)]
    undirected: bool,
}

fn d_damping() -> f64 {
    PageRankParams::default().damping
}
fn d_tolerance() -> f64 {
    PageRankParams::default().tolerance
}
fn d_iterations() -> usize {
    PageRankParams::default().max_iterations
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlocking {
    #[serde(default)]
    token_overlap: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    vault_root: Option<PathBuf>,
    schema_path: Option<PathBuf>,
    xml_path: Option<PathBuf>,
    base_iri: Option<String>,
    output_dir: Option<PathBuf>,
    ground_truth_path: Option<PathBuf>,
    #[serde(default)]
    oracle: OracleConfig,
    #[serde(default)]
    blocking: RawBlocking,
    pagerank: Option<RawPageRank>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub vault_root: Option<PathBuf>,
    pub schema_path: Option<PathBuf>,
    pub xml_path: Option<PathBuf>,
    pub base_iri: String,
    pub output_dir: PathBuf,
    pub ground_truth_path: Option<PathBuf>,
    pub oracle: OracleConfig,
    pub blocking: BlockingConfig,
    pub pagerank: PageRankParams,
}

pub const DEFAULT_BASE_IRI: &str = "http://example.org/requirements";

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        if !path.is_file() {
            return Err(ConfigError::Missing(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, dir).map_err(|e| match e {
            ConfigError::Syntax { message, .. } => ConfigError::Syntax {
                path: path.to_path_buf(),
                message,
            },
            e => e,
        })
    }

    /// Parse `text`, resolving relative paths against `dir`.
    pub fn from_toml(text: &str, dir: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
            path: PathBuf::new(),
            message: e.to_string(),
        })?;
        let abs = |p: PathBuf| if p.is_absolute() { p } else { dir.join(p) };
        let pr = raw.pagerank.unwrap_or(RawPageRank {
            damping: d_damping(),
            tolerance: d_tolerance(),
            max_iterations: d_iterations(),
            undirected: false,
        });
        let mut oracle = raw.oracle;
        oracle.stub_path = oracle.stub_path.map(abs);
        let cfg = PipelineConfig {
            vault_root: raw.vault_root.map(abs),
            schema_path: raw.schema_path.map(abs),
            xml_path: raw.xml_path.map(abs),
            base_iri: raw.base_iri.unwrap_or_else(|| DEFAULT_BASE_IRI.to_string()),
            output_dir: abs(raw.output_dir.unwrap_or_else(|| PathBuf::from("out"))),
            ground_truth_path: raw.ground_truth_path.map(abs),
            oracle,
            blocking: BlockingConfig {
                token_overlap: raw.blocking.token_overlap,
            },
            pagerank: PageRankParams {
                damping: pr.damping,
                tolerance: pr.tolerance,
                max_iterations: pr.max_iterations,
                undirected: pr.undirected,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.pagerank.damping > 0.0 && self.pagerank.damping < 1.0) {
            return bad(format!(
                "pagerank.damping must be in (0,1), got {}",
                self.pagerank.damping
            ));
        }
        if self.pagerank.tolerance.is_nan() || self.pagerank.tolerance <= 0.0 {
            return bad("pagerank.tolerance must be positive".into());
        }
        if self.base_iri.is_empty() || self.base_iri.contains('#') || !self.base_iri.contains(':') {
            return bad(format!(
                "base_iri {:?} must be an absolute IRI without '#'",
                self.base_iri
            ));
        }
        if self.oracle.max_parallel == 0 {
            return bad("oracle.max_parallel must be at least 1".into());
        }
        if self.oracle.timeout_seconds.is_nan() || self.oracle.timeout_seconds <= 0.0 {
            return bad("oracle.timeout_seconds must be positive".into());
        }
        if self.oracle.backoff_seconds < 0.0 {
            return bad("oracle.backoff_seconds must not be negative".into());
        }
        if self.oracle.price_per_call.is_some_and(|p| p < 0.0) {
            return bad("oracle.price_per_call must not be negative".into());
        }
        if self.oracle.kind == OracleKind::Http && self.oracle.endpoint.is_none() {
            return bad("oracle.endpoint is required when oracle.kind = \"http\"".into());
        }
        Ok(())
    }

    pub fn require<'a, T>(value: &'a Option<T>, key: &'static str) -> Result<&'a T, ConfigError> {
        value.as_ref().ok_or(ConfigError::MissingKey(key))
    }
}
