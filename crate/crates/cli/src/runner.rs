use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::experiments::{execute, PointError};

pub const OUTPUT_ENV: &str = "MIPT_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "mipt-output";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("config does not parse: {0}")]
    Parse(String),
    #[error("config is invalid: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Parse(_) | RunError::Validation(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable report written to stderr.
    pub fn report(&self) -> serde_json::Value {
        let (kind, errors) = match self {
            RunError::Parse(e) => ("parse", vec![e.clone()]),
            RunError::Validation(v) => ("validation", v.clone()),
            RunError::Read { .. } | RunError::Write { .. } => ("io", vec![self.to_string()]),
            RunError::Pool(e) => ("runtime", vec![e.clone()]),
        };
        serde_json::json!({ "status": "error", "kind": kind, "errors": errors })
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub emit_plot_script: bool,
}

#[derive(Debug, Serialize)]
struct Versions {
    mipt_cli: &'static str,
    mipt_core: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub status: String,
    pub config_sha256: String,
    config: ExperimentConfig,
    versions: Versions,
    pub workers: usize,
    pub wall_time_seconds: f64,
    pub files: Vec<String>,
    pub point_errors: Vec<PointError>,
}

#[derive(Debug)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
}

impl RunReport {
    /// 0 when every grid point succeeded, 3 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.manifest.point_errors.is_empty() {
            0
        } else {
            3
        }
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, RunError> {
    serde_json::from_str(text).map_err(|e| RunError::Parse(e.to_string()))
}

/// SHA-256 of the canonical serialization, ignoring the output location.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = ExperimentConfig { output: None, ..cfg.clone() };
    let bytes = serde_json::to_vec(&canonical).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

pub fn run_file(path: &Path, opts: &RunOptions) -> Result<RunReport, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Read { path: path.into(), source })?;
    run_config(parse_config(&text)?, opts)
}

pub fn run_config(cfg: ExperimentConfig, opts: &RunOptions) -> Result<RunReport, RunError> {
    let errs = cfg.validate();
    if !errs.is_empty() {
        return Err(RunError::Validation(errs));
    }
    if opts.workers == Some(0) {
        return Err(RunError::Validation(vec!["--workers must be >= 1".into()]));
    }
    let hash = config_hash(&cfg);
    let dir = output_dir(&cfg);
    std::fs::create_dir_all(&dir).map_err(|source| RunError::Write { path: dir.clone(), source })?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| RunError::Pool(e.to_string()))?;
    let start = Instant::now();
    let outcome = pool.install(|| execute(&cfg));
    let wall = start.elapsed().as_secs_f64();

    let name = cfg.experiment.name();
    let mut files = Vec::new();
    for table in &outcome.tables {
        let file = table.write(&dir, name, &hash).map_err(|source| RunError::Write { path: dir.join(table.file_name()), source })?;
        files.push(file);
        if opts.emit_plot_script {
            if let Some(script) = table.plot_script() {
                let file = format!("{}_plot.py", table.name);
                std::fs::write(dir.join(&file), script).map_err(|source| RunError::Write { path: dir.join(&file), source })?;
                files.push(file);
            }
        }
    }
    let manifest = Manifest {
        experiment: name.into(),
        status: if outcome.errors.is_empty() { "ok".into() } else { "partial_failure".into() },
        config_sha256: hash,
        config: cfg,
        versions: Versions { mipt_cli: env!("CARGO_PKG_VERSION"), mipt_core: mipt_core::VERSION },
        workers: pool.current_num_threads(),
        wall_time_seconds: wall,
        files,
        point_errors: outcome.errors,
    };
    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, json + "\n").map_err(|source| RunError::Write { path: manifest_path, source })?;
    Ok(RunReport { output_dir: dir, manifest })
}
