//! Experiment runner for the interacting-walk library: each subcommand runs
//! one computation and writes its result with the resolved configuration.

pub mod angle;
pub mod config;
pub mod experiments;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};

pub use config::{Experiment, Format};
pub use experiments::Report;

/// A JSON result file: the resolved configuration and the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub config: Experiment,
    pub result: Report,
}

/// Sidecar that carries the configuration of a CSV result.
pub fn config_sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Resolves defaults, runs the experiment and writes its output.
pub fn execute(experiment: Experiment) -> Result<()> {
    let config = experiment.resolve();
    let report = experiments::run(&config)?;
    let format = config.output().format.expect("resolved");
    let path = config.output().path.clone();
    let body = match format {
        Format::Json => to_json(&Output { config: config.clone(), result: report })?,
        Format::Csv => report
            .table()
            .ok_or_else(|| anyhow!("--format csv is not available for this experiment; use json"))?
            .render(),
    };
    match &path {
        Some(p) => {
            fs::write(p, &body).with_context(|| format!("cannot write --output {}", p.display()))?;
            if format == Format::Csv {
                let side = config_sidecar(p);
                fs::write(&side, to_json(&config)?).with_context(|| format!("cannot write {}", side.display()))?;
            }
        }
        None => {
            std::io::stdout().lock().write_all(body.as_bytes())?;
            if format == Format::Csv {
                std::io::stderr().lock().write_all(to_json(&config)?.as_bytes())?;
            }
        }
    }
    Ok(())
}
