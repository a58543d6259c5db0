//! Front end for `periodist-core`: reads a JSON job file, runs one command
//! and produces a deterministic JSON or CSV report.

mod commands;
mod error;
mod output;
mod spec;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub use error::CliError;
pub use output::{render, Format};
pub use spec::{parse_spec, Command, JobSpec, Params, DEFAULT_DIM, DEFAULT_WINDOW};

/// Values given on the command line that take precedence over the job file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub window: Option<u64>,
    pub epsilon: Option<f64>,
}

/// Rows for `--format csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: Command,
    /// `None` for commands without a pass/fail outcome.
    pub verdict: Option<bool>,
    pub result: Value,
    pub table: Option<Table>,
    /// The full JSON document, including the echo of the job.
    pub document: Value,
}

impl Report {
    /// 0 on success, 2 when the verdict is a failure.
    pub fn exit_code(&self) -> i32 {
        if self.verdict == Some(false) {
            2
        } else {
            0
        }
    }
}

pub(crate) struct Outcome {
    pub verdict: Option<bool>,
    pub result: Value,
    pub table: Option<Table>,
}

/// Runs `command` on `spec`. Relative sample files resolve against
/// `base_dir`.
pub fn run(
    command: Command,
    spec: &JobSpec,
    overrides: &Overrides,
    base_dir: &Path,
) -> Result<Report, CliError> {
    if let Some(c) = spec.command {
        if c != command {
            return Err(CliError::Input(format!(
                "job file is for `{}` but `{}` was requested",
                c.name(),
                command.name()
            )));
        }
    }
    let dim = spec.dim.unwrap_or(DEFAULT_DIM);
    if dim == 0 {
        return Err(CliError::Input("`dim` must be at least 1".into()));
    }
    let window = overrides.window.or(spec.window).unwrap_or(DEFAULT_WINDOW);
    let ctx = commands::Context {
        spec,
        dim,
        window,
        epsilon: overrides.epsilon.or(spec.params.epsilon),
        base_dir: base_dir.to_path_buf(),
    };
    let outcome = commands::dispatch(command, &ctx)?;
    let verdict = match outcome.verdict {
        Some(true) => json!("pass"),
        Some(false) => json!("fail"),
        None => Value::Null,
    };
    let mut doc = BTreeMap::new();
    doc.insert("command", json!(command.name()));
    doc.insert(
        "defaults",
        json!({ "window": DEFAULT_WINDOW, "dim": DEFAULT_DIM }),
    );
    doc.insert("window", json!(window));
    doc.insert("dim", json!(dim));
    doc.insert("job", serde_json::to_value(spec).map_err(|e| CliError::Input(e.to_string()))?);
    doc.insert("result", outcome.result.clone());
    doc.insert("verdict", verdict);
    Ok(Report {
        command,
        verdict: outcome.verdict,
        result: outcome.result,
        table: outcome.table,
        document: serde_json::to_value(doc).expect("report is plain JSON"),
    })
}

/// Reads and runs a job file.
pub fn run_file(command: Command, path: &Path, overrides: &Overrides) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let spec = parse_spec(&text, path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(PathBuf::new);
    run(command, &spec, overrides, &base)
}
