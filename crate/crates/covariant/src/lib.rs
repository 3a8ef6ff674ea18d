//! Command-line front end: scenario files in, JSON reports and CSV grids out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod output;
pub mod scenario;
pub mod tasks;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use covariant_core::interconversion::Verdict;
use serde_json::json;

use crate::output::{json_bytes, write_atomic};
use crate::scenario::{Format, Resolved};
use crate::tasks::{run_task, Outcome};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "COVARIANT_THREADS";

/// Exit code for an Infeasible verdict under `--fail-on-infeasible`.
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_ERROR: i32 = 1;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub scenario: PathBuf,
    /// Subcommand name; must match the scenario task when set.
    pub command: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub fail_on_infeasible: bool,
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct Report {
    pub outcome: Outcome,
    pub bytes: Vec<u8>,
    pub path: Option<PathBuf>,
    pub exit_code: i32,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            let n = v.trim().parse::<usize>().with_context(|| format!("{THREADS_ENV}={v} is not a thread count"))?;
            Ok(Some(n))
        }
        _ => Ok(None),
    }
}

/// Provenance header attached to every output.
pub fn provenance(r: &Resolved) -> serde_json::Value {
    json!({
        "toolkit": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "scenario_sha256": r.hash,
        "task": r.scenario.task.name(),
        "seed": r.scenario.seed,
        "tolerances": r.scenario.tolerances,
    })
}

fn infer_format(path: Option<&Path>) -> Format {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Json,
    }
}

/// Sidecar path holding the provenance of a CSV file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".provenance.json");
    PathBuf::from(s)
}

/// Loads, runs and serializes a scenario, writing files when a path is set.
pub fn execute(opts: &RunOptions) -> Result<Report> {
    let resolved = scenario::load(&opts.scenario, opts.seed)?;
    if let Some(cmd) = &opts.command {
        let task = resolved.scenario.task.name();
        if cmd != task {
            bail!("subcommand {cmd} does not match the scenario task {task}");
        }
    }
    let outcome = match thread_count(opts.threads)? {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().context("building the thread pool")?;
            pool.install(|| run_task(&resolved))?
        }
        None => run_task(&resolved)?,
    };
    let spec = resolved.scenario.output.clone().unwrap_or_default();
    let base = opts.scenario.parent().unwrap_or(Path::new(""));
    let path = match (&opts.out, &spec.path) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(p)) => Some(base.join(p)),
        (None, None) => None,
    };
    let format = opts.format.or(spec.format).unwrap_or_else(|| infer_format(path.as_deref()));
    let prov = provenance(&resolved);
    let bytes = match format {
        Format::Json => json_bytes(&json!({
            "provenance": prov,
            "result": outcome.result,
            "table": outcome.table.to_json(),
        })),
        Format::Csv => outcome.table.to_csv().into_bytes(),
    };
    if let Some(p) = &path {
        write_atomic(p, &bytes)?;
        if format == Format::Csv {
            write_atomic(&sidecar_path(p), &json_bytes(&prov))?;
        }
    }
    let exit_code = if opts.fail_on_infeasible && outcome.verdict == Some(Verdict::Infeasible) { EXIT_INFEASIBLE } else { 0 };
    Ok(Report { outcome, bytes, path, exit_code })
}
