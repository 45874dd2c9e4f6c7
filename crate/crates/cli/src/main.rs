//! `bisqueeze` command-line front end.
//!
//! Exit codes: 0 when every task passes, 2 when some task is flagged and none
//! fails, 1 on any failure or usage error.

mod config;
mod tasks;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bisqueeze::deformations::DeformationModel;
use bisqueeze::export::{to_json, Cell, Table};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use config::RunConfig;
use tasks::{run_task, Status, TaskOutcome};

#[derive(Parser, Debug)]
#[command(name = "bisqueeze", version, about = "Pseudo-bosonic bi-squeezed state verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fock truncation; overrides `dim` in the config.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Run independent tasks (and scan points) in parallel.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every task in a config.
    Run { config: PathBuf },
    /// Re-run a config over values of one scalar parameter.
    Scan {
        config: PathBuf,
        /// One of nu, r, theta, t, lambda, omega.
        #[arg(long)]
        axis: String,
        /// Comma-separated list, or `start:stop:count`.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
}

#[derive(Serialize)]
struct TaskEntry<'a> {
    index: usize,
    task: &'a str,
    identity: &'a str,
    status: Status,
    error: Option<&'a str>,
    files: Vec<String>,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct RunReport<'a> {
    model: &'a bisqueeze::deformations::ModelSpec,
    dim: usize,
    status: Status,
    tasks: Vec<TaskEntry<'a>>,
    wall_time_s: f64,
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Pass => 0,
        Status::Flagged => 2,
        Status::Fail => 1,
    }
}

fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn load(path: &Path, cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(dim) = cli.dim {
        cfg.dim = dim;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Builds the model and runs each task, keeping declared order.
fn execute(cfg: &RunConfig, parallel: bool) -> Vec<(TaskOutcome, f64)> {
    let model: std::result::Result<DeformationModel, String> =
        cfg.model_spec().build(cfg.dim).map_err(|e| format!("model construction failed: {e}"));
    let one = |task: &config::TaskSpec| {
        let start = Instant::now();
        let outcome = match &model {
            Ok(m) => run_task(m, task, &cfg.tolerances),
            Err(e) => TaskOutcome::failed(task.name(), e.clone()),
        };
        (outcome, start.elapsed().as_secs_f64())
    };
    if parallel {
        cfg.tasks.par_iter().map(one).collect()
    } else {
        cfg.tasks.iter().map(one).collect()
    }
}

fn overall(outcomes: impl IntoIterator<Item = Status>) -> Status {
    outcomes.into_iter().max().unwrap_or(Status::Pass)
}

fn run(config: &Path, cli: &Cli) -> Result<Status> {
    let start = Instant::now();
    let cfg = load(config, cli)?;
    fs::create_dir_all(&cfg.output_dir).with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let outcomes = execute(&cfg, cli.parallel);
    let mut entries = Vec::with_capacity(outcomes.len());
    for (index, (outcome, wall)) in outcomes.iter().enumerate() {
        let stem = format!("{index:02}_{}", outcome.task);
        let mut files = Vec::new();
        if let Some(table) = &outcome.table {
            let name = format!("{stem}.csv");
            write_atomic(&cfg.output_dir.join(&name), &table.to_csv_string()?)?;
            files.push(name);
        }
        let name = format!("{stem}.json");
        write_atomic(&cfg.output_dir.join(&name), &to_json(outcome)?)?;
        files.push(name);
        println!(
            "{:<9} {:<8} {}",
            outcome.task,
            format!("{:?}", outcome.status).to_lowercase(),
            outcome.error.as_deref().unwrap_or(outcome.identity.as_str())
        );
        entries.push(TaskEntry {
            index,
            task: &outcome.task,
            identity: &outcome.identity,
            status: outcome.status,
            error: outcome.error.as_deref(),
            files,
            wall_time_s: *wall,
        });
    }
    let status = overall(outcomes.iter().map(|(o, _)| o.status));
    let report = RunReport { model: &cfg.model, dim: cfg.dim, status, tasks: entries, wall_time_s: start.elapsed().as_secs_f64() };
    write_atomic(&cfg.output_dir.join("report.json"), &to_json(&report)?)?;
    Ok(status)
}

fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let parse = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad value '{s}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (parse(start)?, parse(stop)?);
            let n: usize = count.trim().parse().with_context(|| format!("bad count '{count}'"))?;
            match n {
                0 => bail!("count must be positive"),
                1 => vec![a],
                _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
            }
        }
        [_] => spec.split(',').map(parse).collect::<Result<_>>()?,
        _ => bail!("values must be a comma list or start:stop:count"),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        bail!("values must be finite and non-empty");
    }
    Ok(values)
}

#[derive(Serialize)]
struct ScanPoint<'a> {
    value: f64,
    tasks: Vec<ScanTask<'a>>,
}

#[derive(Serialize)]
struct ScanTask<'a> {
    task: &'a str,
    identity: &'a str,
    status: Status,
    error: Option<&'a str>,
}

fn scan(config: &Path, axis: &str, values: &str, cli: &Cli) -> Result<Status> {
    let cfg = load(config, cli)?;
    let values = parse_values(values)?;
    let configs = values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            if !c.set_axis(axis, v) {
                bail!("axis '{axis}' is not a parameter of the configured model or tasks");
            }
            c.validate()?;
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(&cfg.output_dir).with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let points: Vec<Vec<TaskOutcome>> = if cli.parallel {
        configs.par_iter().map(|c| execute(c, false).into_iter().map(|(o, _)| o).collect()).collect()
    } else {
        configs.iter().map(|c| execute(c, false).into_iter().map(|(o, _)| o).collect()).collect()
    };

    // columns: per task, its status then the union of its scalar names in first-seen order
    let mut columns: Vec<Vec<String>> = vec![Vec::new(); cfg.tasks.len()];
    for point in &points {
        for (k, o) in point.iter().enumerate() {
            for (name, _) in &o.scalars {
                if !columns[k].contains(name) {
                    columns[k].push(name.clone());
                }
            }
        }
    }
    let mut header = vec![axis.to_string()];
    for (k, task) in cfg.tasks.iter().enumerate() {
        header.push(format!("{k:02}_{}.status", task.name()));
        header.extend(columns[k].iter().map(|n| format!("{k:02}_{}.{n}", task.name())));
    }
    let mut table = Table::new(header);
    for (value, point) in values.iter().zip(&points) {
        let mut row = vec![Cell::from(*value)];
        for (k, o) in point.iter().enumerate() {
            row.push(Cell::from(format!("{:?}", o.status).to_lowercase()));
            for name in &columns[k] {
                let v = o.scalars.iter().find(|(n, _)| n == name).map(|(_, v)| *v).unwrap_or(f64::NAN);
                row.push(v.into());
            }
        }
        table.push(row)?;
    }
    let stem = format!("scan_{axis}");
    write_atomic(&cfg.output_dir.join(format!("{stem}.csv")), &table.to_csv_string()?)?;
    let summary: Vec<ScanPoint> = values
        .iter()
        .zip(&points)
        .map(|(v, point)| ScanPoint {
            value: *v,
            tasks: point
                .iter()
                .map(|o| ScanTask { task: &o.task, identity: &o.identity, status: o.status, error: o.error.as_deref() })
                .collect(),
        })
        .collect();
    write_atomic(&cfg.output_dir.join(format!("{stem}.json")), &to_json(&summary)?)?;
    let status = overall(points.iter().flatten().map(|o| o.status));
    for (v, point) in values.iter().zip(&points) {
        let worst = overall(point.iter().map(|o| o.status));
        println!("{axis} = {v}: {}", format!("{worst:?}").to_lowercase());
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run { config } => run(config, &cli),
        Command::Scan { config, axis, values } => scan(config, axis, values, &cli),
    };
    match result {
        Ok(status) => ExitCode::from(exit_code(status)),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("0.1,0.2, 0.3").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_values("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_values("-1").unwrap(), vec![-1.0]);
        assert!(parse_values("a,b").is_err());
        assert!(parse_values("0:1:0").is_err());
        assert!(parse_values("1:2").is_err());
    }

    #[test]
    fn statuses_order_by_severity() {
        assert_eq!(overall([Status::Pass, Status::Flagged]), Status::Flagged);
        assert_eq!(overall([Status::Flagged, Status::Fail, Status::Pass]), Status::Fail);
        assert_eq!(exit_code(Status::Flagged), 2);
    }
}
