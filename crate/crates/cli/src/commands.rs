use std::path::{Path, PathBuf};

use dqd_core::{evaluate_point, point_trajectories, run_sweep, Engine, SweepRow, Trajectory};
use serde_json::Value;

use crate::config::{Format, RunConfig, Subcommand};
use crate::error::CliError;
use crate::output::{json_number, trajectory_table, Table};

/// One output document. `path: None` means standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

pub fn execute(run: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    match run.subcommand {
        Subcommand::Spectral => spectral(run),
        Subcommand::Evolve => evolve(run),
        Subcommand::T2 => t2(run),
        Subcommand::Sweep => sweep(run),
    }
}

pub fn write_artifacts(artifacts: &[Artifact]) -> Result<(), CliError> {
    use std::io::Write;
    for artifact in artifacts {
        match &artifact.path {
            Some(path) => {
                std::fs::write(path, &artifact.contents).map_err(|e| CliError::io(path, e))?
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(artifact.contents.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::io("<stdout>", e))?;
            }
        }
    }
    Ok(())
}

fn single(run: &RunConfig, table: Table) -> Vec<Artifact> {
    vec![Artifact {
        path: run.out_path().map(Path::to_path_buf),
        contents: table.render(run.format(), run),
    }]
}

fn spectral(run: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let bath = &run.file.bath;
    let mut table = Table::new(["omega", "J"]);
    for omega in run.spectral_grid()? {
        table.push(vec![Some(omega), Some(bath.spectral_density(omega)?)]);
    }
    Ok(single(run, table))
}

fn point_table(
    closed_form: Option<&Trajectory>,
    numeric: Option<&Trajectory>,
    max_abs_diff: Option<f64>,
) -> Table {
    match (closed_form, numeric) {
        (Some(cf), num @ Some(_)) => trajectory_table(cf, num, max_abs_diff),
        (Some(only), None) | (None, Some(only)) => trajectory_table(only, None, None),
        (None, None) => unreachable!("every engine produces a trajectory"),
    }
}

fn evolve(run: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let traj = point_trajectories(&run.point()?, &run.time_grid()?, run.engine())?;
    let diff = traj.max_abs_diff()?;
    let table = point_table(traj.closed_form.as_ref(), traj.numeric.as_ref(), diff);
    Ok(single(run, table))
}

const SUMMARY_COLUMNS: [&str; 8] = [
    "tunneling",
    "temperature_k",
    "omega_21",
    "n_occ",
    "chi",
    "t2_analytic",
    "t2_empirical",
    "max_abs_diff",
];

fn t2(run: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let point = run.point()?;
    let outcome = evaluate_point(&point, &run.time_grid()?, run.engine())?;
    let mut table = Table::new(SUMMARY_COLUMNS);
    table.push(vec![
        Some(point.qubit.resolve()?.tunneling),
        Some(point.temperature),
        Some(outcome.rate.omega_21),
        Some(outcome.rate.n_occ),
        Some(outcome.rate.chi),
        Some(outcome.t2_analytic),
        outcome.t2_empirical,
        outcome.max_abs_diff,
    ]);
    Ok(single(run, table))
}

/// Summary table for sweep rows. `values` are the swept values as written in
/// the config (temperatures in mK); rows are a prefix of them in input order.
pub fn sweep_table(run: &RunConfig, rows: &[SweepRow]) -> Table {
    let sweep = run
        .file
        .sweep
        .as_ref()
        .expect("sweep runs carry a sweep block");
    let name = serde_json::to_value(sweep.parameter)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default();
    let mut columns = vec![name];
    columns.extend(SUMMARY_COLUMNS.iter().map(|c| c.to_string()));
    let mut table = Table::new(columns);
    for (value, row) in sweep.values.iter().zip(rows) {
        table.push(vec![
            Some(*value),
            Some(row.tunneling),
            Some(row.temperature),
            Some(row.omega_21),
            Some(row.n_occ),
            Some(row.chi),
            Some(row.t2_analytic),
            row.t2_empirical,
            row.max_abs_diff,
        ]);
    }
    table
}

/// `<dir>/<stem>_<param>_<idx>.<ext>` next to the summary file.
pub fn trajectory_path(out: &Path, parameter: &str, index: usize, format: Format) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    out.with_file_name(format!("{stem}_{parameter}_{index}.{ext}"))
}

fn sweep(run: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let spec = run.sweep_spec()?;
    let result = run_sweep(&spec)?;
    let mut table = sweep_table(run, &result.rows);
    let mut artifacts = Vec::new();

    if let Some(out) = run.out_path() {
        let parameter = table.columns[0].clone();
        let mut names = Vec::new();
        for (index, row) in result.rows.iter().enumerate() {
            let path = trajectory_path(out, &parameter, index, run.format());
            let traj = point_table(
                row.closed_form.as_ref(),
                row.numeric.as_ref(),
                match spec.engine {
                    Engine::Both => row.max_abs_diff,
                    _ => None,
                },
            );
            names.push(Value::String(
                path.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            ));
            artifacts.push(Artifact {
                path: Some(path),
                contents: traj.render(run.format(), run),
            });
        }
        if run.format() == Format::Json {
            table
                .footer
                .push(("trajectory_files".into(), Value::Array(names)));
        }
    }

    let worst = result
        .rows
        .iter()
        .filter_map(|r| r.max_abs_diff)
        .fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |a| a.max(d)))
        });
    if let Some(d) = worst {
        table.footer.push(("max_abs_diff".into(), json_number(d)));
    }

    artifacts.insert(
        0,
        Artifact {
            path: run.out_path().map(Path::to_path_buf),
            contents: table.render(run.format(), run),
        },
    );
    Ok(artifacts)
}
