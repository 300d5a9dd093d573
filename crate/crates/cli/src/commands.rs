//! Subcommand execution. Every command computes its results in memory first
//! and only then writes files, so a failure leaves no partial output.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use ast_ucb::bounds::{gap_summary, BoundReport};
use ast_ucb::harness::{realized_means, run_experiment, run_traces, PolicySummary};
use ast_ucb::report::{
    bounds_csv_row, write_bounds_text, write_curve_csv, write_summary_csv, write_sweep_csv,
    write_trace_csv, BOUNDS_HEADER,
};
use ast_ucb::{
    sweep, EpisodeMeans, ExperimentResult, PolicyConfig, PolicyKind, Scenario, ScenarioFile,
    SweepAxis,
};

use crate::args::{Action, CliCommand};
use crate::error::CliError;
use crate::output::{write_outputs, Output};
use crate::reproduce::{case_outputs, run_case, ReproduceOptions};

/// Run `cmd` on a pool of `cmd.jobs` threads and write its outputs.
pub fn execute(cmd: &CliCommand) -> Result<Vec<PathBuf>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cmd.jobs.unwrap_or(0))
        .build()?;
    let outputs = pool.install(|| compute(cmd))?;
    write_outputs(&cmd.out_dir, &outputs)
}

/// Results of `cmd` as named outputs, nothing written yet.
pub fn compute(cmd: &CliCommand) -> Result<Vec<Output>, CliError> {
    let r = cmd.realizations;
    match &cmd.action {
        Action::Run {
            scenario,
            policies,
            traces,
        } => run_outputs(scenario, policies, r, *traces),
        Action::Sweep {
            scenario,
            policies,
            axis,
            grid,
        } => sweep_outputs(scenario, policies, *axis, grid, r),
        Action::Bounds { scenario } => {
            let realized: Vec<(String, Vec<EpisodeMeans>)> = (0..r as u64)
                .map(|i| (format!("realization-{i}"), realized_means(scenario, i)))
                .collect();
            Ok(bound_outputs(scenario, &realized))
        }
        Action::Reproduce(opts) => reproduce_outputs(opts, r),
    }
}

fn configs_for(scenario: &Scenario, policies: &[PolicyKind]) -> Result<Vec<PolicyConfig>, CliError> {
    policies
        .iter()
        .map(|&k| PolicyConfig::new(k, scenario.alpha, scenario.epsilon).map_err(CliError::from))
        .collect()
}

fn run_outputs(
    scenario: &Scenario,
    policies: &[PolicyKind],
    realizations: usize,
    traces: bool,
) -> Result<Vec<Output>, CliError> {
    let configs = configs_for(scenario, policies)?;
    let mut outputs = Vec::new();
    let result = if traces {
        let mut summaries = Vec::new();
        for config in &configs {
            let runs = Arc::new(run_traces(scenario, config, realizations)?);
            summaries.push(PolicySummary::from_traces(*config, &runs));
            outputs.push(Output::new(
                format!("trace_{}.csv", config.kind.label()),
                move |w| write_trace_csv(w, &runs),
            ));
        }
        ExperimentResult {
            realizations: (0..realizations as u64).collect(),
            policies: summaries,
        }
    } else {
        run_experiment(scenario, &configs, realizations, true)?
    };
    for p in &result.policies {
        let curve = p.curve.clone().expect("curves requested");
        outputs.push(Output::new(
            format!("curve_{}.csv", p.config.kind.label()),
            move |w| write_curve_csv(w, &curve),
        ));
    }
    let toml = ScenarioFile::from(scenario).to_toml();
    outputs.push(Output::new("scenario.toml", move |w| w.write_all(toml.as_bytes())));
    outputs.push(Output::new("summary.csv", move |w| write_summary_csv(w, &result)));
    Ok(outputs)
}

fn sweep_outputs(
    scenario: &Scenario,
    policies: &[PolicyKind],
    axis: SweepAxis,
    grid: &[f64],
    realizations: usize,
) -> Result<Vec<Output>, CliError> {
    let result = sweep(scenario, axis, grid, policies, realizations, false)?;
    for s in &result.skipped {
        eprintln!("warning: skipped {} = {}: {}", axis.label(), s.value, s.reason);
    }
    Ok(vec![Output::new("sweep.csv", move |w| write_sweep_csv(w, &result))])
}

/// `bounds.csv` (one row per labelled mean sequence plus the midpoint row) and
/// the readable `bounds.txt`.
pub fn bound_outputs(scenario: &Scenario, realized: &[(String, Vec<EpisodeMeans>)]) -> Vec<Output> {
    let midpoint = vec![scenario.midpoint_means(); scenario.num_episodes];
    let mut rows: Vec<(String, usize, BoundReport)> = vec![(
        "midpoint".to_string(),
        midpoint.len(),
        BoundReport::evaluate(&gap_summary(&midpoint, scenario)),
    )];
    rows.extend(realized.iter().map(|(label, means)| {
        (
            label.clone(),
            means.len(),
            BoundReport::evaluate(&gap_summary(means, scenario)),
        )
    }));
    let rows = Arc::new(rows);
    let (csv_rows, text_rows) = (rows.clone(), rows);
    let (csv_scenario, text_scenario) = (scenario.clone(), scenario.clone());
    vec![
        Output::new("bounds.csv", move |w| {
            writeln!(w, "{BOUNDS_HEADER}")?;
            for (label, j, report) in csv_rows.iter() {
                writeln!(w, "{}", bounds_csv_row(label, &csv_scenario, *j, report))?;
            }
            Ok(())
        }),
        Output::new("bounds.txt", move |w| {
            for (label, j, report) in text_rows.iter() {
                write_bounds_text(w, label, &text_scenario, *j, report)?;
            }
            Ok(())
        }),
    ]
}

/// Evaluate and write the bound report for `scenario` and the given realized means.
pub fn emit_bound_report(
    scenario: &Scenario,
    realized: &[(String, Vec<EpisodeMeans>)],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    write_outputs(out_dir, &bound_outputs(scenario, realized))
}

fn reproduce_outputs(opts: &ReproduceOptions, realizations: usize) -> Result<Vec<Output>, CliError> {
    let mut outputs = Vec::new();
    for &axis in &opts.axes {
        let result = run_case(opts, axis, realizations)?;
        outputs.extend(case_outputs(opts, &result));
    }
    Ok(outputs)
}

/// Run one reference case along one axis and write its CSVs into `out_dir`.
pub fn reproduce_case(
    opts: &ReproduceOptions,
    axis: crate::reproduce::ReproAxis,
    realizations: usize,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let result = run_case(opts, axis, realizations)?;
    write_outputs(out_dir, &case_outputs(opts, &result))
}
