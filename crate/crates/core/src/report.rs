//! CSV and text output. Headers and column order are fixed; reals are
//! written with 9 significant digits (C `%.9g` style).

use std::io::{self, Write};

use crate::bounds::{BoundReport, MinTerm};
use crate::env::Scenario;
use crate::harness::{CurveStats, ExperimentResult, RegretTrace, SweepResult};

pub const TRACE_HEADER: &str = "realization,episode,t,arm,reward,instant_regret,cumulative_regret";
pub const SWEEP_HEADER: &str = "axis_value,policy,mean_final_regret,std_final_regret,R";
pub const PLOT_HEADER: &str = "axis_value,policy,epsilon,mean_regret,std_regret";
pub const SUMMARY_HEADER: &str = "policy,mean_final_regret,std_final_regret,R";
pub const CURVE_HEADER: &str = "t,mean_cumulative_regret,std_cumulative_regret";
pub const BOUNDS_HEADER: &str =
    "label,K,J,n,epsilon,alpha,nt_bound,ast_bound,ast_valid,crossover_episode";

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` with 9 significant digits, fixed or scientific as `%.9g` would choose.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let fixed = format!("{:.*}", (8 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    }
}

/// One row per step. `episode` and `t` are 1-based, `arm` is 0-based.
pub fn write_trace_csv<W: Write + ?Sized>(out: &mut W, traces: &[RegretTrace]) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for trace in traces {
        let n = trace.episode_length;
        for (i, (pull, cum)) in trace.pulls.iter().zip(&trace.cumulative_regret).enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                trace.realization,
                i / n + 1,
                i + 1,
                pull.arm,
                fmt_sig9(pull.reward),
                fmt_sig9(pull.instant_regret),
                fmt_sig9(*cum)
            )?;
        }
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write + ?Sized>(out: &mut W, sweep: &SweepResult) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    write_sweep_rows(out, sweep)
}

/// Sweep rows without the header, for concatenating several sweeps.
pub fn write_sweep_rows<W: Write + ?Sized>(out: &mut W, sweep: &SweepResult) -> io::Result<()> {
    for (i, value) in sweep.grid.iter().enumerate() {
        for (p, policy) in sweep.policies.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_sig9(*value),
                policy.label(),
                fmt_sig9(sweep.mean_regret[i][p]),
                fmt_sig9(sweep.std_regret[i][p]),
                sweep.num_realizations
            )?;
        }
    }
    Ok(())
}

/// Plot-ready rows for a family of sweeps, one sweep per `epsilon`.
pub fn write_plot_csv<W: Write + ?Sized>(out: &mut W, sweeps: &[(f64, SweepResult)]) -> io::Result<()> {
    writeln!(out, "{PLOT_HEADER}")?;
    for (epsilon, sweep) in sweeps {
        for (i, value) in sweep.grid.iter().enumerate() {
            for (p, policy) in sweep.policies.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_sig9(*value),
                    policy.label(),
                    fmt_sig9(*epsilon),
                    fmt_sig9(sweep.mean_regret[i][p]),
                    fmt_sig9(sweep.std_regret[i][p])
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_summary_csv<W: Write + ?Sized>(out: &mut W, result: &ExperimentResult) -> io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for p in &result.policies {
        writeln!(
            out,
            "{},{},{},{}",
            p.config.kind.label(),
            fmt_sig9(p.mean_final),
            fmt_sig9(p.std_final),
            result.num_realizations()
        )?;
    }
    Ok(())
}

pub fn write_curve_csv<W: Write + ?Sized>(out: &mut W, curve: &CurveStats) -> io::Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    for (t, (m, s)) in curve.mean.iter().zip(&curve.std).enumerate() {
        writeln!(out, "{},{},{}", t + 1, fmt_sig9(*m), fmt_sig9(*s))?;
    }
    Ok(())
}

fn crossover_field(c: Option<usize>) -> String {
    c.map_or_else(|| "none".to_string(), |j| j.to_string())
}

/// One CSV row (no header) describing a bound report.
pub fn bounds_csv_row(label: &str, scenario: &Scenario, num_episodes: usize, report: &BoundReport) -> String {
    format!(
        "{label},{},{},{},{},{},{},{},{},{}",
        scenario.num_arms(),
        num_episodes,
        scenario.episode_length,
        fmt_sig9(scenario.epsilon),
        fmt_sig9(scenario.alpha),
        fmt_sig9(report.nt_bound),
        fmt_sig9(report.ast_bound),
        report.ast_valid,
        crossover_field(report.crossover_episode)
    )
}

/// Human-readable report block.
pub fn write_bounds_text<W: Write + ?Sized>(
    out: &mut W,
    label: &str,
    scenario: &Scenario,
    num_episodes: usize,
    report: &BoundReport,
) -> io::Result<()> {
    writeln!(out, "== {label} ==")?;
    writeln!(
        out,
        "K = {}, J = {}, n = {}, epsilon = {}, alpha = {}",
        scenario.num_arms(),
        num_episodes,
        scenario.episode_length,
        fmt_sig9(scenario.epsilon),
        fmt_sig9(scenario.alpha)
    )?;
    writeln!(out, "NT-UCB bound:  {}", fmt_sig9(report.nt_bound))?;
    let validity = if report.ast_valid {
        "valid"
    } else {
        "NOT VALID: epsilon >= min gap / 2"
    };
    writeln!(out, "AST-UCB bound: {} ({validity})", fmt_sig9(report.ast_bound))?;
    writeln!(
        out,
        "crossover episode: {}",
        crossover_field(report.crossover_episode)
    )?;
    writeln!(out, "arm  A            B            C            min term")?;
    for (k, t) in report.arms.iter().enumerate() {
        let b = t.b.map_or_else(|| "n/a".to_string(), fmt_sig9);
        let term = match t.selector {
            MinTerm::PerEpisodeSum => "per-episode sum",
            MinTerm::TransferTerm => "transfer",
        };
        writeln!(
            out,
            "{k:<4} {:<12} {b:<12} {:<12} {term}",
            fmt_sig9(t.a),
            fmt_sig9(t.c)
        )?;
    }
    writeln!(out)
}
