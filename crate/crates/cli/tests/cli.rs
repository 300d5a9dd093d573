use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ast_ucb(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ast-ucb"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn run_writes_traces_curves_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = ast_ucb(
        &[
            "run", "--midpoints", "0.35,0.7,0.3,0.4", "--episodes", "3",
            "--episode-length", "40", "--epsilon", "0.05", "--realizations", "3",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let trace = lines(&dir.path().join("trace_nt.csv"));
    assert_eq!(trace[0], "realization,episode,t,arm,reward,instant_regret,cumulative_regret");
    assert_eq!(trace.len(), 1 + 3 * 3 * 40);
    assert!(trace.last().unwrap().starts_with("2,3,120,"));

    let curve = lines(&dir.path().join("curve_ast.csv"));
    assert_eq!(curve[0], "t,mean_cumulative_regret,std_cumulative_regret");
    assert_eq!(curve.len(), 1 + 120);

    let summary = lines(&dir.path().join("summary.csv"));
    assert_eq!(summary[0], "policy,mean_final_regret,std_final_regret,R");
    assert!(summary[1].starts_with("nt,") && summary[1].ends_with(",3"));
    assert!(summary[2].starts_with("ast,"));

    // the final cumulative regret of the curve is the summary mean
    let curve_last: Vec<&str> = curve.last().unwrap().split(',').collect();
    let summary_ast: Vec<&str> = summary[2].split(',').collect();
    assert_eq!(curve_last[1], summary_ast[1]);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("case.toml");
    fs::write(
        &cfg,
        "K = 2\nJ = 2\nn = 30\nepsilon = 0.1\nmidpoints = [0.3, 0.6]\nbase_seed = 5\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = ast_ucb(
        &["run", "--config", cfg.to_str().unwrap(), "--episodes", "4", "--no-traces", "--realizations", "2"],
        &out_dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written = fs::read_to_string(out_dir.join("scenario.toml")).unwrap();
    assert!(written.contains("J = 4"));
    assert!(written.contains("base_seed = 5"));
    assert!(!out_dir.join("trace_nt.csv").exists());
    assert_eq!(lines(&out_dir.join("curve_nt.csv")).len(), 1 + 4 * 30);
}

#[test]
fn sweep_skips_invalid_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = ast_ucb(
        &[
            "sweep", "--midpoints", "0.4,0.6,0.5", "--episodes", "2", "--episode-length", "50",
            "--epsilon", "0.1", "--axis", "n", "--grid", "2,20,40", "--realizations", "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped n = 2"));
    let rows = lines(&dir.path().join("sweep.csv"));
    assert_eq!(rows[0], "axis_value,policy,mean_final_regret,std_final_regret,R");
    assert_eq!(rows.len(), 1 + 2 * 2);
    assert!(rows[1].starts_with("20,nt,"));
}

#[test]
fn bounds_report_for_constant_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = ast_ucb(
        &[
            "bounds", "--midpoints", "0.9,0.7", "--episodes", "1", "--episode-length", "100",
            "--epsilon", "0.05", "--realizations", "1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let rows = lines(&dir.path().join("bounds.csv"));
    assert_eq!(rows[0], "label,K,J,n,epsilon,alpha,nt_bound,ast_bound,ast_valid,crossover_episode");
    assert_eq!(rows[1], "midpoint,2,1,100,0.05,2,92.7034037,93.1034037,true,none");
    assert!(rows[2].starts_with("realization-0,2,1,100,"));
    let text = fs::read_to_string(dir.path().join("bounds.txt")).unwrap();
    assert!(text.contains("NT-UCB bound:  92.7034037"));
}

#[test]
fn invalid_input_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = ast_ucb(&["run", "--episodes", "2", "--episode-length", "10", "--epsilon", "0.1"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("--midpoints"));

    let alpha = ast_ucb(
        &["run", "--midpoints", "0.2,0.4", "--episodes", "2", "--episode-length", "10", "--epsilon", "0.1", "--alpha", "1"],
        dir.path(),
    );
    assert_eq!(alpha.status.code(), Some(2));

    let short = ast_ucb(
        &["run", "--midpoints", "0.2,0.4,0.6", "--episodes", "2", "--episode-length", "2", "--epsilon", "0.1"],
        dir.path(),
    );
    assert_eq!(short.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&short.stderr).contains("--episode-length"));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none(), "nothing written on error");
}

#[test]
fn help_exits_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_ast-ucb")).arg("--help").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("reproduce-fig3"));
}

#[test]
fn reproduce_fig3_writes_both_axes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ast_ucb(
        &[
            "reproduce-fig3", "--realizations", "2", "--n-grid", "40,80", "--j-grid", "2,3",
            "--eps-grid", "0.05,0.5", "--episodes", "2", "--episode-length", "40",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plot = lines(&dir.path().join("fig3_J_plot.csv"));
    assert_eq!(plot[0], "axis_value,policy,epsilon,mean_regret,std_regret");
    assert_eq!(plot.len(), 1 + 2 * 2 * 2);
    assert!(plot.iter().any(|l| l.starts_with("3,ast,0.5,")));
    let sweep = lines(&dir.path().join("fig3_n_sweep.csv"));
    assert_eq!(sweep[0], "axis_value,policy,mean_final_regret,std_final_regret,R");
    assert_eq!(sweep.len(), 1 + 2 * 2 * 2);
}
