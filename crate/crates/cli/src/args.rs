//! Command-line grammar and resolution into a validated [`CliCommand`].

use std::ffi::OsString;
use std::path::PathBuf;

use ast_ucb::config::{ScenarioFile, DEFAULT_ALPHA};
use ast_ucb::env::DEFAULT_REWARD_WIDTH;
use ast_ucb::harness::DEFAULT_REALIZATIONS;
use ast_ucb::{PolicyKind, Scenario, SweepAxis};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::reproduce::{Case, ReproAxis, ReproduceOptions};

#[derive(Debug, Parser)]
#[command(name = "ast-ucb", version, about = "Episodic bandit regret experiments: NT-UCB vs AST-UCB")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run R realizations and write traces, regret curves and a summary.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = PolicyArg::Both)]
        policy: PolicyArg,
        /// Skip the per-step trace CSVs.
        #[arg(long)]
        no_traces: bool,
    },
    /// Vary one scenario parameter over a grid and write final-regret statistics.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = PolicyArg::Both)]
        policy: PolicyArg,
        /// Parameter to vary.
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Comma-separated, strictly increasing grid values.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_finite)]
        grid: Vec<f64>,
    },
    /// Evaluate both regret upper bounds on midpoint and realized means.
    Bounds {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Case I reference sweeps over the epsilon grid.
    #[command(name = "reproduce-fig2")]
    ReproduceFig2(ReproduceArgs),
    /// Case II reference sweeps over the epsilon grid.
    #[command(name = "reproduce-fig3")]
    ReproduceFig3(ReproduceArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Key-value scenario file (keys K, J, n, epsilon, midpoints, d, alpha, base_seed).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of arms K; must match the number of midpoints.
    #[arg(long, value_parser = parse_arms)]
    arms: Option<usize>,
    /// Number of episodes J.
    #[arg(long, value_parser = parse_positive)]
    episodes: Option<usize>,
    /// Steps per episode n (at least K).
    #[arg(long, value_parser = parse_positive)]
    episode_length: Option<usize>,
    /// Cross-episode drift bound, in (0, 1].
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: Option<f64>,
    /// Exploration exponent, > 1.
    #[arg(long, value_parser = parse_alpha)]
    alpha: Option<f64>,
    /// Reward distribution width d, in (0, 1].
    #[arg(long, value_parser = parse_width)]
    width: Option<f64>,
    /// Comma-separated seed-interval midpoints in [0, 1].
    #[arg(long, value_delimiter = ',', value_parser = parse_unit)]
    midpoints: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Realizations per data point.
    #[arg(long, default_value_t = DEFAULT_REALIZATIONS, value_parser = parse_positive)]
    realizations: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (defaults to available parallelism).
    #[arg(long, value_parser = parse_positive)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which axis to sweep.
    #[arg(long, value_enum, default_value_t = ReproAxisArg::Both)]
    axis: ReproAxisArg,
    /// Episode-length grid for the n axis.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    n_grid: Option<Vec<usize>>,
    /// Episode-count grid for the J axis.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    j_grid: Option<Vec<usize>>,
    /// Epsilon values, one curve family each.
    #[arg(long, value_delimiter = ',', value_parser = parse_epsilon)]
    eps_grid: Option<Vec<f64>>,
    /// J held fixed on the n axis.
    #[arg(long, value_parser = parse_positive)]
    episodes: Option<usize>,
    /// n held fixed on the J axis.
    #[arg(long, value_parser = parse_positive)]
    episode_length: Option<usize>,
    #[arg(long, value_parser = parse_alpha)]
    alpha: Option<f64>,
    #[arg(long, value_parser = parse_width)]
    width: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Nt,
    Ast,
    Both,
}

impl PolicyArg {
    fn kinds(self) -> Vec<PolicyKind> {
        match self {
            PolicyArg::Nt => vec![PolicyKind::NoTransfer],
            PolicyArg::Ast => vec![PolicyKind::AllSampleTransfer],
            PolicyArg::Both => PolicyKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    N,
    #[value(name = "J", alias = "j")]
    J,
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReproAxisArg {
    N,
    #[value(name = "J", alias = "j")]
    J,
    Both,
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("must be >= 1".into())
    }
}

fn parse_arms(s: &str) -> Result<usize, String> {
    let v = parse_positive(s)?;
    if v >= 2 {
        Ok(v)
    } else {
        Err("need at least 2 arms".into())
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 1.0 {
        Ok(v)
    } else {
        Err("alpha must be > 1".into())
    }
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err("epsilon must lie in (0, 1]".into())
    }
}

fn parse_width(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err("width must lie in (0, 1]".into())
    }
}

fn parse_unit(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err("midpoints must lie in [0, 1]".into())
    }
}

/// What to run, fully validated.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Run {
        scenario: Scenario,
        policies: Vec<PolicyKind>,
        traces: bool,
    },
    Sweep {
        scenario: Scenario,
        policies: Vec<PolicyKind>,
        axis: SweepAxis,
        grid: Vec<f64>,
    },
    Bounds {
        scenario: Scenario,
    },
    Reproduce(ReproduceOptions),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliCommand {
    pub action: Action,
    pub out_dir: PathBuf,
    pub realizations: usize,
    /// Worker threads; `None` lets rayon decide.
    pub jobs: Option<usize>,
    pub verbosity: u8,
}

/// Parse and validate `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<CliCommand, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let verbosity = cli.verbose;
    let (action, common) = match cli.command {
        Command::Run {
            scenario,
            common,
            policy,
            no_traces,
        } => (
            Action::Run {
                scenario: resolve_scenario(&scenario, None)?,
                policies: policy.kinds(),
                traces: !no_traces,
            },
            common,
        ),
        Command::Sweep {
            scenario,
            common,
            policy,
            axis,
            grid,
        } => {
            let axis = match axis {
                AxisArg::N => SweepAxis::EpisodeLength,
                AxisArg::J => SweepAxis::NumEpisodes,
                AxisArg::Epsilon => SweepAxis::Epsilon,
            };
            if grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
                return Err(CliError::usage("--grid: values must be strictly increasing"));
            }
            let fill = (axis, grid[0]);
            (
                Action::Sweep {
                    scenario: resolve_scenario(&scenario, Some(fill))?,
                    policies: policy.kinds(),
                    axis,
                    grid,
                },
                common,
            )
        }
        Command::Bounds { scenario, common } => (
            Action::Bounds {
                scenario: resolve_scenario(&scenario, None)?,
            },
            common,
        ),
        Command::ReproduceFig2(args) => reproduce_action(Case::One, args)?,
        Command::ReproduceFig3(args) => reproduce_action(Case::Two, args)?,
    };
    Ok(CliCommand {
        action,
        out_dir: common.out,
        realizations: common.realizations,
        jobs: common.jobs,
        verbosity,
    })
}

fn reproduce_action(case: Case, args: ReproduceArgs) -> Result<(Action, CommonArgs), CliError> {
    let mut opts = ReproduceOptions::new(case);
    opts.axes = match args.axis {
        ReproAxisArg::N => vec![ReproAxis::EpisodeLength],
        ReproAxisArg::J => vec![ReproAxis::NumEpisodes],
        ReproAxisArg::Both => vec![ReproAxis::EpisodeLength, ReproAxis::NumEpisodes],
    };
    if let Some(g) = args.n_grid {
        opts.n_grid = g;
    }
    if let Some(g) = args.j_grid {
        opts.j_grid = g;
    }
    if let Some(g) = args.eps_grid {
        opts.eps_grid = g;
    }
    if let Some(j) = args.episodes {
        opts.fixed_episodes = j;
    }
    if let Some(n) = args.episode_length {
        opts.fixed_episode_length = n;
    }
    if let Some(a) = args.alpha {
        opts.alpha = a;
    }
    if let Some(d) = args.width {
        opts.reward_width = d;
    }
    if let Some(s) = args.seed {
        opts.base_seed = s;
    }
    for (flag, grid) in [("--n-grid", &opts.n_grid), ("--j-grid", &opts.j_grid)] {
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::usage(format!("{flag}: values must be strictly increasing")));
        }
    }
    if opts.eps_grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(CliError::usage("--eps-grid: values must be strictly increasing"));
    }
    let k = case.midpoints().len();
    if opts.n_grid.iter().any(|&n| n < k) || opts.fixed_episode_length < k {
        return Err(CliError::usage(format!(
            "--n-grid/--episode-length: episode length must be >= {k} arms"
        )));
    }
    Ok((Action::Reproduce(opts), args.common))
}

/// Merge the optional config file with flags (flags win).
///
/// `fill` supplies the swept parameter when a sweep leaves it unset.
fn resolve_scenario(
    args: &ScenarioArgs,
    fill: Option<(SweepAxis, f64)>,
) -> Result<Scenario, CliError> {
    let file = match &args.config {
        Some(path) => ScenarioFile::load(path).map_err(|e| CliError::usage(format!("--config: {e}")))?,
        None => ScenarioFile::default(),
    };
    let mut episodes = args.episodes.or(file.num_episodes);
    let mut episode_length = args.episode_length.or(file.episode_length);
    let mut epsilon = args.epsilon.or(file.epsilon);
    match fill {
        Some((SweepAxis::EpisodeLength, v)) if episode_length.is_none() => episode_length = Some(v as usize),
        Some((SweepAxis::NumEpisodes, v)) if episodes.is_none() => episodes = Some(v as usize),
        Some((SweepAxis::Epsilon, v)) if epsilon.is_none() => epsilon = Some(v),
        _ => {}
    }
    let missing = |flag: &str, key: &str| {
        CliError::usage(format!("missing required flag {flag} (or `{key}` in --config)"))
    };
    let midpoints = args
        .midpoints
        .clone()
        .or(file.midpoints.clone())
        .ok_or_else(|| missing("--midpoints", "midpoints"))?;
    if let Some(k) = args.arms.or(file.num_arms) {
        if k != midpoints.len() {
            return Err(CliError::usage(format!(
                "--arms: {k} arms but --midpoints has {} values",
                midpoints.len()
            )));
        }
    }
    let scenario = Scenario {
        num_episodes: episodes.ok_or_else(|| missing("--episodes", "J"))?,
        episode_length: episode_length.ok_or_else(|| missing("--episode-length", "n"))?,
        epsilon: epsilon.ok_or_else(|| missing("--epsilon", "epsilon"))?,
        midpoints,
        reward_width: args.width.or(file.reward_width).unwrap_or(DEFAULT_REWARD_WIDTH),
        alpha: args.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA),
        base_seed: args.seed.or(file.base_seed).unwrap_or(0),
    };
    scenario.validate().map_err(|e| {
        let flag = match &e {
            ast_ucb::Error::InvalidParameter { name, .. } => flag_for(name),
            _ => "--config",
        };
        CliError::usage(format!("{flag}: {e}"))
    })?;
    Ok(scenario)
}

fn flag_for(param: &str) -> &'static str {
    match param {
        "num_episodes" => "--episodes",
        "episode_length" => "--episode-length",
        "epsilon" => "--epsilon",
        "midpoints" => "--midpoints",
        "reward_width" => "--width",
        "alpha" => "--alpha",
        _ => "--config",
    }
}
