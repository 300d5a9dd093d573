//! Built-in reference cases: regret against episode length `n` or episode
//! count `J`, one curve family per `epsilon`.


use ast_ucb::config::DEFAULT_ALPHA;
use ast_ucb::env::DEFAULT_REWARD_WIDTH;
use ast_ucb::harness::sweep;
use ast_ucb::report::{write_plot_csv, write_sweep_rows, SWEEP_HEADER};
use ast_ucb::{PolicyKind, Scenario, SweepAxis, SweepResult};

use crate::output::Output;

/// Reference seed-interval layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Midpoints (0.4, 0.6, 0.6, 0.4): two tied best arms.
    One,
    /// Midpoints (0.35, 0.7, 0.3, 0.4): one clearly best arm.
    Two,
}

impl Case {
    pub fn midpoints(self) -> &'static [f64] {
        match self {
            Case::One => &[0.4, 0.6, 0.6, 0.4],
            Case::Two => &[0.35, 0.7, 0.3, 0.4],
        }
    }

    /// Output file prefix.
    pub fn figure(self) -> &'static str {
        match self {
            Case::One => "fig2",
            Case::Two => "fig3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproAxis {
    EpisodeLength,
    NumEpisodes,
}

impl ReproAxis {
    pub fn sweep_axis(self) -> SweepAxis {
        match self {
            ReproAxis::EpisodeLength => SweepAxis::EpisodeLength,
            ReproAxis::NumEpisodes => SweepAxis::NumEpisodes,
        }
    }
}

pub const DEFAULT_EPS_GRID: [f64; 5] = [0.05, 0.1, 0.2, 0.5, 1.0];
pub const DEFAULT_N_GRID: [usize; 5] = [200, 500, 1000, 2000, 5000];
pub const DEFAULT_J_GRID: [usize; 5] = [5, 10, 20, 50, 100];

#[derive(Debug, Clone, PartialEq)]
pub struct ReproduceOptions {
    pub case: Case,
    pub axes: Vec<ReproAxis>,
    pub n_grid: Vec<usize>,
    pub j_grid: Vec<usize>,
    pub eps_grid: Vec<f64>,
    /// `J` while sweeping `n`.
    pub fixed_episodes: usize,
    /// `n` while sweeping `J`.
    pub fixed_episode_length: usize,
    pub alpha: f64,
    pub reward_width: f64,
    pub base_seed: u64,
}

impl ReproduceOptions {
    pub fn new(case: Case) -> Self {
        ReproduceOptions {
            case,
            axes: vec![ReproAxis::EpisodeLength, ReproAxis::NumEpisodes],
            n_grid: DEFAULT_N_GRID.to_vec(),
            j_grid: DEFAULT_J_GRID.to_vec(),
            eps_grid: DEFAULT_EPS_GRID.to_vec(),
            fixed_episodes: 50,
            fixed_episode_length: 1000,
            alpha: DEFAULT_ALPHA,
            reward_width: DEFAULT_REWARD_WIDTH,
            base_seed: 0,
        }
    }

    pub fn template(&self, epsilon: f64) -> Scenario {
        Scenario {
            num_episodes: self.fixed_episodes,
            episode_length: self.fixed_episode_length,
            epsilon,
            midpoints: self.case.midpoints().to_vec(),
            reward_width: self.reward_width,
            alpha: self.alpha,
            base_seed: self.base_seed,
        }
    }

    fn grid(&self, axis: ReproAxis) -> Vec<f64> {
        let g = match axis {
            ReproAxis::EpisodeLength => &self.n_grid,
            ReproAxis::NumEpisodes => &self.j_grid,
        };
        g.iter().map(|&v| v as f64).collect()
    }
}

/// Sweeps for one axis, one per epsilon in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSweeps {
    pub axis: ReproAxis,
    pub sweeps: Vec<(f64, SweepResult)>,
}

pub fn run_case(
    opts: &ReproduceOptions,
    axis: ReproAxis,
    realizations: usize,
) -> ast_ucb::Result<CaseSweeps> {
    let grid = opts.grid(axis);
    let sweeps = opts
        .eps_grid
        .iter()
        .map(|&eps| {
            log::info!("{} {:?} epsilon = {eps}", opts.case.figure(), axis);
            sweep(
                &opts.template(eps),
                axis.sweep_axis(),
                &grid,
                &PolicyKind::ALL,
                realizations,
                false,
            )
            .map(|s| (eps, s))
        })
        .collect::<ast_ucb::Result<_>>()?;
    Ok(CaseSweeps { axis, sweeps })
}

/// Sweep CSV (all epsilons concatenated, epsilon-major) and plot-data CSV.
pub fn case_outputs(opts: &ReproduceOptions, result: &CaseSweeps) -> Vec<Output> {
    let stem = format!("{}_{}", opts.case.figure(), result.axis.sweep_axis().label());
    let sweeps = result.sweeps.clone();
    let plot = result.sweeps.clone();
    vec![
        Output::new(format!("{stem}_sweep.csv"), move |w| {
            writeln!(w, "{SWEEP_HEADER}")?;
            for (_, s) in &sweeps {
                write_sweep_rows(w, s)?;
            }
            Ok(())
        }),
        Output::new(format!("{stem}_plot.csv"), move |w| write_plot_csv(w, &plot)),
    ]
}
