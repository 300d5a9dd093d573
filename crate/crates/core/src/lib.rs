//! Episodic multi-armed bandits with cross-episode sample transfer.
//!
//! Arm means stay fixed within an episode and drift by at most `epsilon`
//! between episodes. [`policy`] implements the no-transfer baseline (UCB
//! restarted every episode) and the all-sample-transfer variant that
//! intersects a per-episode confidence interval with one built from every
//! sample since the first episode. [`env`] generates scenarios, [`harness`]
//! runs and aggregates realizations, [`bounds`] evaluates the closed-form
//! regret upper bounds, and [`report`] writes the CSV/text outputs.

pub mod bounds;
pub mod config;
pub mod env;
pub mod error;
pub mod harness;
pub mod policy;
pub mod report;

pub use bounds::{BoundReport, GapSummary, MinTerm};
pub use config::ScenarioFile;
pub use env::{EpisodeMeans, RewardDistribution, Scenario};
pub use error::{Error, Result};
pub use harness::{
    run_experiment, run_realization, sweep, ExperimentResult, RegretTrace, SweepAxis, SweepResult,
};
pub use policy::{ConfidenceInterval, PolicyConfig, PolicyKind, RunState};
