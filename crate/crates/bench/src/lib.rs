//! Fixtures shared by the criterion benches.

use ast_ucb::env::DEFAULT_REWARD_WIDTH;
use ast_ucb::{PolicyConfig, PolicyKind, RunState, Scenario};

/// Seed-interval midpoints of the two reference four-arm cases.
pub const CASE_ONE: [f64; 4] = [0.4, 0.6, 0.6, 0.4];
pub const CASE_TWO: [f64; 4] = [0.35, 0.7, 0.3, 0.4];

pub fn scenario(midpoints: &[f64], num_episodes: usize, episode_length: usize, epsilon: f64) -> Scenario {
    Scenario {
        num_episodes,
        episode_length,
        epsilon,
        midpoints: midpoints.to_vec(),
        reward_width: DEFAULT_REWARD_WIDTH,
        alpha: 2.0,
        base_seed: 0,
    }
}

pub fn config(kind: PolicyKind, scenario: &Scenario) -> PolicyConfig {
    PolicyConfig::new(kind, scenario.alpha, scenario.epsilon).expect("valid fixture")
}

/// State part-way through a later episode, every arm initialized.
pub fn warm_state(num_arms: usize) -> RunState {
    let mut state = RunState::new(num_arms);
    for episode in 0..3 {
        if episode > 0 {
            state.reset_episode();
        }
        for step in 0..200 {
            let arm = step % num_arms;
            state
                .record_reward(arm, 0.1 + 0.8 * arm as f64 / num_arms as f64)
                .expect("reward in range");
        }
    }
    state
}
