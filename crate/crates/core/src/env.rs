//! Scenario description, per-episode mean generation and reward sampling.
//!
//! Each arm has a seed interval of length at most `epsilon` around its
//! midpoint; every episode draws its mean uniformly from that interval, so any
//! two episodes differ by at most `epsilon` per arm. Rewards are uniform with
//! the episode mean as centre and width `d`, narrowed near 0 or 1 so the
//! support stays inside `[0, 1]`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::ConfidenceInterval;

/// Round-off allowance in [`validate_assumption1`].
pub const ASSUMPTION_TOLERANCE: f64 = 1e-12;

/// Default reward-distribution width.
pub const DEFAULT_REWARD_WIDTH: f64 = 0.2;

/// Static description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub num_episodes: usize,
    pub episode_length: usize,
    /// Known bound on cross-episode drift; also the seed-interval length.
    pub epsilon: f64,
    /// Seed-interval midpoints, one per arm.
    pub midpoints: Vec<f64>,
    /// Width of the uniform reward distributions. 0 gives deterministic rewards.
    pub reward_width: f64,
    pub alpha: f64,
    pub base_seed: u64,
}

impl Scenario {
    pub fn num_arms(&self) -> usize {
        self.midpoints.len()
    }

    /// Total number of steps, `J * n`.
    pub fn horizon(&self) -> usize {
        self.num_episodes * self.episode_length
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_arms();
        if k < 2 {
            return Err(Error::param("midpoints", format!("need at least 2 arms, got {k}")));
        }
        if let Some(m) = self.midpoints.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::param("midpoints", format!("{m} outside [0, 1]")));
        }
        if self.num_episodes == 0 {
            return Err(Error::param("num_episodes", "must be >= 1"));
        }
        if self.episode_length < k {
            return Err(Error::param(
                "episode_length",
                format!(
                    "must be >= number of arms ({k}) so every arm is pulled once, got {}",
                    self.episode_length
                ),
            ));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param("epsilon", format!("must lie in [0, 1], got {}", self.epsilon)));
        }
        if !(0.0..=1.0).contains(&self.reward_width) {
            return Err(Error::param(
                "reward_width",
                format!("must lie in [0, 1], got {}", self.reward_width),
            ));
        }
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(Error::param("alpha", format!("must be > 1, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Mean vector with every arm at its midpoint (the `epsilon -> 0` limit).
    pub fn midpoint_means(&self) -> EpisodeMeans {
        EpisodeMeans::new(self.midpoints.clone())
    }
}

/// What a random substream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    EpisodeMeans,
    /// Rewards of one arm. Keeping arms on separate streams means the `m`-th
    /// pull of an arm sees the same reward under every policy.
    Reward(usize),
}

impl StreamPurpose {
    fn code(self) -> u64 {
        match self {
            StreamPurpose::EpisodeMeans => 0,
            StreamPurpose::Reward(arm) => 1 + arm as u64,
        }
    }
}

/// Independent reproducible generator keyed by `(base_seed, realization, episode, purpose)`.
///
/// The key is the ChaCha seed itself, so distinct keys give unrelated streams
/// and no stream depends on how many numbers another one consumed.
pub fn substream(base_seed: u64, realization: u64, episode: u64, purpose: StreamPurpose) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    for (chunk, word) in seed
        .chunks_exact_mut(8)
        .zip([base_seed, realization, episode, purpose.code()])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// `[midpoint - eps/2, midpoint + eps/2]` clipped to `[0, 1]`.
pub fn seed_interval(midpoint: f64, epsilon: f64) -> ConfidenceInterval {
    let half = epsilon / 2.0;
    ConfidenceInterval::new((midpoint - half).max(0.0), (midpoint + half).min(1.0))
}

/// Realized means for one episode together with the derived optimum and gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMeans {
    pub means: Vec<f64>,
    pub optimal_value: f64,
    pub optimal_set: Vec<usize>,
    pub gaps: Vec<f64>,
}

impl EpisodeMeans {
    pub fn new(means: Vec<f64>) -> Self {
        let optimal_value = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gaps: Vec<f64> = means.iter().map(|m| optimal_value - m).collect();
        let optimal_set = gaps
            .iter()
            .enumerate()
            .filter(|(_, g)| **g == 0.0)
            .map(|(k, _)| k)
            .collect();
        EpisodeMeans {
            means,
            optimal_value,
            optimal_set,
            gaps,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }
}

/// Draw each arm's mean uniformly from its seed interval.
pub fn sample_episode_means<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> EpisodeMeans {
    let means = scenario
        .midpoints
        .iter()
        .map(|&mid| {
            let iv = seed_interval(mid, scenario.epsilon);
            let u: f64 = rng.gen();
            (iv.lower + u * iv.width()).min(iv.upper)
        })
        .collect();
    EpisodeMeans::new(means)
}

/// Uniform reward law on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardDistribution {
    pub lo: f64,
    pub hi: f64,
}

impl RewardDistribution {
    pub fn mean(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Uniform law with mean `mean` and width `min(d, 2 mean, 2 (1 - mean))`,
/// the widest support of at most `d` that fits in `[0, 1]`.
pub fn reward_distribution(mean: f64, d: f64) -> RewardDistribution {
    let half = 0.5 * d.min(2.0 * mean).min(2.0 * (1.0 - mean)).max(0.0);
    RewardDistribution {
        lo: (mean - half).max(0.0),
        hi: (mean + half).min(1.0),
    }
}

pub fn draw_reward<R: Rng + ?Sized>(dist: &RewardDistribution, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    (dist.lo + u * dist.width()).clamp(dist.lo, dist.hi)
}

/// True iff every pair of episodes differs by at most `epsilon` on every arm.
pub fn validate_assumption1(episodes: &[EpisodeMeans], epsilon: f64) -> bool {
    let Some(first) = episodes.first() else {
        return true;
    };
    // max pairwise difference per arm = max - min over episodes
    (0..first.num_arms()).all(|k| {
        let (lo, hi) = episodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e.means[k]), hi.max(e.means[k]))
        });
        hi - lo <= epsilon + ASSUMPTION_TOLERANCE
    })
}
