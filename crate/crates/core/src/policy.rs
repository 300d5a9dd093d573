//! Estimators, confidence radii and arm selection for NT-UCB and AST-UCB.
//!
//! Both policies restart their per-episode statistics at every episode
//! boundary. NT-UCB ranks arms by `mu1 + p1`, the upper end of a Hoeffding
//! interval built from current-episode samples only. AST-UCB also keeps a
//! pooled estimate `mu2` over every sample since the first episode, whose
//! radius `p2` is inflated by `U * epsilon` to absorb the drift in means
//! between episodes, and ranks arms by `q = min(mu1 + p1, mu2 + p2)`: the
//! optimistic end of the intersection of the two intervals.
//!
//! Decisions at step `t` use statistics as of `t - 1`, so the log argument
//! `tau` is the number of steps already completed in the current episode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two policies to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    /// UCB restarted every episode (NT-UCB).
    NoTransfer,
    /// UCB with all-sample transfer from previous episodes (AST-UCB).
    AllSampleTransfer,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 2] = [PolicyKind::NoTransfer, PolicyKind::AllSampleTransfer];

    /// Short label used in CSV output: `nt` or `ast`.
    pub fn label(self) -> &'static str {
        match self {
            PolicyKind::NoTransfer => "nt",
            PolicyKind::AllSampleTransfer => "ast",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nt" | "nt-ucb" => Some(PolicyKind::NoTransfer),
            "ast" | "ast-ucb" => Some(PolicyKind::AllSampleTransfer),
            _ => None,
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolicyKind::NoTransfer => write!(f, "NT-UCB"),
            PolicyKind::AllSampleTransfer => write!(f, "AST-UCB"),
        }
    }
}

/// Policy parameters. `epsilon` is only read by [`PolicyKind::AllSampleTransfer`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Exploration exponent, strictly greater than 1.
    pub alpha: f64,
    /// Known bound on cross-episode drift of any arm's mean.
    pub epsilon: f64,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind, alpha: f64, epsilon: f64) -> Result<Self> {
        let config = PolicyConfig {
            kind,
            alpha,
            epsilon,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(Error::param("alpha", format!("must be > 1, got {}", self.alpha)));
        }
        // epsilon = 0 is admitted (identical episodes); the upper limit is the reward range.
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param(
                "epsilon",
                format!("must lie in [0, 1], got {}", self.epsilon),
            ));
        }
        Ok(())
    }
}

/// Closed interval `[lower, upper]`. An empty intersection is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
}

impl ConfidenceInterval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "inverted interval [{lower}, {upper}]");
        ConfidenceInterval { lower, upper }
    }

    pub fn centered(center: f64, radius: f64) -> Self {
        ConfidenceInterval::new(center - radius, center + radius)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn is_subset_of(&self, other: &ConfidenceInterval) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }

    /// Intersection, or `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &ConfidenceInterval) -> Option<ConfidenceInterval> {
        let lower = self.lower.max(other.lower);
        let upper = self.upper.min(other.upper);
        (lower <= upper).then_some(ConfidenceInterval { lower, upper })
    }
}

/// Mutable per-realization statistics shared by both policies.
///
/// Episode counters (`N_k^j`) restart at each episode; totals (`S_k`) never do.
#[derive(Debug, Clone, PartialEq)]
pub struct RunState {
    episode: usize,
    step: u64,
    episode_pulls: Vec<u64>,
    total_pulls: Vec<u64>,
    episode_reward: Vec<f64>,
    total_reward: Vec<f64>,
}

impl RunState {
    /// Fresh state at the start of episode 1.
    pub fn new(num_arms: usize) -> Self {
        RunState {
            episode: 1,
            step: 0,
            episode_pulls: vec![0; num_arms],
            total_pulls: vec![0; num_arms],
            episode_reward: vec![0.0; num_arms],
            total_reward: vec![0.0; num_arms],
        }
    }

    pub fn num_arms(&self) -> usize {
        self.episode_pulls.len()
    }

    /// 1-based index of the current episode.
    pub fn episode_index(&self) -> usize {
        self.episode
    }

    /// Steps completed in the current episode.
    pub fn step_in_episode(&self) -> u64 {
        self.step
    }

    pub fn episode_pulls(&self) -> &[u64] {
        &self.episode_pulls
    }

    pub fn total_pulls(&self) -> &[u64] {
        &self.total_pulls
    }

    pub fn episode_reward_sums(&self) -> &[f64] {
        &self.episode_reward
    }

    pub fn total_reward_sums(&self) -> &[f64] {
        &self.total_reward
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm < self.num_arms() {
            Ok(())
        } else {
            Err(Error::ArmOutOfRange {
                arm,
                num_arms: self.num_arms(),
            })
        }
    }

    /// Current-episode sample mean; 0 before the arm's first pull.
    ///
    /// Panics if `arm` is out of range.
    pub fn estimate_mu1(&self, arm: usize) -> f64 {
        self.episode_reward[arm] / self.episode_pulls[arm].max(1) as f64
    }

    /// Sample mean pooled over all episodes so far; 0 before the arm's first pull.
    ///
    /// Panics if `arm` is out of range.
    pub fn estimate_mu2(&self, arm: usize) -> f64 {
        self.total_reward[arm] / self.total_pulls[arm].max(1) as f64
    }

    pub fn record_reward(&mut self, arm: usize, reward: f64) -> Result<()> {
        self.check_arm(arm)?;
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::RewardOutOfRange(reward));
        }
        self.episode_pulls[arm] += 1;
        self.total_pulls[arm] += 1;
        self.episode_reward[arm] += reward;
        self.total_reward[arm] += reward;
        self.step += 1;
        Ok(())
    }

    /// Start the next episode: per-episode counters go to zero, totals stay.
    pub fn reset_episode(&mut self) {
        self.episode_pulls.iter_mut().for_each(|c| *c = 0);
        self.episode_reward.iter_mut().for_each(|s| *s = 0.0);
        self.episode += 1;
        self.step = 0;
    }

    /// True once every arm has at least one sample in this episode.
    pub fn initialized(&self) -> bool {
        self.episode_pulls.iter().all(|&c| c > 0)
    }
}

fn check_tau(tau: u64) -> Result<()> {
    if tau == 0 {
        Err(Error::param("tau", "elapsed steps must be >= 1"))
    } else {
        Ok(())
    }
}

/// Hoeffding radius of the per-episode estimate: `sqrt(alpha ln(tau) / (2 n))`.
pub fn radius1(tau: u64, n_pulls: u64, alpha: f64) -> Result<f64> {
    check_tau(tau)?;
    if n_pulls == 0 {
        return Err(Error::ZeroPulls);
    }
    Ok((alpha * (tau as f64).ln() / (2.0 * n_pulls as f64)).sqrt())
}

/// Radius of the pooled estimate: the Hoeffding/McDiarmid term over all
/// `total_pulls` samples plus the drift allowance `U * epsilon`, where
/// `U = (total - episode) / total` is the fraction of samples from earlier episodes.
pub fn radius2(
    tau: u64,
    total_pulls: u64,
    episode_pulls: u64,
    alpha: f64,
    epsilon: f64,
) -> Result<f64> {
    check_tau(tau)?;
    if total_pulls == 0 {
        return Err(Error::ZeroPulls);
    }
    if episode_pulls > total_pulls {
        return Err(Error::EpisodeExceedsTotal {
            episode: episode_pulls,
            total: total_pulls,
        });
    }
    let total = total_pulls as f64;
    let stale_fraction = (total_pulls - episode_pulls) as f64 / total;
    Ok((alpha * (tau as f64).ln() / (2.0 * total)).sqrt() + stale_fraction * epsilon)
}

/// The two confidence intervals `(D1, D2)` for `arm` after `tau` steps of the episode.
pub fn intervals(
    state: &RunState,
    arm: usize,
    tau: u64,
    alpha: f64,
    epsilon: f64,
) -> Result<(ConfidenceInterval, ConfidenceInterval)> {
    state.check_arm(arm)?;
    let n = state.episode_pulls[arm];
    if n == 0 {
        return Err(Error::ArmNotInitialized(arm));
    }
    let p1 = radius1(tau, n, alpha)?;
    let p2 = radius2(tau, state.total_pulls[arm], n, alpha, epsilon)?;
    Ok((
        ConfidenceInterval::centered(state.estimate_mu1(arm), p1),
        ConfidenceInterval::centered(state.estimate_mu2(arm), p2),
    ))
}

/// Optimistic value used for ranking `arm`.
///
/// The transfer variant takes `min` of the two upper endpoints, which is the
/// upper end of `D1 ∩ D2` when that is non-empty and is kept as-is when the
/// intervals are disjoint.
pub fn optimistic_reward(
    state: &RunState,
    arm: usize,
    tau: u64,
    config: &PolicyConfig,
) -> Result<f64> {
    state.check_arm(arm)?;
    let n = state.episode_pulls[arm];
    if n == 0 {
        return Err(Error::ArmNotInitialized(arm));
    }
    let ucb1 = state.estimate_mu1(arm) + radius1(tau, n, config.alpha)?;
    match config.kind {
        PolicyKind::NoTransfer => Ok(ucb1),
        PolicyKind::AllSampleTransfer => {
            let p2 = radius2(tau, state.total_pulls[arm], n, config.alpha, config.epsilon)?;
            Ok(ucb1.min(state.estimate_mu2(arm) + p2))
        }
    }
}

/// Index of the largest value, lowest index on ties. `None` for an empty slice.
pub fn argmax_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Pick the next arm from the statistics accumulated so far in `state`.
///
/// Every arm must already have one pull in the current episode.
pub fn select_arm(state: &RunState, config: &PolicyConfig) -> Result<usize> {
    let tau = state.step;
    let mut best = (0usize, f64::NEG_INFINITY);
    for arm in 0..state.num_arms() {
        let q = optimistic_reward(state, arm, tau, config)?;
        if q > best.1 {
            best = (arm, q);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const NT: PolicyConfig = PolicyConfig {
        kind: PolicyKind::NoTransfer,
        alpha: 2.0,
        epsilon: 0.1,
    };
    const AST: PolicyConfig = PolicyConfig {
        kind: PolicyKind::AllSampleTransfer,
        alpha: 2.0,
        epsilon: 0.1,
    };

    fn state_with(rewards: &[(usize, f64)], num_arms: usize) -> RunState {
        let mut s = RunState::new(num_arms);
        for &(arm, r) in rewards {
            s.record_reward(arm, r).unwrap();
        }
        s
    }

    #[test]
    fn config_rejects_alpha_at_most_one() {
        assert!(PolicyConfig::new(PolicyKind::NoTransfer, 1.0, 0.1).is_err());
        assert!(PolicyConfig::new(PolicyKind::NoTransfer, 0.5, 0.1).is_err());
        assert!(PolicyConfig::new(PolicyKind::NoTransfer, f64::NAN, 0.1).is_err());
        assert!(PolicyConfig::new(PolicyKind::AllSampleTransfer, 1.5, 1.5).is_err());
        assert!(PolicyConfig::new(PolicyKind::AllSampleTransfer, 1.5, 1.0).is_ok());
    }

    #[test]
    fn mu1_zero_pulls_is_zero() {
        assert_eq!(RunState::new(3).estimate_mu1(1), 0.0);
    }

    #[test]
    fn mu1_mean_of_episode_rewards() {
        let s = state_with(&[(0, 0.2), (0, 0.4)], 2);
        assert!((s.estimate_mu1(0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn mu1_excludes_previous_episodes_mu2_pools_them() {
        let mut s = state_with(&[(0, 0.9)], 1);
        s.reset_episode();
        s.record_reward(0, 0.1).unwrap();
        assert!((s.estimate_mu1(0) - 0.1).abs() < 1e-15);
        assert!((s.estimate_mu2(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mu2_zero_pulls_and_first_episode() {
        assert_eq!(RunState::new(2).estimate_mu2(0), 0.0);
        let s = state_with(&[(0, 0.3), (1, 0.7), (0, 0.5)], 2);
        for arm in 0..2 {
            assert_eq!(s.estimate_mu1(arm), s.estimate_mu2(arm));
        }
    }

    #[test]
    fn radius1_values() {
        assert_eq!(radius1(1, 7, 3.0).unwrap(), 0.0);
        // sqrt(2 ln 100 / 20)
        let r = radius1(100, 10, 2.0).unwrap();
        assert!((r - 0.678_614_042_4).abs() < 1e-9, "{r}");
        let a = radius1(57, 3, 2.5).unwrap();
        let b = radius1(57, 12, 2.5).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-14);
        assert_eq!(radius1(5, 0, 2.0), Err(Error::ZeroPulls));
        assert!(radius1(0, 1, 2.0).is_err());
    }

    #[test]
    fn radius2_values() {
        assert_eq!(
            radius2(40, 9, 9, 2.0, 0.3).unwrap(),
            radius1(40, 9, 2.0).unwrap()
        );
        // sqrt(2 ln 100 / 40) + 0.75 * 0.1
        let r = radius2(100, 20, 5, 2.0, 0.1).unwrap();
        assert!((r - 0.554_852_591_2).abs() < 1e-9, "{r}");
        let far = radius2(100, 10_000_000, 5, 2.0, 0.1).unwrap();
        assert!((far - 0.1).abs() < 1e-3);
        assert_eq!(radius2(5, 0, 0, 2.0, 0.1), Err(Error::ZeroPulls));
        assert!(matches!(
            radius2(5, 2, 3, 2.0, 0.1),
            Err(Error::EpisodeExceedsTotal { .. })
        ));
    }

    #[test]
    fn intervals_coincide_in_first_episode() {
        let s = state_with(&[(0, 0.3), (1, 0.6), (0, 0.5)], 2);
        let (d1, d2) = intervals(&s, 0, 3, 2.0, 0.2).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn interval_intersection_cases() {
        let d1 = ConfidenceInterval::centered(0.5, 0.1);
        let d2 = ConfidenceInterval::centered(0.45, 0.2);
        let i = d1.intersect(&d2).unwrap();
        assert!((i.lower - 0.4).abs() < 1e-12 && (i.upper - 0.6).abs() < 1e-12);
        assert!((d2.lower - 0.25).abs() < 1e-12 && (d2.upper - 0.65).abs() < 1e-12);

        let a = ConfidenceInterval::centered(0.5, 0.05);
        let b = ConfidenceInterval::centered(0.8, 0.05);
        assert_eq!(a.intersect(&b), None);
    }

    #[test]
    fn intervals_require_a_pull() {
        let s = state_with(&[(0, 0.3)], 2);
        assert_eq!(
            intervals(&s, 1, 1, 2.0, 0.1),
            Err(Error::ArmNotInitialized(1))
        );
    }

    #[test]
    fn transfer_takes_min_of_upper_ends() {
        // episode 1: mu1 = 0.9 over 1 pull; episode 2: three pulls at 0.1
        let mut s = state_with(&[(0, 0.9)], 1);
        s.reset_episode();
        for _ in 0..3 {
            s.record_reward(0, 0.1).unwrap();
        }
        let tau = 3;
        let nt = optimistic_reward(&s, 0, tau, &NT).unwrap();
        let ast = optimistic_reward(&s, 0, tau, &AST).unwrap();
        let (d1, d2) = intervals(&s, 0, tau, 2.0, 0.1).unwrap();
        assert_eq!(nt, d1.upper);
        assert_eq!(ast, d1.upper.min(d2.upper));
        assert!(ast <= nt);
    }

    #[test]
    fn transfer_equals_no_transfer_in_first_episode() {
        let s = state_with(&[(0, 0.3), (1, 0.6), (0, 0.5), (1, 0.2)], 2);
        for arm in 0..2 {
            assert_eq!(
                optimistic_reward(&s, arm, 4, &NT).unwrap(),
                optimistic_reward(&s, arm, 4, &AST).unwrap()
            );
        }
    }

    #[test]
    fn select_ties_go_to_lowest_index() {
        let s = state_with(&[(0, 0.5), (1, 0.5), (2, 0.5)], 3);
        assert_eq!(select_arm(&s, &NT).unwrap(), 0);
        assert_eq!(argmax_first(&[0.3, 0.8, 0.8]), Some(1));
        assert_eq!(argmax_first(&[0.8, 0.3]), Some(0));
        assert_eq!(argmax_first(&[]), None);
    }

    #[test]
    fn select_requires_initialization() {
        let s = state_with(&[(0, 0.5)], 2);
        assert_eq!(select_arm(&s, &NT), Err(Error::ArmNotInitialized(1)));
    }

    #[test]
    fn deterministic_two_arm_trace() {
        // arm 0 always pays 0.9, arm 1 always 0.1
        let mut s = state_with(&[(0, 0.9), (1, 0.1)], 2);
        for _ in 0..2 {
            let arm = select_arm(&s, &NT).unwrap();
            assert_eq!(arm, 0);
            s.record_reward(arm, 0.9).unwrap();
        }
    }

    #[test]
    fn record_and_reset() {
        let mut s = RunState::new(2);
        s.record_reward(0, 0.5).unwrap();
        assert_eq!(s.episode_pulls(), &[1, 0]);
        assert_eq!(s.total_pulls(), &[1, 0]);
        assert_eq!(s.episode_reward_sums()[0], 0.5);
        s.record_reward(0, 0.25).unwrap();
        assert_eq!(s.episode_pulls()[0], 2);
        assert_eq!(s.total_reward_sums()[0], 0.75);
        assert_eq!(s.step_in_episode(), 2);

        let mu2 = s.estimate_mu2(0);
        s.reset_episode();
        assert_eq!(s.episode_index(), 2);
        assert_eq!(s.step_in_episode(), 0);
        assert_eq!(s.episode_pulls(), &[0, 0]);
        assert_eq!(s.total_pulls(), &[2, 0]);
        assert_eq!(s.estimate_mu1(0), 0.0);
        assert_eq!(s.estimate_mu2(0), mu2);
    }

    #[test]
    fn record_rejects_bad_input() {
        let mut s = RunState::new(2);
        assert_eq!(s.record_reward(0, 1.2), Err(Error::RewardOutOfRange(1.2)));
        assert!(s.record_reward(0, -0.1).is_err());
        assert!(s.record_reward(0, f64::NAN).is_err());
        assert!(matches!(
            s.record_reward(2, 0.5),
            Err(Error::ArmOutOfRange { .. })
        ));
        assert_eq!(s.step_in_episode(), 0);
    }

    fn pull_sequence() -> impl Strategy<Value = (usize, Vec<Vec<(usize, f64)>>)> {
        (2usize..6).prop_flat_map(|k| {
            let pull = (0..k, 0.0f64..=1.0);
            (
                Just(k),
                prop::collection::vec(prop::collection::vec(pull, 0..30), 1..5),
            )
        })
    }

    proptest! {
        #[test]
        fn counters_stay_consistent((k, episodes) in pull_sequence()) {
            let mut s = RunState::new(k);
            for (e, pulls) in episodes.iter().enumerate() {
                if e > 0 {
                    s.reset_episode();
                }
                for &(arm, r) in pulls {
                    s.record_reward(arm, r).unwrap();
                    for a in 0..k {
                        prop_assert!(s.episode_pulls()[a] <= s.total_pulls()[a]);
                        prop_assert!(s.episode_reward_sums()[a] >= 0.0);
                        prop_assert!(s.episode_reward_sums()[a] <= s.episode_pulls()[a] as f64 + 1e-12);
                        prop_assert!(s.total_reward_sums()[a] <= s.total_pulls()[a] as f64 + 1e-12);
                    }
                    prop_assert_eq!(s.episode_pulls().iter().sum::<u64>(), s.step_in_episode());
                }
            }
        }

        #[test]
        fn transfer_never_raises_optimism((k, episodes) in pull_sequence(), eps in 0.0f64..=1.0, alpha in 1.01f64..4.0) {
            let mut s = RunState::new(k);
            let nt = PolicyConfig { kind: PolicyKind::NoTransfer, alpha, epsilon: eps };
            let ast = PolicyConfig { kind: PolicyKind::AllSampleTransfer, ..nt };
            for (e, pulls) in episodes.iter().enumerate() {
                if e > 0 {
                    s.reset_episode();
                }
                for &(arm, r) in pulls {
                    s.record_reward(arm, r).unwrap();
                }
            }
            let tau = s.step_in_episode().max(1);
            for arm in 0..k {
                if s.episode_pulls()[arm] == 0 {
                    continue;
                }
                let q = optimistic_reward(&s, arm, tau, &ast).unwrap();
                prop_assert!(q <= optimistic_reward(&s, arm, tau, &nt).unwrap());
                let (d1, d2) = intervals(&s, arm, tau, alpha, eps).unwrap();
                if let Some(i) = d1.intersect(&d2) {
                    prop_assert!(i.is_subset_of(&d1) && i.is_subset_of(&d2));
                    prop_assert_eq!(q, i.upper);
                }
            }
        }

        #[test]
        fn radii_monotone(tau in 2u64..10_000, n in 1u64..1000, extra in 0u64..5000, alpha in 1.01f64..5.0, eps in 0.0f64..=1.0) {
            let r = radius1(tau, n, alpha).unwrap();
            prop_assert!(radius1(tau, n + 1, alpha).unwrap() < r);
            prop_assert!(radius1(tau + 1, n, alpha).unwrap() >= r);
            prop_assert!(radius1(tau, n, alpha + 0.5).unwrap() >= r);

            let total = n + extra;
            let r2 = radius2(tau, total, n, alpha, eps).unwrap();
            prop_assert!(radius2(tau, total + 1, n + 1, alpha, eps).unwrap() < r2);
            prop_assert!(radius2(tau + 1, total, n, alpha, eps).unwrap() >= r2);
            prop_assert!(radius2(tau, total, n, alpha + 0.5, eps).unwrap() >= r2);
        }

        #[test]
        fn argmax_invariant_under_positive_scaling(values in prop::collection::vec(-5.0f64..5.0, 1..10), scale in 1e-3f64..1e3) {
            let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
            prop_assert_eq!(argmax_first(&values), argmax_first(&scaled));
        }
    }
}
