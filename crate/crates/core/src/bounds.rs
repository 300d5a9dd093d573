//! Closed-form pseudo-regret upper bounds for NT-UCB and AST-UCB, evaluated on
//! a realized sequence of episode means, plus the transfer-benefit terms.
//!
//! With `L = 2 alpha ln n` and gaps `D_k^j`:
//!
//! ```text
//! NT  <= sum_k [ L * sum_{j: D>0} 1/D_k^j  +  (alpha+1)/(alpha-1) * sum_j D_k^j ]
//! AST <= sum_k Dmax_k * [ min{ sum_{j: D>0} L/(D_k^j)^2 , L/(Dmin_k - 2 eps)^2 }
//!                         + J (alpha+3)/(alpha-1) ]
//! ```
//!
//! The AST bound is only claimed for `eps < min_k Dmin_k / 2`.

use serde::{Deserialize, Serialize};

use crate::env::{EpisodeMeans, Scenario, ASSUMPTION_TOLERANCE};

/// Gap statistics of a sequence of episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    /// `[episode][arm]`.
    pub gaps: Vec<Vec<f64>>,
    pub max_gap: Vec<f64>,
    /// Smallest positive gap per arm; `None` if the arm is optimal in every episode.
    pub min_positive_gap: Vec<Option<f64>>,
    pub epsilon: f64,
    pub alpha: f64,
    pub episode_length: usize,
}

impl GapSummary {
    pub fn new(episodes: &[EpisodeMeans], epsilon: f64, alpha: f64, episode_length: usize) -> Self {
        let gaps = episodes.iter().map(|e| e.gaps.clone()).collect();
        Self::from_gaps(gaps, epsilon, alpha, episode_length)
    }

    /// Build from a `[episode][arm]` gap matrix.
    pub fn from_gaps(gaps: Vec<Vec<f64>>, epsilon: f64, alpha: f64, episode_length: usize) -> Self {
        let num_arms = gaps.first().map_or(0, Vec::len);
        let max_gap = (0..num_arms)
            .map(|k| gaps.iter().map(|g| g[k]).fold(0.0, f64::max))
            .collect();
        let min_positive_gap = (0..num_arms)
            .map(|k| {
                gaps.iter()
                    .map(|g| g[k])
                    .filter(|&d| d > 0.0)
                    .reduce(f64::min)
            })
            .collect();
        GapSummary {
            gaps,
            max_gap,
            min_positive_gap,
            epsilon,
            alpha,
            episode_length,
        }
    }

    pub fn num_episodes(&self) -> usize {
        self.gaps.len()
    }

    pub fn num_arms(&self) -> usize {
        self.max_gap.len()
    }

    /// Arms that are optimal in every episode.
    pub fn always_optimal(&self) -> Vec<usize> {
        (0..self.num_arms())
            .filter(|&k| self.min_positive_gap[k].is_none())
            .collect()
    }

    /// Summary of the first `episodes` episodes.
    pub fn prefix(&self, episodes: usize) -> GapSummary {
        GapSummary::from_gaps(
            self.gaps[..episodes].to_vec(),
            self.epsilon,
            self.alpha,
            self.episode_length,
        )
    }

    fn log_factor(&self) -> f64 {
        2.0 * self.alpha * (self.episode_length as f64).ln()
    }

    fn positive_gaps(&self, arm: usize) -> impl Iterator<Item = f64> + '_ {
        self.gaps.iter().map(move |g| g[arm]).filter(|&d| d > 0.0)
    }

    /// Transfer condition `eps < min_k Dmin_k / 2` (strict up to rounding), vacuously
    /// true with no positive gaps.
    pub fn transfer_valid(&self) -> bool {
        self.min_positive_gap
            .iter()
            .flatten()
            .all(|&dmin| dmin - 2.0 * self.epsilon > ASSUMPTION_TOLERANCE)
    }
}

pub fn gap_summary(episodes: &[EpisodeMeans], scenario: &Scenario) -> GapSummary {
    GapSummary::new(
        episodes,
        scenario.epsilon,
        scenario.alpha,
        scenario.episode_length,
    )
}

/// NT-UCB bound: per-episode UCB bounds summed over episodes.
pub fn nt_ucb_bound(summary: &GapSummary) -> f64 {
    let l = summary.log_factor();
    let a = summary.alpha;
    (0..summary.num_arms())
        .map(|k| {
            let inverse_sum: f64 = summary.positive_gaps(k).map(|d| 1.0 / d).sum();
            let gap_total: f64 = summary.gaps.iter().map(|g| g[k]).sum();
            l * inverse_sum + (a + 1.0) / (a - 1.0) * gap_total
        })
        .sum()
}

/// Which branch of the `min` in the AST bound is active for an arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinTerm {
    /// `sum_j L / (D_k^j)^2`: no benefit from transfer.
    PerEpisodeSum,
    /// `L / (Dmin_k - 2 eps)^2`: constant in `J`.
    TransferTerm,
}

/// Per-arm transfer terms.
///
/// `A = Dmax sum 1/D^2`, `B = Dmax / (Dmin - 2 eps)^2`, `C = sum 1/D`; the
/// first terms of the two bounds are `L * min(A, B)` and `L * C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmTerms {
    pub a: f64,
    /// `None` when the arm has no positive gap or `eps >= Dmin / 2`.
    pub b: Option<f64>,
    pub c: f64,
    pub selector: MinTerm,
}

fn arm_terms(summary: &GapSummary, arm: usize) -> ArmTerms {
    let dmax = summary.max_gap[arm];
    let a = summary.positive_gaps(arm).map(|d| dmax / (d * d)).sum();
    let c = summary.positive_gaps(arm).map(|d| 1.0 / d).sum();
    let b = summary.min_positive_gap[arm].and_then(|dmin| {
        let margin = dmin - 2.0 * summary.epsilon;
        (margin > ASSUMPTION_TOLERANCE).then(|| dmax / (margin * margin))
    });
    let selector = match b {
        Some(b) if b < a => MinTerm::TransferTerm,
        _ => MinTerm::PerEpisodeSum,
    };
    ArmTerms { a, b, c, selector }
}

/// AST-UCB bound and whether its precondition on `epsilon` holds.
///
/// When the precondition fails the value is still reported; arms whose
/// transfer term is undefined use the per-episode sum.
pub fn ast_ucb_bound(summary: &GapSummary) -> (f64, bool) {
    let l = summary.log_factor();
    let a = summary.alpha;
    let j = summary.num_episodes() as f64;
    let bound = (0..summary.num_arms())
        .map(|k| {
            let dmax = summary.max_gap[k];
            if dmax == 0.0 {
                return 0.0;
            }
            let terms = arm_terms(summary, k);
            let first = match terms.selector {
                MinTerm::PerEpisodeSum => l * terms.a,
                MinTerm::TransferTerm => l * terms.b.unwrap_or(terms.a),
            };
            first + dmax * j * (a + 3.0) / (a - 1.0)
        })
        .sum();
    (bound, summary.transfer_valid())
}

/// Transfer terms per arm and the crossover episode count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferAnalysis {
    pub arms: Vec<ArmTerms>,
    /// Smallest prefix length `J'` at which `sum_k C_k > sum_k B_k`.
    pub crossover_episode: Option<usize>,
}

fn prefix_crosses(summary: &GapSummary) -> bool {
    let mut b_total = 0.0;
    let mut c_total = 0.0;
    let mut any = false;
    for k in 0..summary.num_arms() {
        if summary.min_positive_gap[k].is_none() {
            continue;
        }
        let terms = arm_terms(summary, k);
        let Some(b) = terms.b else {
            return false;
        };
        any = true;
        b_total += b;
        c_total += terms.c;
    }
    // ties within rounding do not count as crossing
    any && c_total - b_total > ASSUMPTION_TOLERANCE * b_total.max(1.0)
}

pub fn transfer_analysis(summary: &GapSummary) -> TransferAnalysis {
    let arms = (0..summary.num_arms())
        .map(|k| arm_terms(summary, k))
        .collect();
    let crossover_episode =
        (1..=summary.num_episodes()).find(|&jp| prefix_crosses(&summary.prefix(jp)));
    TransferAnalysis {
        arms,
        crossover_episode,
    }
}

/// Both bounds and the transfer analysis for one sequence of episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub nt_bound: f64,
    pub ast_bound: f64,
    pub ast_valid: bool,
    pub arms: Vec<ArmTerms>,
    pub crossover_episode: Option<usize>,
}

impl BoundReport {
    pub fn evaluate(summary: &GapSummary) -> Self {
        let (ast_bound, ast_valid) = ast_ucb_bound(summary);
        let analysis = transfer_analysis(summary);
        BoundReport {
            nt_bound: nt_ucb_bound(summary),
            ast_bound,
            ast_valid,
            arms: analysis.arms,
            crossover_episode: analysis.crossover_episode,
        }
    }
}
