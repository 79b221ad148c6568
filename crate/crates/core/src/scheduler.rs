//! User dropping driven by the correlated-fading interference term: find the
//! users responsible for the largest aggregate `term2` and remove them.
//!
//! Scores aggregate pairwise quantities over the retained set, so each
//! removal changes the remaining scores; the greedy loop therefore
//! recomputes scores after every drop. Everything is deterministic: ties go
//! to the lowest user index and no randomness is involved.

use serde::{Deserialize, Serialize};

use crate::channel::UserProfile;
use crate::interference::mean_interference;
use crate::{Error, Result};

/// Which pairwise interference quantity drives the drop decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropMetric {
    /// The correlated-fading term `tr(R_l R_k) / ((K_k+1)(K_l+1))` alone.
    #[default]
    Term2,
    /// The full four-term mean interference power.
    Total,
}

/// How pairwise quantities aggregate into a per-user score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DropRule {
    /// Sum over all retained partners.
    #[default]
    #[serde(rename = "sum")]
    SumScore,
    /// Worst single retained partner.
    #[serde(rename = "max")]
    PairMax,
}

/// Scheduler configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct DropOptions {
    pub metric: DropMetric,
    pub rule: DropRule,
}

/// Outcome of a drop decision. Indices are 0-based user positions.
#[derive(Debug, Clone)]
pub struct DropDecision {
    dropped: Vec<usize>,
    retained: Vec<usize>,
    scores: Vec<f64>,
}

impl DropDecision {
    /// Users removed from service, in drop order.
    pub fn dropped_indices(&self) -> &[usize] {
        &self.dropped
    }

    /// Users kept in service, ascending.
    pub fn retained_indices(&self) -> &[usize] {
        &self.retained
    }

    /// Initial per-user aggregate scores over the full user set.
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }
}

/// Per-user aggregate `term2` over all other users.
pub fn rank_users_by_term2(users: &[UserProfile]) -> Result<Vec<f64>> {
    if users.len() < 2 {
        return Err(Error::Parameter(format!(
            "rank_users_by_term2: need at least 2 users, got {}",
            users.len()
        )));
    }
    let pairs = pairwise_matrix(users, DropMetric::Term2)?;
    let all: Vec<usize> = (0..users.len()).collect();
    Ok((0..users.len())
        .map(|k| aggregate(&pairs, users.len(), k, &all, DropRule::SumScore))
        .collect())
}

/// Greedily remove `n_drop` users by aggregate `term2` score.
pub fn drop_users(users: &[UserProfile], n_drop: usize) -> Result<DropDecision> {
    drop_users_with(users, n_drop, DropOptions::default())
}

/// Greedy removal with an explicit metric and aggregation rule. Scores are
/// recomputed over the retained set after each removal; ties break toward
/// the lowest index.
pub fn drop_users_with(
    users: &[UserProfile],
    n_drop: usize,
    options: DropOptions,
) -> Result<DropDecision> {
    let l = users.len();
    if l < 2 {
        return Err(Error::Parameter(format!(
            "drop_users: need at least 2 users, got {l}"
        )));
    }
    if n_drop >= l {
        return Err(Error::Parameter(format!(
            "drop_users: cannot drop {n_drop} of {l} users"
        )));
    }
    let pairs = pairwise_matrix(users, options.metric)?;
    let all: Vec<usize> = (0..l).collect();
    let scores: Vec<f64> = (0..l)
        .map(|k| aggregate(&pairs, l, k, &all, options.rule))
        .collect();

    let mut retained = all;
    let mut dropped = Vec::with_capacity(n_drop);
    for _ in 0..n_drop {
        let mut worst = retained[0];
        let mut worst_score = aggregate(&pairs, l, worst, &retained, options.rule);
        for &k in &retained[1..] {
            let score = aggregate(&pairs, l, k, &retained, options.rule);
            if score > worst_score {
                worst = k;
                worst_score = score;
            }
        }
        retained.retain(|&k| k != worst);
        dropped.push(worst);
    }

    Ok(DropDecision {
        dropped,
        retained,
        scores,
    })
}

/// Symmetric matrix of the pairwise drop quantity, flattened row-major.
fn pairwise_matrix(users: &[UserProfile], metric: DropMetric) -> Result<Vec<f64>> {
    let l = users.len();
    let mut pairs = vec![0.0; l * l];
    for k in 0..l {
        for j in 0..k {
            let breakdown = mean_interference(&users[k], &users[j])?;
            let value = match metric {
                DropMetric::Term2 => breakdown.term2,
                DropMetric::Total => breakdown.total,
            };
            pairs[k * l + j] = value;
            pairs[j * l + k] = value;
        }
    }
    Ok(pairs)
}

fn aggregate(pairs: &[f64], l: usize, k: usize, retained: &[usize], rule: DropRule) -> f64 {
    let partner_values = retained
        .iter()
        .filter(|&&j| j != k)
        .map(|&j| pairs[k * l + j]);
    match rule {
        DropRule::SumScore => partner_values.sum(),
        DropRule::PairMax => partner_values.fold(0.0, f64::max),
    }
}
