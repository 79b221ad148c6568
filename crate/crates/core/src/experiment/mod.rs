//! Seeded Monte-Carlo experiment harness: declarative JSON configs, the
//! runners behind each CLI subcommand, empirical CDF estimation, and CSV
//! output.
//!
//! Reproducibility contract: a config plus its seed fully determines every
//! output byte. Trials own disjoint random streams indexed by trial number,
//! and reductions happen in trial order, so the worker count never changes a
//! result.

pub mod config;
pub mod output;
mod run;

pub use config::{
    DeltaSpec, ExperimentConfig, ExperimentKind, KFactorMode, LargeScaleSpec, MSpec, ScenarioConfig,
};
pub use run::{
    run_cdf_experiment, run_gram_experiment, run_saturation_sweep, run_scaling_experiment,
    run_term_validation, run_to_csv, SaturationRow, TermReport, TermRow, TrialEnsemble,
};

use crate::{Error, Result};

/// Empirical CDF: right-continuous steps at the sorted sample points, one
/// step per distinct value.
pub fn estimate_cdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::Parameter("estimate_cdf: empty input".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("estimate_cdf: non-finite sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = sorted.len() as f64;
    let mut grid: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let prob = (i + 1) as f64 / n;
        match grid.last_mut() {
            Some(last) if last.0 == v => last.1 = prob,
            _ => grid.push((v, prob)),
        }
    }
    Ok(grid)
}

/// Nearest-rank quantile: the `ceil(p n)`-th smallest sample.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    if p <= 0.0 {
        return sorted[0];
    }
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}
