//! Experiment runners: seeded Monte-Carlo loops behind each CLI subcommand.
//!
//! Every runner follows the same discipline: trials are independent rayon
//! tasks, each owning the stream `(seed, trial_index)`; shared inputs are
//! read-only; per-trial outputs are collected and reduced in trial order.
//! Results are therefore byte-identical across worker counts.

use rayon::prelude::*;

use crate::channel::{build_channel_matrix, ArrayGeometry, UserProfile};
use crate::interference::{
    instantaneous_interference, mean_interference, scaling_report, InterferenceBreakdown,
    ScalingReport,
};
use crate::performance::{capacity_per_user, gram_deviation, mrc_se_per_user, GramDeviation};
use crate::scheduler::drop_users_with;
use crate::{Error, Result};

use super::config::{ExperimentConfig, ExperimentKind};
use super::estimate_cdf;

/// Seeded Monte-Carlo results of a CDF experiment.
#[derive(Debug, Clone)]
pub struct TrialEnsemble {
    pub per_trial_values: Vec<f64>,
    pub cdf_grid: Vec<(f64, f64)>,
    pub mean: f64,
    pub std_error: f64,
}

impl TrialEnsemble {
    fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite per-trial value".into()));
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        let cdf_grid = estimate_cdf(&values)?;
        Ok(Self {
            per_trial_values: values,
            cdf_grid,
            mean,
            std_error,
        })
    }

    /// Nearest-rank quantile of the per-trial values.
    pub fn quantile(&self, p: f64) -> f64 {
        super::quantile(&self.per_trial_values, p)
    }
}

/// One user pair of a term-validation report.
#[derive(Debug, Clone)]
pub struct TermRow {
    /// 0-based user indices.
    pub k: usize,
    pub l: usize,
    pub closed_form: InterferenceBreakdown,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub z: f64,
}

/// Closed-form versus Monte-Carlo comparison over every user pair.
#[derive(Debug, Clone)]
pub struct TermReport {
    pub rows: Vec<TermRow>,
}

impl TermReport {
    /// All pairs agree with the closed form within `|z| <= threshold`.
    pub fn all_within(&self, threshold: f64) -> bool {
        self.rows
            .iter()
            .all(|r| r.z.is_finite() && r.z.abs() <= threshold)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

/// Mean MRC spectral efficiency at one antenna count.
#[derive(Debug, Clone, Copy)]
pub struct SaturationRow {
    pub m: usize,
    pub mean_se: f64,
    pub se_stderr: f64,
}

/// Capacity-per-user CDF under per-trial geometry and fading draws, with
/// optional user dropping.
pub fn run_cdf_experiment(config: &ExperimentConfig) -> Result<TrialEnsemble> {
    ensure_kind(config, ExperimentKind::Cdf)?;
    let m = config.m.as_scalar()?;
    let p_u = config.p_u_linear();
    let trials = config.trials();

    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = config.trial_stream(t).rng();
            let users = config.draw_users(m, &mut rng)?;
            let kept: Vec<UserProfile> = if config.drop_count > 0 {
                let decision = drop_users_with(&users, config.drop_count, config.drop_options())?;
                decision
                    .retained_indices()
                    .iter()
                    .map(|&i| users[i].clone())
                    .collect()
            } else {
                users
            };
            let g = build_channel_matrix(&kept, &mut rng)?;
            let d: Vec<f64> = kept.iter().map(|u| u.large_scale()).collect();
            capacity_per_user(&g, &d, p_u)
        })
        .collect::<Result<Vec<_>>>()?;

    TrialEnsemble::from_values(values)
}

/// Validate the closed-form mean interference against the Monte-Carlo mean
/// of `|g_k^H g_l|^2` for every user pair of one geometry draw.
pub fn run_term_validation(config: &ExperimentConfig) -> Result<TermReport> {
    ensure_kind(config, ExperimentKind::Terms)?;
    let m = config.m.as_scalar()?;
    let trials = config.trials();

    let users = config.draw_users(m, &mut config.geometry_stream(0).rng())?;
    let pairs: Vec<(usize, usize)> = (0..users.len())
        .flat_map(|k| ((k + 1)..users.len()).map(move |l| (k, l)))
        .collect();
    let closed: Vec<InterferenceBreakdown> = pairs
        .iter()
        .map(|&(k, l)| mean_interference(&users[k], &users[l]))
        .collect::<Result<Vec<_>>>()?;

    let samples: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let mut rng = config.trial_stream(t).rng();
            let g = build_channel_matrix(&users, &mut rng)?;
            pairs
                .iter()
                .map(|&(k, l)| {
                    instantaneous_interference(&g.column(k).into_owned(), &g.column(l).into_owned())
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = pairs
        .iter()
        .enumerate()
        .map(|(p, &(k, l))| {
            let mean = samples.iter().map(|row| row[p]).sum::<f64>() / trials as f64;
            let var = samples
                .iter()
                .map(|row| (row[p] - mean).powi(2))
                .sum::<f64>()
                / (trials.max(2) - 1) as f64;
            let se = (var / trials as f64).sqrt();
            let total = closed[p].total;
            let z = if se > 0.0 {
                (mean - total) / se
            } else if (mean - total).abs() <= 1e-9 * total.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY
            };
            TermRow {
                k,
                l,
                closed_form: closed[p],
                mc_mean: mean,
                mc_se: se,
                z,
            }
        })
        .collect();

    Ok(TermReport { rows })
}

/// Average MRC spectral efficiency per user over an `M` sweep for a
/// scenario-built pair. The nominal directions are drawn once per run, so
/// the sweep is a clean function of `M`; trials average over fading only.
pub fn run_saturation_sweep(config: &ExperimentConfig) -> Result<Vec<SaturationRow>> {
    ensure_kind(config, ExperimentKind::Saturation)?;
    let scenario = config
        .scenario
        .as_ref()
        .ok_or_else(|| Error::Config("field `scenario`: required for saturation".into()))?;
    let m_list = config.m.as_list();
    let min_m = *m_list.iter().min().expect("validated non-empty");
    let angles = scenario.draw_angles(&mut config.geometry_stream(0).rng(), min_m)?;
    let d = (
        config.large_scale.value_for(0),
        config.large_scale.value_for(1),
    );
    let p_u = config.p_u_linear();
    let trials = config.trials();

    let mut rows = Vec::with_capacity(m_list.len());
    for (i, &m) in m_list.iter().enumerate() {
        let geom = ArrayGeometry::with_spacing(m, config.spacing_wavelengths);
        let pair = scenario.build_at(geom, angles, d)?;
        let users = [pair.0, pair.1];
        let d_vec = [users[0].large_scale(), users[1].large_scale()];
        let values: Vec<f64> = (0..trials as u64)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let stream = ((i as u64) << 32) | t;
                let mut rng = config.trial_stream(stream).rng();
                let g = build_channel_matrix(&users, &mut rng)?;
                let se = mrc_se_per_user(&g, &d_vec, p_u)?;
                Ok(se.iter().sum::<f64>() / se.len() as f64)
            })
            .collect::<Result<Vec<_>>>()?;
        let ensemble = TrialEnsemble::from_values(values)?;
        rows.push(SaturationRow {
            m,
            mean_se: ensemble.mean,
            se_stderr: ensemble.std_error,
        });
    }
    Ok(rows)
}

/// C1-C3 scaling diagnostics for the configured scenario (or the i.i.d.
/// baseline when no scenario is set).
pub fn run_scaling_experiment(config: &ExperimentConfig) -> Result<ScalingReport> {
    ensure_kind(config, ExperimentKind::Scaling)?;
    let m_list = config.m.as_list();
    let min_m = *m_list.iter().min().expect("validated non-empty");
    let spacing = config.spacing_wavelengths;

    match &config.scenario {
        Some(scenario) => {
            let angles = scenario.draw_angles(&mut config.geometry_stream(0).rng(), min_m)?;
            scaling_report(
                |m| scenario.build_at(ArrayGeometry::with_spacing(m, spacing), angles, (1.0, 1.0)),
                &m_list,
            )
        }
        None => {
            let mut rng = config.geometry_stream(0).rng();
            let scenario = super::config::ScenarioConfig::Iid;
            let angles = scenario.draw_angles(&mut rng, min_m)?;
            scaling_report(
                |m| scenario.build_at(ArrayGeometry::with_spacing(m, spacing), angles, (1.0, 1.0)),
                &m_list,
            )
        }
    }
}

/// Gram-matrix concentration over an `M` sweep: Monte-Carlo worst entrywise
/// mean-square deviation plus the closed-form S-term variances.
pub fn run_gram_experiment(config: &ExperimentConfig) -> Result<Vec<GramDeviation>> {
    ensure_kind(config, ExperimentKind::Gram)?;
    let trials = config.trials();
    let mut rows = Vec::new();
    for (i, m) in config.m.as_list().into_iter().enumerate() {
        let mut rng = config.geometry_stream(100 + i as u64).rng();
        let users = config.draw_users(m, &mut rng)?;
        let sub_seed = config
            .seed
            .wrapping_add((i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        rows.push(gram_deviation(&users, trials, sub_seed)?);
    }
    Ok(rows)
}

/// Run the configured experiment and render its CSV document. Returns the
/// CSV plus the internal check verdict (`--check` gate): term validation
/// passes when every pair has `|z| <= 4`; the other experiments pass when
/// their outputs are finite and internally consistent.
pub fn run_to_csv(config: &ExperimentConfig) -> Result<(String, bool)> {
    match config.experiment {
        ExperimentKind::Cdf => {
            let ensemble = run_cdf_experiment(config)?;
            let check = cdf_is_consistent(&ensemble);
            Ok((super::output::render_cdf(config, &ensemble), check))
        }
        ExperimentKind::Terms => {
            let report = run_term_validation(config)?;
            ensure_finite(
                report
                    .rows
                    .iter()
                    .flat_map(|r| [r.closed_form.total, r.mc_mean, r.mc_se]),
                "terms",
            )?;
            let check = report.all_within(4.0);
            Ok((super::output::render_terms(config, &report), check))
        }
        ExperimentKind::Saturation => {
            let rows = run_saturation_sweep(config)?;
            ensure_finite(
                rows.iter().flat_map(|r| [r.mean_se, r.se_stderr]),
                "saturation",
            )?;
            Ok((super::output::render_saturation(config, &rows), true))
        }
        ExperimentKind::Scaling => {
            let report = run_scaling_experiment(config)?;
            ensure_finite(
                report
                    .c1_metric()
                    .iter()
                    .chain(report.c2_metric())
                    .chain(report.c3_metric())
                    .copied(),
                "scaling",
            )?;
            Ok((super::output::render_scaling(config, &report), true))
        }
        ExperimentKind::Gram => {
            let rows = run_gram_experiment(config)?;
            ensure_finite(
                rows.iter()
                    .flat_map(|r| [r.max_entry_msd, r.s1_var, r.s2_var, r.s3_var]),
                "gram",
            )?;
            Ok((super::output::render_gram(config, &rows), true))
        }
    }
}

fn cdf_is_consistent(ensemble: &TrialEnsemble) -> bool {
    let monotone = ensemble
        .cdf_grid
        .windows(2)
        .all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1);
    let in_range = ensemble
        .cdf_grid
        .iter()
        .all(|&(_, p)| (0.0..=1.0).contains(&p));
    let mean_ok = {
        let avg =
            ensemble.per_trial_values.iter().sum::<f64>() / ensemble.per_trial_values.len() as f64;
        (avg - ensemble.mean).abs() <= 1e-12 * ensemble.mean.abs().max(1.0)
    };
    monotone && in_range && mean_ok
}

fn ensure_finite(values: impl Iterator<Item = f64>, ctx: &str) -> Result<()> {
    for v in values {
        if !v.is_finite() {
            return Err(Error::Numerical(format!("{ctx}: non-finite output value")));
        }
    }
    Ok(())
}

fn ensure_kind(config: &ExperimentConfig, expected: ExperimentKind) -> Result<()> {
    if config.experiment != expected {
        return Err(Error::Config(format!(
            "field `experiment`: config declares {:?} but the {:?} runner was invoked",
            config.experiment, expected
        )));
    }
    Ok(())
}
