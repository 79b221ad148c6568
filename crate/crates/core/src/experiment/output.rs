//! CSV rendering with fixed headers. Leading comment lines record the tool
//! version, the config hash, and the seed, so every file is traceable to the
//! exact run that produced it.

use crate::interference::ScalingReport;
use crate::performance::GramDeviation;

use super::config::ExperimentConfig;
use super::run::{SaturationRow, TermReport, TrialEnsemble};

fn preamble(config: &ExperimentConfig) -> String {
    format!(
        "# favprop v{}\n# experiment={}\n# config_hash={}\n# seed={}\n",
        env!("CARGO_PKG_VERSION"),
        config.experiment.as_str(),
        config.hash(),
        config.seed,
    )
}

pub fn render_cdf(config: &ExperimentConfig, ensemble: &TrialEnsemble) -> String {
    let mut out = preamble(config);
    out.push_str("value,prob\n");
    for &(value, prob) in &ensemble.cdf_grid {
        out.push_str(&format!("{value},{prob}\n"));
    }
    out
}

pub fn render_terms(config: &ExperimentConfig, report: &TermReport) -> String {
    let mut out = preamble(config);
    out.push_str("k,l,term1,term2,term3,term4,total,mc_mean,mc_se,z\n");
    for row in &report.rows {
        let b = &row.closed_form;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.k + 1,
            row.l + 1,
            b.term1,
            b.term2,
            b.term3,
            b.term4,
            b.total,
            row.mc_mean,
            row.mc_se,
            row.z,
        ));
    }
    out
}

pub fn render_scaling(config: &ExperimentConfig, report: &ScalingReport) -> String {
    let mut out = preamble(config);
    let slopes = report.fitted_slopes();
    let classes = report.classifications();
    for (i, name) in ["c1", "c2", "c3"].iter().enumerate() {
        out.push_str(&format!(
            "# {name}_slope={} {name}_class={}\n",
            slopes[i],
            classes[i].as_str()
        ));
    }
    out.push_str("M,c1,c2,c3\n");
    for (i, &m) in report.m_values().iter().enumerate() {
        out.push_str(&format!(
            "{m},{},{},{}\n",
            report.c1_metric()[i],
            report.c2_metric()[i],
            report.c3_metric()[i],
        ));
    }
    out
}

pub fn render_saturation(config: &ExperimentConfig, rows: &[SaturationRow]) -> String {
    let mut out = preamble(config);
    out.push_str("M,mean_se,se_stderr\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.m, row.mean_se, row.se_stderr));
    }
    out
}

pub fn render_gram(config: &ExperimentConfig, rows: &[GramDeviation]) -> String {
    let mut out = preamble(config);
    out.push_str("M,max_entry_msd,s1_var,s2_var,s3_var\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.m, row.max_entry_msd, row.s1_var, row.s2_var, row.s3_var,
        ));
    }
    out
}
