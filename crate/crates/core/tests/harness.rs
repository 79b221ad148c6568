//! Integration tests for the experiment harness: runner behavior, CSV
//! schemas, and reproducibility across worker counts.

use favprop_core::experiment::{
    run_cdf_experiment, run_gram_experiment, run_saturation_sweep, run_scaling_experiment,
    run_term_validation, run_to_csv, ExperimentConfig,
};
use favprop_core::interference::ScalingClass;

fn config(json: serde_json::Value) -> ExperimentConfig {
    ExperimentConfig::from_json(&json.to_string()).unwrap()
}

#[test]
fn cdf_runner_invariants() {
    let cfg = config(serde_json::json!({
        "experiment": "cdf",
        "m": 24,
        "l": 4,
        "delta_deg": 20.0,
        "trials": 60,
        "seed": 5
    }));
    let ensemble = run_cdf_experiment(&cfg).unwrap();
    assert_eq!(ensemble.per_trial_values.len(), 60);
    // CDF nondecreasing in value and probability, ending at 1
    for w in ensemble.cdf_grid.windows(2) {
        assert!(w[0].0 < w[1].0);
        assert!(w[0].1 <= w[1].1);
    }
    assert_eq!(ensemble.cdf_grid.last().unwrap().1, 1.0);
    // mean equals the trial average exactly as computed
    let avg = ensemble.per_trial_values.iter().sum::<f64>() / 60.0;
    assert!((ensemble.mean - avg).abs() <= 1e-12 * avg);

    // reproducible
    let again = run_cdf_experiment(&cfg).unwrap();
    assert_eq!(ensemble.per_trial_values, again.per_trial_values);
}

#[test]
fn cdf_dropping_users_changes_population_size() {
    let base = serde_json::json!({
        "experiment": "cdf",
        "m": 24,
        "l": 5,
        "delta_deg": 10.0,
        "trials": 40,
        "seed": 9
    });
    let no_drop = run_cdf_experiment(&config(base.clone())).unwrap();
    let mut with = base;
    with["drop_count"] = serde_json::json!(2);
    let dropped = run_cdf_experiment(&config(with)).unwrap();
    assert_eq!(dropped.per_trial_values.len(), 40);
    assert!(no_drop.mean.is_finite() && dropped.mean.is_finite());
}

#[test]
fn terms_runner_iid_matches_closed_form() {
    let cfg = config(serde_json::json!({
        "experiment": "terms",
        "m": 32,
        "l": 3,
        "trials": 20000,
        "seed": 3
    }));
    let report = run_term_validation(&cfg).unwrap();
    assert_eq!(report.rows.len(), 3);
    for row in &report.rows {
        // Rayleigh identity case: total is exactly M
        assert!((row.closed_form.total - 32.0).abs() < 1e-9);
        assert!(row.z.abs() <= 4.0, "z = {}", row.z);
    }
    assert!(report.all_within(4.0));
}

#[test]
fn terms_runner_ricean_geometry_passes() {
    let cfg = config(serde_json::json!({
        "experiment": "terms",
        "m": 24,
        "l": 3,
        "delta_deg": 30.0,
        "k_factor_mode": {"mode": "uniform", "low": 0.0, "high": 2.0},
        "trials": 30000,
        "seed": 17
    }));
    let report = run_term_validation(&cfg).unwrap();
    assert!(report.all_within(4.0), "max |z| = {}", report.max_abs_z());
}

#[test]
fn scenario_3_term3_dominates_at_high_k() {
    use favprop_core::channel::ArrayGeometry;
    use favprop_core::interference::mean_interference;
    use favprop_core::scenarios::build_scenario_3;

    let (u1, u2) = build_scenario_3(ArrayGeometry::new(64), 0.7, 0.0, (10.0, 10.0), 0.5).unwrap();
    let b = mean_interference(&u1, &u2).unwrap();
    assert!(b.term3 / b.total > 0.9, "term3 share {}", b.term3 / b.total);
}

#[test]
fn saturation_baseline_grows_and_aligned_saturates() {
    let baseline = config(serde_json::json!({
        "experiment": "saturation",
        "m": [32, 64, 128],
        "l": 2,
        "scenario": {"kind": "iid"},
        "large_scale": [0.749, 0.546],
        "trials": 150,
        "seed": 2
    }));
    let rows = run_saturation_sweep(&baseline).unwrap();
    assert!(
        rows[2].mean_se - rows[1].mean_se > 0.5,
        "iid growth too slow"
    );

    let aligned = config(serde_json::json!({
        "experiment": "saturation",
        "m": [32, 64, 128],
        "l": 2,
        "scenario": {"kind": "los_aligned", "k_factors": [1.0, 1.0], "delta_deg": 60.0},
        "large_scale": [0.749, 0.546],
        "trials": 150,
        "seed": 2
    }));
    let rows = run_saturation_sweep(&aligned).unwrap();
    assert!(
        (rows[2].mean_se - rows[1].mean_se).abs() < 0.1,
        "aligned LoS should saturate, got {} -> {}",
        rows[1].mean_se,
        rows[2].mean_se
    );
}

#[test]
fn scaling_runner_iid_classifies_vanishing() {
    let cfg = config(serde_json::json!({
        "experiment": "scaling",
        "m": [16, 32, 64, 128, 256],
        "l": 2,
        "seed": 4
    }));
    let report = run_scaling_experiment(&cfg).unwrap();
    let slope = report.fitted_slopes()[1];
    assert!((slope + 1.0).abs() <= 0.01, "c2 slope {slope}");
    assert_eq!(report.classifications()[1], ScalingClass::Vanishing);
}

#[test]
fn scaling_runner_spiked_classifies_non_vanishing() {
    let cfg = config(serde_json::json!({
        "experiment": "scaling",
        "m": [16, 32, 64, 128, 256],
        "l": 2,
        "scenario": {"kind": "shared_spiked_covariance", "k_factors": [0.0, 0.0]},
        "seed": 4
    }));
    let report = run_scaling_experiment(&cfg).unwrap();
    assert_eq!(report.classifications()[1], ScalingClass::NonVanishing);
    let last = *report.c2_metric().last().unwrap();
    assert!((last - 0.25).abs() < 0.01, "c2 at M=256 is {last}");
}

#[test]
fn gram_runner_iid_follows_one_over_m() {
    let cfg = config(serde_json::json!({
        "experiment": "gram",
        "m": [32, 64],
        "l": 2,
        "trials": 400,
        "seed": 6
    }));
    let rows = run_gram_experiment(&cfg).unwrap();
    assert_eq!(rows[0].s3_var, 1.0 / 32.0);
    assert_eq!(rows[1].s3_var, 1.0 / 64.0);
    assert_eq!(rows[0].s1_var, 0.0);
}

#[test]
fn csv_documents_have_fixed_headers_and_metadata() {
    let cfg = config(serde_json::json!({
        "experiment": "cdf",
        "m": 16,
        "l": 3,
        "trials": 25,
        "seed": 12
    }));
    let (csv, check) = run_to_csv(&cfg).unwrap();
    assert!(check);
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# favprop v"));
    assert_eq!(lines[1], "# experiment=cdf");
    assert!(lines[2].starts_with("# config_hash="));
    assert_eq!(lines[3], "# seed=12");
    assert_eq!(lines[4], "value,prob");

    let scaling = config(serde_json::json!({
        "experiment": "scaling",
        "m": [8, 16, 32, 64],
        "l": 2,
        "seed": 1
    }));
    let (csv, _) = run_to_csv(&scaling).unwrap();
    assert!(csv.lines().any(|l| l == "M,c1,c2,c3"));
    assert!(csv.lines().any(|l| l.starts_with("# c2_slope=")));

    let terms = config(serde_json::json!({
        "experiment": "terms",
        "m": 8,
        "l": 2,
        "trials": 500,
        "seed": 1
    }));
    let (csv, _) = run_to_csv(&terms).unwrap();
    assert!(csv
        .lines()
        .any(|l| l == "k,l,term1,term2,term3,term4,total,mc_mean,mc_se,z"));

    let saturation = config(serde_json::json!({
        "experiment": "saturation",
        "m": [8, 16],
        "l": 2,
        "scenario": {"kind": "iid"},
        "trials": 20,
        "seed": 1
    }));
    let (csv, _) = run_to_csv(&saturation).unwrap();
    assert!(csv.lines().any(|l| l == "M,mean_se,se_stderr"));

    let gram = config(serde_json::json!({
        "experiment": "gram",
        "m": 16,
        "l": 2,
        "trials": 150,
        "seed": 1
    }));
    let (csv, _) = run_to_csv(&gram).unwrap();
    assert!(csv
        .lines()
        .any(|l| l == "M,max_entry_msd,s1_var,s2_var,s3_var"));
}

#[test]
fn csv_hash_tracks_config_mutations() {
    let base = serde_json::json!({
        "experiment": "cdf",
        "m": 16,
        "l": 3,
        "trials": 10,
        "seed": 12
    });
    let (a, _) = run_to_csv(&config(base.clone())).unwrap();
    let mut mutated = base;
    mutated["trials"] = serde_json::json!(11);
    let (b, _) = run_to_csv(&config(mutated)).unwrap();
    let hash = |csv: &str| {
        csv.lines()
            .find(|l| l.starts_with("# config_hash="))
            .unwrap()
            .to_string()
    };
    assert_ne!(hash(&a), hash(&b));
}

#[test]
fn byte_identical_across_thread_counts() {
    let configs = vec![
        serde_json::json!({
            "experiment": "cdf",
            "m": 24,
            "l": 4,
            "delta_deg": 15.0,
            "k_factor_mode": {"mode": "uniform", "low": 0.0, "high": 2.0},
            "drop_count": 1,
            "trials": 40,
            "seed": 31
        }),
        serde_json::json!({
            "experiment": "terms",
            "m": 16,
            "l": 3,
            "delta_deg": 25.0,
            "trials": 2000,
            "seed": 31
        }),
        serde_json::json!({
            "experiment": "saturation",
            "m": [16, 32],
            "l": 2,
            "scenario": {"kind": "los_aligned", "k_factors": [1.0, 1.0], "delta_deg": 60.0},
            "trials": 50,
            "seed": 31
        }),
        serde_json::json!({
            "experiment": "gram",
            "m": 16,
            "l": 2,
            "trials": 200,
            "seed": 31
        }),
    ];
    for json in configs {
        let cfg = config(json.clone());
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_to_csv(&cfg).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_to_csv(&cfg).unwrap());
        assert_eq!(single.0, multi.0, "thread count changed output for {json}");
    }
}

#[test]
fn runner_rejects_mismatched_experiment_kind() {
    let cfg = config(serde_json::json!({
        "experiment": "cdf",
        "m": 16,
        "l": 2,
        "trials": 5,
        "seed": 0
    }));
    assert!(run_term_validation(&cfg).is_err());
    assert!(run_saturation_sweep(&cfg).is_err());
}
