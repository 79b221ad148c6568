//! Declarative experiment configuration: one JSON document per run.
//!
//! Unknown keys are rejected so typos fail fast. Angles are given in degrees
//! at this layer and converted to radians internally; transmit power is
//! given in dB and converted to linear scale once at validation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::TAU;

use crate::channel::{ula_los, ArrayGeometry, UserProfile};
use crate::scenarios::{ScenarioKind, ScenarioSpec};
use crate::scheduler::{DropMetric, DropOptions, DropRule};
use crate::{Error, Result};

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Cdf,
    Saturation,
    Terms,
    Scaling,
    Gram,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Cdf => "cdf",
            ExperimentKind::Saturation => "saturation",
            ExperimentKind::Terms => "terms",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Gram => "gram",
        }
    }

    fn default_trials(&self) -> usize {
        match self {
            ExperimentKind::Cdf => 1_000,
            ExperimentKind::Saturation => 500,
            ExperimentKind::Terms => 10_000,
            ExperimentKind::Scaling => 1,
            ExperimentKind::Gram => 10_000,
        }
    }
}

/// Antenna count: a single value or a sweep list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MSpec {
    Scalar(usize),
    List(Vec<usize>),
}

impl MSpec {
    pub fn as_scalar(&self) -> Result<usize> {
        match self {
            MSpec::Scalar(m) => Ok(*m),
            MSpec::List(_) => Err(Error::Config(
                "field `m`: this experiment takes a single antenna count".into(),
            )),
        }
    }

    pub fn as_list(&self) -> Vec<usize> {
        match self {
            MSpec::Scalar(m) => vec![*m],
            MSpec::List(v) => v.clone(),
        }
    }
}

/// Azimuth angular spread in degrees: one value for all users or per-user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSpec {
    Scalar(f64),
    PerUser(Vec<f64>),
}

/// How per-user Ricean K-factors are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum KFactorMode {
    #[default]
    Zero,
    Fixed {
        value: f64,
    },
    Uniform {
        low: f64,
        high: f64,
    },
}

impl KFactorMode {
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            KFactorMode::Zero => 0.0,
            KFactorMode::Fixed { value } => *value,
            KFactorMode::Uniform { low, high } => {
                if high > low {
                    rng.random_range(*low..*high)
                } else {
                    *low
                }
            }
        }
    }
}

/// Large-scale fading coefficients: the string `"unit"` or an explicit
/// per-user list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LargeScaleSpec {
    Named(String),
    Values(Vec<f64>),
}

impl Default for LargeScaleSpec {
    fn default() -> Self {
        LargeScaleSpec::Named("unit".into())
    }
}

impl LargeScaleSpec {
    pub fn value_for(&self, user: usize) -> f64 {
        match self {
            LargeScaleSpec::Named(_) => 1.0,
            LargeScaleSpec::Values(v) => v[user],
        }
    }
}

/// Scenario description at the config layer (angles in degrees). The extra
/// `iid` kind is the benign baseline for saturation sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    EigenAligned {
        k_factors: (f64, f64),
        delta_deg: f64,
    },
    SharedSpikedCovariance {
        k_factors: (f64, f64),
    },
    LosAligned {
        k_factors: (f64, f64),
        delta_deg: f64,
        #[serde(default)]
        alpha_phase_deg: f64,
    },
    LosNearAligned {
        k_factors: (f64, f64),
        delta_deg: f64,
        gamma: f64,
        #[serde(default = "default_c_exponent")]
        c_exponent: f64,
    },
    Iid,
}

fn default_c_exponent() -> f64 {
    1.0
}

impl ScenarioConfig {
    fn validate(&self) -> Result<()> {
        let check_k = |k: (f64, f64)| -> Result<()> {
            for v in [k.0, k.1] {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!(
                        "field `scenario.k_factors`: must be finite and >= 0, got {v}"
                    )));
                }
            }
            Ok(())
        };
        let check_delta = |d: f64| -> Result<()> {
            if !(d > 0.0 && d <= 180.0) {
                return Err(Error::Config(format!(
                    "field `scenario.delta_deg`: must be in (0, 180], got {d}"
                )));
            }
            Ok(())
        };
        match self {
            ScenarioConfig::EigenAligned {
                k_factors,
                delta_deg,
            } => {
                check_k(*k_factors)?;
                check_delta(*delta_deg)
            }
            ScenarioConfig::SharedSpikedCovariance { k_factors } => check_k(*k_factors),
            ScenarioConfig::LosAligned {
                k_factors,
                delta_deg,
                ..
            } => {
                check_k(*k_factors)?;
                check_delta(*delta_deg)
            }
            ScenarioConfig::LosNearAligned {
                k_factors,
                delta_deg,
                gamma,
                c_exponent,
            } => {
                check_k(*k_factors)?;
                check_delta(*delta_deg)?;
                if !(*gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::Config(format!(
                        "field `scenario.gamma`: must be finite and > 0, got {gamma}"
                    )));
                }
                if *c_exponent < 1.0 || c_exponent.is_nan() {
                    return Err(Error::Config(format!(
                        "field `scenario.c_exponent`: must be >= 1, got {c_exponent}"
                    )));
                }
                Ok(())
            }
            ScenarioConfig::Iid => Ok(()),
        }
    }

    fn to_spec(&self) -> Option<ScenarioSpec> {
        match *self {
            ScenarioConfig::EigenAligned {
                k_factors,
                delta_deg,
            } => Some(ScenarioSpec {
                kind: ScenarioKind::EigenAligned,
                k_factors,
                delta: delta_deg.to_radians(),
                alpha_phase: 0.0,
                gamma: None,
                c_exponent: 1.0,
            }),
            ScenarioConfig::SharedSpikedCovariance { k_factors } => Some(ScenarioSpec {
                kind: ScenarioKind::SharedSpikedCovariance,
                k_factors,
                delta: 0.0,
                alpha_phase: 0.0,
                gamma: None,
                c_exponent: 1.0,
            }),
            ScenarioConfig::LosAligned {
                k_factors,
                delta_deg,
                alpha_phase_deg,
            } => Some(ScenarioSpec {
                kind: ScenarioKind::LosAligned,
                k_factors,
                delta: delta_deg.to_radians(),
                alpha_phase: alpha_phase_deg.to_radians(),
                gamma: None,
                c_exponent: 1.0,
            }),
            ScenarioConfig::LosNearAligned {
                k_factors,
                delta_deg,
                gamma,
                c_exponent,
            } => Some(ScenarioSpec {
                kind: ScenarioKind::LosNearAligned,
                k_factors,
                delta: delta_deg.to_radians(),
                alpha_phase: 0.0,
                gamma: Some(gamma),
                c_exponent,
            }),
            ScenarioConfig::Iid => None,
        }
    }

    /// Draw the nominal directions for this scenario. For the near-aligned
    /// ULA scenario the primary direction is redrawn until
    /// `sin(theta) + gamma / M^c` is feasible at the smallest `M` of the
    /// sweep (feasibility at the smallest `M` implies it everywhere).
    pub fn draw_angles<R: Rng>(&self, rng: &mut R, min_m: usize) -> Result<(f64, f64)> {
        let primary = rng.random_range(0.0..TAU);
        let secondary = rng.random_range(0.0..TAU);
        if let ScenarioConfig::LosNearAligned {
            gamma, c_exponent, ..
        } = self
        {
            let offset = gamma / (min_m as f64).powf(*c_exponent);
            let mut theta = primary;
            for _ in 0..1_000 {
                if (theta.sin() + offset).abs() <= 1.0 {
                    return Ok((theta, secondary));
                }
                theta = rng.random_range(0.0..TAU);
            }
            return Err(Error::Parameter(format!(
                "could not draw a feasible direction for gamma = {gamma} at M = {min_m}"
            )));
        }
        Ok((primary, secondary))
    }

    /// Build the pair at a given antenna count, attaching large-scale
    /// coefficients.
    pub fn build_at(
        &self,
        geom: ArrayGeometry,
        angles: (f64, f64),
        large_scale: (f64, f64),
    ) -> Result<(UserProfile, UserProfile)> {
        let (u1, u2) = match self.to_spec() {
            Some(spec) => spec.build(geom, angles)?,
            None => (
                UserProfile::iid(0.0, ula_los(geom, angles.0), 1.0)?,
                UserProfile::iid(0.0, ula_los(geom, angles.1), 1.0)?,
            ),
        };
        Ok((
            u1.with_large_scale(large_scale.0)?,
            u2.with_large_scale(large_scale.1)?,
        ))
    }
}

/// Full declarative description of one experiment run.
///
/// Defaults mirror the reference setup: `M = 100`, `L = 10`, `p_u = 0` dB,
/// half-wavelength spacing, nominal directions i.i.d. uniform on `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_m")]
    pub m: MSpec,
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default)]
    pub p_u_db: f64,
    #[serde(default = "default_spacing")]
    pub spacing_wavelengths: f64,
    /// `null` (or omitted) selects uncorrelated fading (`R = I`).
    #[serde(default)]
    pub delta_deg: Option<DeltaSpec>,
    #[serde(default)]
    pub k_factor_mode: KFactorMode,
    #[serde(default)]
    pub large_scale: LargeScaleSpec,
    #[serde(default)]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default)]
    pub drop_count: usize,
    #[serde(default)]
    pub drop_metric: DropMetric,
    #[serde(default)]
    pub drop_rule: DropRule,
    /// Defaults per experiment when omitted (cdf 10^3, terms 10^4, ...).
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn default_m() -> MSpec {
    MSpec::Scalar(100)
}

fn default_l() -> usize {
    10
}

fn default_spacing() -> f64 {
    0.5
}

impl ExperimentConfig {
    /// Parse a JSON document and validate it.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Validate fields and resolve the per-experiment trial default. Called
    /// again after CLI overrides.
    pub fn validate(&mut self) -> Result<()> {
        if self.trials.is_none() {
            self.trials = Some(self.experiment.default_trials());
        }
        let trials = self.trials.unwrap();
        if trials < 1 {
            return Err(Error::Config("field `trials`: must be >= 1".into()));
        }
        if self.l < 1 {
            return Err(Error::Config("field `l`: must be >= 1".into()));
        }
        if !self.p_u_db.is_finite() {
            return Err(Error::Config("field `p_u_db`: must be finite".into()));
        }
        if !(self.spacing_wavelengths > 0.0 && self.spacing_wavelengths.is_finite()) {
            return Err(Error::Config(
                "field `spacing_wavelengths`: must be finite and > 0".into(),
            ));
        }
        let m_list = self.m.as_list();
        if m_list.is_empty() {
            return Err(Error::Config("field `m`: list must be non-empty".into()));
        }
        if m_list.iter().any(|&m| m < 1) {
            return Err(Error::Config(
                "field `m`: antenna counts must be >= 1".into(),
            ));
        }
        match &self.delta_deg {
            None => {}
            Some(DeltaSpec::Scalar(d)) => {
                if !(*d > 0.0 && *d <= 180.0) {
                    return Err(Error::Config(format!(
                        "field `delta_deg`: must be in (0, 180], got {d}"
                    )));
                }
            }
            Some(DeltaSpec::PerUser(list)) => {
                if list.len() != self.l {
                    return Err(Error::Config(format!(
                        "field `delta_deg`: per-user list has {} entries for l = {}",
                        list.len(),
                        self.l
                    )));
                }
                if list.iter().any(|d| !(*d > 0.0 && *d <= 180.0)) {
                    return Err(Error::Config(
                        "field `delta_deg`: entries must be in (0, 180]".into(),
                    ));
                }
            }
        }
        match &self.k_factor_mode {
            KFactorMode::Zero => {}
            KFactorMode::Fixed { value } => {
                if !(*value >= 0.0 && value.is_finite()) {
                    return Err(Error::Config(
                        "field `k_factor_mode.value`: must be finite and >= 0".into(),
                    ));
                }
            }
            KFactorMode::Uniform { low, high } => {
                if !(*low >= 0.0 && low.is_finite() && high.is_finite() && high >= low) {
                    return Err(Error::Config(
                        "field `k_factor_mode`: need 0 <= low <= high".into(),
                    ));
                }
            }
        }
        match &self.large_scale {
            LargeScaleSpec::Named(name) if name == "unit" => {}
            LargeScaleSpec::Named(name) => {
                return Err(Error::Config(format!(
                    "field `large_scale`: unknown name {name:?} (expected \"unit\" or a list)"
                )));
            }
            LargeScaleSpec::Values(values) => {
                if values.len() != self.l {
                    return Err(Error::Config(format!(
                        "field `large_scale`: {} entries for l = {}",
                        values.len(),
                        self.l
                    )));
                }
                if values.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
                    return Err(Error::Config(
                        "field `large_scale`: entries must be finite and > 0".into(),
                    ));
                }
            }
        }
        if let Some(scenario) = &self.scenario {
            scenario.validate()?;
        }
        if self.drop_count > 0 && self.drop_count >= self.l {
            return Err(Error::Config(format!(
                "field `drop_count`: cannot drop {} of {} users",
                self.drop_count, self.l
            )));
        }

        match self.experiment {
            ExperimentKind::Cdf => {
                self.m.as_scalar()?;
            }
            ExperimentKind::Terms => {
                self.m.as_scalar()?;
                if self.l < 2 {
                    return Err(Error::Config(
                        "field `l`: term validation needs at least 2 users".into(),
                    ));
                }
            }
            ExperimentKind::Saturation => {
                if self.l != 2 {
                    return Err(Error::Config(
                        "field `l`: saturation sweeps are two-user experiments".into(),
                    ));
                }
                if self.scenario.is_none() {
                    return Err(Error::Config(
                        "field `scenario`: saturation sweeps need a scenario (use kind \"iid\" for the baseline)".into(),
                    ));
                }
            }
            ExperimentKind::Scaling => {
                if m_list.len() < 4 {
                    return Err(Error::Config(
                        "field `m`: scaling experiments need at least 4 antenna counts".into(),
                    ));
                }
                if m_list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config(
                        "field `m`: sweep list must be strictly increasing".into(),
                    ));
                }
            }
            ExperimentKind::Gram => {
                if self.l < 2 {
                    return Err(Error::Config(
                        "field `l`: gram experiments need at least 2 users".into(),
                    ));
                }
                if trials < 100 {
                    return Err(Error::Config(
                        "field `trials`: gram experiments need at least 100 trials".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Linear transmit power `10^(p_u_db / 10)`.
    pub fn p_u_linear(&self) -> f64 {
        10f64.powf(self.p_u_db / 10.0)
    }

    pub fn trials(&self) -> usize {
        self.trials.expect("config validated")
    }

    /// Angular spread (radians) for one user, `None` meaning `R = I`.
    pub fn delta_for_user(&self, user: usize) -> Option<f64> {
        match &self.delta_deg {
            None => None,
            Some(DeltaSpec::Scalar(d)) => Some(d.to_radians()),
            Some(DeltaSpec::PerUser(list)) => Some(list[user].to_radians()),
        }
    }

    pub fn drop_options(&self) -> DropOptions {
        DropOptions {
            metric: self.drop_metric,
            rule: self.drop_rule,
        }
    }

    /// SHA-256 of the canonical JSON serialization; recorded in every output
    /// so results are traceable to the exact effective configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    /// Per-trial sample stream.
    pub fn trial_stream(&self, trial: u64) -> crate::channel::RngStream {
        crate::channel::RngStream::new(self.seed, trial)
    }

    /// Stream reserved for geometry draws, disjoint from trial streams.
    pub fn geometry_stream(&self, index: u64) -> crate::channel::RngStream {
        crate::channel::RngStream::new(self.seed, (1 << 63) | index)
    }

    /// Draw the full user population for one geometry realization: nominal
    /// directions i.i.d. uniform on `[0, 2 pi)`, K-factors per mode, one-ring
    /// or identity covariance per `delta_deg`.
    pub fn draw_users(&self, m: usize, rng: &mut ChaCha8Rng) -> Result<Vec<UserProfile>> {
        let geom = ArrayGeometry::with_spacing(m, self.spacing_wavelengths);
        (0..self.l)
            .map(|k| {
                let theta = rng.random_range(0.0..TAU);
                let k_factor = self.k_factor_mode.draw(rng);
                let d = self.large_scale.value_for(k);
                match self.delta_for_user(k) {
                    None => UserProfile::iid(k_factor, ula_los(geom, theta), d),
                    Some(delta) => UserProfile::one_ring(geom, k_factor, theta, delta, d),
                }
            })
            .collect()
    }
}
