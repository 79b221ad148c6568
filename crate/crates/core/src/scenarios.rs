//! Constructors for the four failure scenarios that break channel
//! orthogonality, plus the closed-form limit of the near-aligned ULA case.
//!
//! - Scenario 1 (`EigenAligned`): one user's LoS response aligned with the
//!   principal eigenvector of the other user's covariance.
//! - Scenario 2 (`SharedSpikedCovariance`): both users share a spiked
//!   diagonal covariance whose top eigenvalue is `M/2`.
//! - Scenario 3 (`LosAligned`): identical LoS responses up to a unit phase.
//! - Scenario 4 (`LosNearAligned`): ULA LoS responses whose sine difference
//!   shrinks as `gamma / M^c`, leaving a Dirichlet-kernel residue.

use num_complex::Complex64;

use crate::channel::{k_factor_weight, one_ring_with_eigen, ula_los, ArrayGeometry, UserProfile};
use crate::linalg::{sqrt_from_eigen, CMatrix, CVector};
use crate::{Error, Result};

/// Which orthogonality-breaking construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    EigenAligned,
    SharedSpikedCovariance,
    LosAligned,
    LosNearAligned,
}

/// Declarative description of a scenario. Nominal directions are not part of
/// the description: the caller draws them and passes them to
/// [`ScenarioSpec::build`]. The experiment config exposes this with angles
/// in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// Ricean K-factors of the pair (linear scale).
    pub k_factors: (f64, f64),
    /// Angular spread (radians) wherever a one-ring covariance is used.
    pub delta: f64,
    /// LoS phase offset for `LosAligned` (`|alpha| = 1`).
    pub alpha_phase: f64,
    /// Angular-difference scale for `LosNearAligned`; required for that kind.
    pub gamma: Option<f64>,
    /// Exponent `c` in the `gamma / M^c` angular difference.
    pub c_exponent: f64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ScenarioKind::LosNearAligned => {
                let gamma = self.gamma.ok_or_else(|| {
                    Error::Parameter("gamma is required for the los_near_aligned scenario".into())
                })?;
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "gamma must be finite and > 0, got {gamma}"
                    )));
                }
            }
            _ => {
                if self.gamma.is_some() {
                    return Err(Error::Parameter(format!(
                        "gamma only applies to the los_near_aligned scenario, not {:?}",
                        self.kind
                    )));
                }
            }
        }
        if self.c_exponent < 1.0 || self.c_exponent.is_nan() {
            return Err(Error::Parameter(format!(
                "c_exponent must be >= 1, got {}",
                self.c_exponent
            )));
        }
        Ok(())
    }

    /// Construct the user pair at antenna count `geom.m()`. `angles` are the
    /// nominal directions (radians): the second entry is used only by the
    /// shared-spiked scenario, which needs two independent LoS draws.
    pub fn build(
        &self,
        geom: ArrayGeometry,
        angles: (f64, f64),
    ) -> Result<(UserProfile, UserProfile)> {
        self.validate()?;
        match self.kind {
            ScenarioKind::EigenAligned => {
                build_scenario_1(geom, self.delta, angles.0, self.k_factors)
            }
            ScenarioKind::SharedSpikedCovariance => build_scenario_2(geom, self.k_factors, angles),
            ScenarioKind::LosAligned => {
                build_scenario_3(geom, angles.0, self.alpha_phase, self.k_factors, self.delta)
            }
            ScenarioKind::LosNearAligned => build_scenario_4_with_exponent(
                geom,
                angles.0,
                self.gamma.expect("validated above"),
                self.k_factors,
                self.delta,
                self.c_exponent,
            ),
        }
    }
}

/// Scenario 1: user 1 carries a one-ring covariance `R_1` (spread `delta`,
/// center `phi0`) with LoS at `phi0`; user 2's LoS is `sqrt(M)` times the
/// principal eigenvector of `R_1` and its covariance is identity. For small
/// spreads `lambda_1(R_1)` is order `M`, so `term1 / M^2` stays bounded away
/// from zero.
pub fn build_scenario_1(
    geom: ArrayGeometry,
    delta: f64,
    phi0: f64,
    k_factors: (f64, f64),
) -> Result<(UserProfile, UserProfile)> {
    ensure_pair_size(geom)?;
    let m = geom.m();
    let (r1, eig) = one_ring_with_eigen(geom, delta, phi0)?;
    let sqrt1 = sqrt_from_eigen(&eig)?;
    let user1 = UserProfile::from_parts(k_factors.0, ula_los(geom, phi0), r1, sqrt1, 1.0)?;

    // Rescale so ||los||^2 = M holds exactly despite eigenvector rounding.
    let principal = eig.eigenvector(0);
    let los2 = &principal * Complex64::new((m as f64).sqrt() / principal.norm(), 0.0);
    let user2 = UserProfile::iid(k_factors.1, los2, 1.0)?;
    Ok((user1, user2))
}

/// Scenario 2: both users share the spiked diagonal covariance
/// `diag(M/2, M/(2M-2), ..., M/(2M-2))` (trace exactly `M`), with
/// independent ULA LoS directions. `term2 / M^2` converges to
/// `1/4 * ((K_1+1)(K_2+1))^{-1}` instead of vanishing.
pub fn build_scenario_2(
    geom: ArrayGeometry,
    k_factors: (f64, f64),
    thetas: (f64, f64),
) -> Result<(UserProfile, UserProfile)> {
    ensure_pair_size(geom)?;
    let r = spiked_covariance(geom.m());
    let sqrt = crate::linalg::psd_sqrt(&r)?;
    let user1 = UserProfile::from_parts(
        k_factors.0,
        ula_los(geom, thetas.0),
        r.clone(),
        sqrt.clone(),
        1.0,
    )?;
    let user2 = UserProfile::from_parts(k_factors.1, ula_los(geom, thetas.1), r, sqrt, 1.0)?;
    Ok((user1, user2))
}

/// The Scenario-2 covariance matrix.
pub fn spiked_covariance(m: usize) -> CMatrix {
    assert!(m >= 2);
    let m_f = m as f64;
    let tail = m_f / (2.0 * m_f - 2.0);
    let mut diag = CVector::from_element(m, Complex64::new(tail, 0.0));
    diag[0] = Complex64::new(m_f / 2.0, 0.0);
    CMatrix::from_diagonal(&diag)
}

/// Scenario 3: aligned LoS responses `h_2 = e^{j alpha} h_1` at direction
/// `theta`, both users with a one-ring covariance centered there. Makes
/// `term3 / M^2 = K_1/(K_1+1) * K_2/(K_2+1)` exactly, independent of `M`.
pub fn build_scenario_3(
    geom: ArrayGeometry,
    theta: f64,
    alpha_phase: f64,
    k_factors: (f64, f64),
    delta: f64,
) -> Result<(UserProfile, UserProfile)> {
    ensure_pair_size(geom)?;
    let (r, eig) = one_ring_with_eigen(geom, delta, theta)?;
    let sqrt = sqrt_from_eigen(&eig)?;
    let los1 = ula_los(geom, theta);
    let los2 = &los1 * Complex64::from_polar(1.0, alpha_phase);
    let user1 = UserProfile::from_parts(k_factors.0, los1, r.clone(), sqrt.clone(), 1.0)?;
    let user2 = UserProfile::from_parts(k_factors.1, los2, r, sqrt, 1.0)?;
    Ok((user1, user2))
}

/// Scenario 4: ULA LoS responses with `sin(theta_l) - sin(theta_k) =
/// gamma / M`, each user with a one-ring covariance centered on its own
/// direction. The normalized LoS cross power follows the Dirichlet kernel
/// and converges to [`scenario_4_limit`].
pub fn build_scenario_4(
    geom: ArrayGeometry,
    theta_k: f64,
    gamma: f64,
    k_factors: (f64, f64),
    delta: f64,
) -> Result<(UserProfile, UserProfile)> {
    build_scenario_4_with_exponent(geom, theta_k, gamma, k_factors, delta, 1.0)
}

/// Scenario 4 with the angular difference generalized to `gamma / M^c`,
/// `c >= 1`.
pub fn build_scenario_4_with_exponent(
    geom: ArrayGeometry,
    theta_k: f64,
    gamma: f64,
    k_factors: (f64, f64),
    delta: f64,
    c_exponent: f64,
) -> Result<(UserProfile, UserProfile)> {
    ensure_pair_size(geom)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Parameter(format!(
            "gamma must be finite and > 0, got {gamma}"
        )));
    }
    if c_exponent < 1.0 || c_exponent.is_nan() {
        return Err(Error::Parameter(format!(
            "c_exponent must be >= 1, got {c_exponent}"
        )));
    }
    let sin_l = theta_k.sin() + gamma / (geom.m() as f64).powf(c_exponent);
    if sin_l.abs() > 1.0 {
        return Err(Error::Parameter(format!(
            "infeasible angle: sin(theta_k) + gamma/M^c = {sin_l} outside [-1, 1]"
        )));
    }
    let theta_l = sin_l.asin();
    let user_k = UserProfile::one_ring(geom, k_factors.0, theta_k, delta, 1.0)?;
    let user_l = UserProfile::one_ring(geom, k_factors.1, theta_l, delta, 1.0)?;
    Ok((user_k, user_l))
}

/// Large-`M` limit of `term3 / M^2` in Scenario 4:
/// `K_k/(K_k+1) * K_l/(K_l+1) * (lambda/(2 pi gamma d))^2 |e^{j 2 pi gamma
/// d / lambda} - 1|^2`, evaluated as a squared sinc. `gamma = 0` returns the
/// fully aligned limit (the Scenario-3 value); infinite K-factors are mapped
/// to unit weight.
pub fn scenario_4_limit(
    gamma: f64,
    spacing_wavelengths: f64,
    k_factors: (f64, f64),
) -> Result<f64> {
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::Parameter(format!(
            "gamma must be finite and >= 0, got {gamma}"
        )));
    }
    if !(spacing_wavelengths > 0.0 && spacing_wavelengths.is_finite()) {
        return Err(Error::Parameter(format!(
            "spacing must be finite and > 0, got {spacing_wavelengths}"
        )));
    }
    let weights = k_factor_weight(k_factors.0) * k_factor_weight(k_factors.1);
    if gamma == 0.0 {
        return Ok(weights);
    }
    // |e^{jx} - 1|^2 / x^2 = (sin(x/2) / (x/2))^2 with x = 2 pi gamma d/lambda
    let half_x = std::f64::consts::PI * gamma * spacing_wavelengths;
    let sinc = half_x.sin() / half_x;
    Ok(weights * sinc * sinc)
}

/// Finite-`M` normalized cross power of two ULA steering vectors whose sine
/// difference is `sin_diff`: the squared Dirichlet kernel
/// `[sin(M phi/2) / (M sin(phi/2))]^2` with `phi = 2 pi (d/lambda) sin_diff`.
pub fn steering_cross_metric(m: usize, spacing_wavelengths: f64, sin_diff: f64) -> f64 {
    let half_phi = std::f64::consts::PI * spacing_wavelengths * sin_diff;
    if half_phi == 0.0 {
        return 1.0;
    }
    let ratio = (m as f64 * half_phi).sin() / (m as f64 * half_phi.sin());
    ratio * ratio
}

fn ensure_pair_size(geom: ArrayGeometry) -> Result<()> {
    if geom.m() < 2 {
        return Err(Error::Parameter(
            "scenario constructions need at least 2 antennas".into(),
        ));
    }
    Ok(())
}
