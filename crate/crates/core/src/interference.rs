//! Closed-form mean inter-user interference power, its Rayleigh-Ritz and
//! trace bounds, eigen-alignment coefficients, and the C1-C3 favorable
//! propagation scaling diagnostics.
//!
//! For users `k` and `l` with maximum-ratio processing, the mean interference
//! power `E|g_k^H g_l|^2` splits into four nonnegative terms:
//!
//! ```text
//! term1 = K_l/(K_l+1) * 1/(K_k+1) * h_l^H R_k h_l     (LoS_l against R_k)
//! term2 = tr(R_l R_k) / ((K_k+1)(K_l+1))              (diffuse x diffuse)
//! term3 = K_k/(K_k+1) * K_l/(K_l+1) * |h_l^H h_k|^2   (LoS x LoS)
//! term4 = K_k/(K_k+1) * 1/(K_l+1) * h_k^H R_l h_k     (LoS_k against R_l)
//! ```
//!
//! Massive MIMO keeps favorable propagation exactly when each of the three
//! normalized quantities `h_l^H R_k h_l / M^2`, `tr(R_l R_k) / M^2`, and
//! `|h_l^H h_k|^2 / M^2` vanishes as `M` grows; [`scaling_report`] measures
//! their decay over an `M`-sweep.

use rayon::prelude::*;

use crate::channel::{k_factor_weight, UserProfile};
use crate::linalg::{hermitian_eig, quadratic_form, trace_product, CMatrix, CVector, REL_PSD_TOL};
use crate::{Error, Result};

/// The four closed-form interference terms and their total (linear power,
/// unit large-scale gain).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceBreakdown {
    pub term1: f64,
    pub term2: f64,
    pub term3: f64,
    pub term4: f64,
    pub total: f64,
}

/// Expansion of a LoS direction onto the eigenvectors of a covariance
/// matrix: `h_bar / sqrt(M) = sum_i beta_i u_i`, so `sum |beta_i|^2 = 1`.
#[derive(Debug, Clone)]
pub struct AlignmentProfile {
    betas: CVector,
    eigenvalues: Vec<f64>,
}

impl AlignmentProfile {
    pub fn betas(&self) -> &CVector {
        &self.betas
    }

    /// Eigenvalues of the covariance, descending, paired with the betas.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `(1/M) sum |beta_i|^2 lambda_i`, the normalized quadratic form.
    pub fn normalized_quadratic_form(&self) -> f64 {
        let m = self.betas.len() as f64;
        self.betas
            .iter()
            .zip(&self.eigenvalues)
            .map(|(b, &l)| b.norm_sqr() * l)
            .sum::<f64>()
            / m
    }
}

/// How a normalized interference metric behaves over an `M`-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingClass {
    /// Fitted log-log slope <= -0.5 (or the metric is identically zero).
    Vanishing,
    /// Fitted slope > -0.1: the metric survives the large-antenna limit.
    NonVanishing,
    Inconclusive,
}

impl ScalingClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScalingClass::Vanishing => "vanishing",
            ScalingClass::NonVanishing => "non-vanishing",
            ScalingClass::Inconclusive => "inconclusive",
        }
    }
}

/// Classify a fitted log-log slope; `-inf` marks an identically vanishing
/// metric.
pub fn classify_slope(slope: f64) -> ScalingClass {
    if slope <= -0.5 {
        ScalingClass::Vanishing
    } else if slope > -0.1 {
        ScalingClass::NonVanishing
    } else {
        ScalingClass::Inconclusive
    }
}

/// Per-condition sequences of the C1-C3 metrics over an `M`-sweep with
/// fitted log-log slopes.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    m_values: Vec<usize>,
    c1_metric: Vec<f64>,
    c2_metric: Vec<f64>,
    c3_metric: Vec<f64>,
    fitted_slopes: [f64; 3],
}

impl ScalingReport {
    pub fn m_values(&self) -> &[usize] {
        &self.m_values
    }

    pub fn c1_metric(&self) -> &[f64] {
        &self.c1_metric
    }

    pub fn c2_metric(&self) -> &[f64] {
        &self.c2_metric
    }

    pub fn c3_metric(&self) -> &[f64] {
        &self.c3_metric
    }

    /// Slopes for (C1, C2, C3); `-inf` when a metric vanishes identically.
    pub fn fitted_slopes(&self) -> [f64; 3] {
        self.fitted_slopes
    }

    pub fn classifications(&self) -> [ScalingClass; 3] {
        self.fitted_slopes.map(classify_slope)
    }
}

/// Closed-form `E|g_k^H g_l|^2` for a user pair (the four-term split).
///
/// Large-scale coefficients are not applied; the expression is for unit
/// large-scale gain.
pub fn mean_interference(
    user_k: &UserProfile,
    user_l: &UserProfile,
) -> Result<InterferenceBreakdown> {
    if user_k.m() != user_l.m() {
        return Err(Error::Dimension(format!(
            "mean_interference: antenna counts {} and {}",
            user_k.m(),
            user_l.m()
        )));
    }
    let (k_k, k_l) = (user_k.k_factor(), user_l.k_factor());
    let w_k = k_factor_weight(k_k);
    let w_l = k_factor_weight(k_l);
    let d_k = 1.0 / (k_k + 1.0);
    let d_l = 1.0 / (k_l + 1.0);

    let term1 = (w_l * d_k * quadratic_form(user_l.los(), user_k.covariance())?).max(0.0);
    let term2 = (d_k * d_l * trace_product(user_l.covariance(), user_k.covariance())?).max(0.0);
    let term3 = w_k * w_l * user_l.los().dotc(user_k.los()).norm_sqr();
    let term4 = (w_k * d_l * quadratic_form(user_k.los(), user_l.covariance())?).max(0.0);

    Ok(InterferenceBreakdown {
        term1,
        term2,
        term3,
        term4,
        total: term1 + term2 + term3 + term4,
    })
}

/// Instantaneous interference `T_kl = |g_k^H g_l|^2`.
pub fn instantaneous_interference(g_k: &CVector, g_l: &CVector) -> Result<f64> {
    if g_k.len() != g_l.len() {
        return Err(Error::Dimension(format!(
            "instantaneous_interference: lengths {} and {}",
            g_k.len(),
            g_l.len()
        )));
    }
    Ok(g_k.dotc(g_l).norm_sqr())
}

/// Rayleigh-Ritz bounds on the normalized quadratic form:
/// `lambda_M / M <= h^H R h / M^2 <= lambda_1 / M <= 1` for `||h||^2 = M`.
///
/// Returns `(lower, upper)`.
pub fn ritz_bounds(h_bar: &CVector, r: &CMatrix) -> Result<(f64, f64)> {
    let eig = psd_eigen(h_bar, r, "ritz_bounds")?;
    let m = h_bar.len() as f64;
    Ok(((eig.lambda_min() / m).max(0.0), eig.lambda_max() / m))
}

/// Expansion coefficients of `h_bar / sqrt(M)` onto the eigenvectors of `R`.
pub fn alignment_profile(h_bar: &CVector, r: &CMatrix) -> Result<AlignmentProfile> {
    let eig = psd_eigen(h_bar, r, "alignment_profile")?;
    let m = h_bar.len() as f64;
    let scaled = h_bar / num_complex::Complex64::new(m.sqrt(), 0.0);
    let betas = eig.eigenvectors().adjoint() * scaled;
    Ok(AlignmentProfile {
        betas,
        eigenvalues: eig.eigenvalues().to_vec(),
    })
}

/// `tr(R_l R_k) / M^2` together with its bound `lambda_1^(l) / M`.
///
/// Returns `(value, bound)` with `0 <= value <= bound <= 1` for trace-`M`
/// PSD inputs.
pub fn trace_product_bound(r_l: &CMatrix, r_k: &CMatrix) -> Result<(f64, f64)> {
    if r_l.shape() != r_k.shape() {
        return Err(Error::Dimension(format!(
            "trace_product_bound: shapes {:?} and {:?}",
            r_l.shape(),
            r_k.shape()
        )));
    }
    let m = r_l.nrows() as f64;
    let value = (trace_product(r_l, r_k)? / (m * m)).max(0.0);
    let eig = hermitian_eig(r_l)?;
    Ok((value, eig.lambda_max() / m))
}

/// Evaluate the C1-C3 metrics for factory-built user pairs over an
/// increasing `M` grid and fit log-log slopes over the asymptotic (last)
/// half of the grid; exact zeros are excluded from the fit, and a metric
/// with fewer than two usable points reports slope `-inf`.
pub fn scaling_report<F>(factory: F, m_values: &[usize]) -> Result<ScalingReport>
where
    F: Fn(usize) -> Result<(UserProfile, UserProfile)> + Sync,
{
    if m_values.len() < 2 {
        return Err(Error::Parameter(
            "scaling_report: need at least 2 M values".into(),
        ));
    }
    if m_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(
            "scaling_report: M values must be strictly increasing".into(),
        ));
    }

    let rows: Vec<(f64, f64, f64)> = m_values
        .par_iter()
        .map(|&m| -> Result<(f64, f64, f64)> {
            let (user_k, user_l) = factory(m)?;
            if user_k.m() != m || user_l.m() != m {
                return Err(Error::Dimension(format!(
                    "scaling_report: factory produced M = ({}, {}) for requested {m}",
                    user_k.m(),
                    user_l.m()
                )));
            }
            let m2 = (m * m) as f64;
            let c1 = (quadratic_form(user_l.los(), user_k.covariance())? / m2).max(0.0);
            let c2 = (trace_product(user_l.covariance(), user_k.covariance())? / m2).max(0.0);
            let c3 = user_l.los().dotc(user_k.los()).norm_sqr() / m2;
            Ok((c1, c2, c3))
        })
        .collect::<Result<Vec<_>>>()?;

    let c1_metric: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let c2_metric: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let c3_metric: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let fitted_slopes = [
        fit_asymptotic_slope(m_values, &c1_metric),
        fit_asymptotic_slope(m_values, &c2_metric),
        fit_asymptotic_slope(m_values, &c3_metric),
    ];

    Ok(ScalingReport {
        m_values: m_values.to_vec(),
        c1_metric,
        c2_metric,
        c3_metric,
        fitted_slopes,
    })
}

/// OLS slope of `ln(metric)` against `ln(M)` over the last half of the grid,
/// suppressing pre-asymptotic transients.
fn fit_asymptotic_slope(m_values: &[usize], metric: &[f64]) -> f64 {
    let start = m_values.len() / 2;
    let points: Vec<(f64, f64)> = m_values[start..]
        .iter()
        .zip(&metric[start..])
        .filter(|(_, &v)| v > 0.0)
        .map(|(&m, &v)| ((m as f64).ln(), v.ln()))
        .collect();
    if points.len() < 2 {
        return f64::NEG_INFINITY;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    sxy / sxx
}

/// Shared shape + PSD validation for the quadratic-form operations.
fn psd_eigen(h_bar: &CVector, r: &CMatrix, ctx: &str) -> Result<crate::linalg::EigenSystem> {
    if r.nrows() != h_bar.len() || r.ncols() != h_bar.len() {
        return Err(Error::Dimension(format!(
            "{ctx}: matrix {}x{} incompatible with vector of length {}",
            r.nrows(),
            r.ncols(),
            h_bar.len()
        )));
    }
    let eig = hermitian_eig(r)?;
    let threshold = -REL_PSD_TOL * eig.lambda_max().max(0.0);
    if eig.lambda_min() < threshold {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.lambda_min(),
            threshold,
        });
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        build_channel_matrix, one_ring_covariance, ula_los, ArrayGeometry, RngStream,
    };
    use crate::linalg::CMatrix;
    use num_complex::Complex64;

    fn iid_user(m: usize, k: f64, theta: f64) -> UserProfile {
        UserProfile::iid(k, ula_los(ArrayGeometry::new(m), theta), 1.0).unwrap()
    }

    fn one_ring_user(m: usize, k: f64, theta: f64, delta: f64) -> UserProfile {
        UserProfile::one_ring(ArrayGeometry::new(m), k, theta, delta, 1.0).unwrap()
    }

    #[test]
    fn rayleigh_identity_case_is_pure_term2() {
        let m = 16;
        let u1 = iid_user(m, 0.0, 0.3);
        let u2 = iid_user(m, 0.0, 1.1);
        let b = mean_interference(&u1, &u2).unwrap();
        assert_eq!(b.term1, 0.0);
        assert!((b.term2 - m as f64).abs() < 1e-9);
        assert_eq!(b.term3, 0.0);
        assert_eq!(b.term4, 0.0);
        assert!((b.total - m as f64).abs() < 1e-9);
    }

    #[test]
    fn aligned_pure_los_limit_is_term3() {
        let m = 32;
        let u1 = iid_user(m, 1e12, 0.4);
        let u2 = iid_user(m, 1e12, 0.4);
        let b = mean_interference(&u1, &u2).unwrap();
        let m2 = (m * m) as f64;
        assert!((b.term3 / m2 - 1.0).abs() < 1e-5);
        assert!(b.term1 / m2 < 1e-5 && b.term2 / m2 < 1e-5 && b.term4 / m2 < 1e-5);
    }

    #[test]
    fn total_is_sum_and_symmetric() {
        let m = 24;
        let u1 = one_ring_user(m, 0.7, 0.2, 0.5);
        let u2 = one_ring_user(m, 2.3, -0.9, 1.1);
        let ab = mean_interference(&u1, &u2).unwrap();
        let ba = mean_interference(&u2, &u1).unwrap();
        let sum = ab.term1 + ab.term2 + ab.term3 + ab.term4;
        assert!((ab.total - sum).abs() <= 1e-12 * sum);
        assert!((ab.total - ba.total).abs() <= 1e-12 * ab.total);
        assert!((ab.term1 - ba.term4).abs() <= 1e-12 * ab.term1.max(1e-300));
        assert!((ab.term4 - ba.term1).abs() <= 1e-12 * ab.term4.max(1e-300));
        assert!((ab.term2 - ba.term2).abs() <= 1e-12 * ab.term2.max(1e-300));
        assert!((ab.term3 - ba.term3).abs() <= 1e-12 * ab.term3.max(1e-300));
    }

    #[test]
    fn every_term_bounded_by_m_squared() {
        let m = 20;
        for seed in 0..4u64 {
            let t = seed as f64;
            let u1 = one_ring_user(m, 0.5 * t, 0.3 * t - 0.8, 0.2 + 0.3 * t);
            let u2 = one_ring_user(m, 0.9, 1.3 - 0.5 * t, 0.4);
            let b = mean_interference(&u1, &u2).unwrap();
            let m2 = (m * m) as f64;
            for term in [b.term1, b.term2, b.term3, b.term4] {
                assert!(term >= 0.0 && term / m2 <= 1.0 + 1e-9, "term {term}");
            }
        }
    }

    #[test]
    fn monte_carlo_matches_closed_form() {
        let m = 64;
        let u_k = one_ring_user(m, 1.0, 0.35, 10f64.to_radians());
        let u_l = one_ring_user(m, 2.0, -1.2, 60f64.to_radians());
        let closed = mean_interference(&u_k, &u_l).unwrap().total;

        let trials = 200_000u64;
        let users = [u_k, u_l];
        let samples: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(99, t).rng();
                let g = build_channel_matrix(&users, &mut rng).unwrap();
                instantaneous_interference(&g.column(0).into_owned(), &g.column(1).into_owned())
                    .unwrap()
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / trials as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        let z = (mean - closed) / se;
        assert!(z.abs() <= 3.0, "MC mean {mean} vs closed {closed}, z = {z}");
    }

    #[test]
    fn instantaneous_basics() {
        let e1 = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::ZERO]);
        let e2 = CVector::from_vec(vec![Complex64::ZERO, Complex64::new(1.0, 0.0)]);
        assert_eq!(instantaneous_interference(&e1, &e2).unwrap(), 0.0);

        let m = 7;
        let ones = CVector::from_element(m, Complex64::new(1.0, 0.0));
        assert!((instantaneous_interference(&ones, &ones).unwrap() - (m * m) as f64).abs() < 1e-12);

        // brute-force oracle
        let mut rng = RngStream::new(3, 0).rng();
        let a = CVector::from_fn(9, |_, _| crate::channel::standard_complex_normal(&mut rng));
        let b = CVector::from_fn(9, |_, _| crate::channel::standard_complex_normal(&mut rng));
        let mut inner = Complex64::ZERO;
        for i in 0..9 {
            inner += a[i].conj() * b[i];
        }
        let brute = inner.norm_sqr();
        assert!((instantaneous_interference(&a, &b).unwrap() - brute).abs() < 1e-12);

        let short = CVector::zeros(3);
        assert!(instantaneous_interference(&a, &short).is_err());
    }

    #[test]
    fn ritz_identity_case() {
        let m = 10;
        let h = ula_los(ArrayGeometry::new(m), 0.8);
        let r = CMatrix::identity(m, m);
        let (lo, hi) = ritz_bounds(&h, &r).unwrap();
        assert!((lo - 1.0 / m as f64).abs() < 1e-12);
        assert!((hi - 1.0 / m as f64).abs() < 1e-12);
        let q = quadratic_form(&h, &r).unwrap() / (m * m) as f64;
        assert!((q - 1.0 / m as f64).abs() < 1e-12);
    }

    #[test]
    fn ritz_upper_bound_attained_by_principal_alignment() {
        let m = 8;
        let mut r = CMatrix::zeros(m, m);
        r[(0, 0)] = Complex64::new(m as f64, 0.0);
        let mut h = CVector::zeros(m);
        h[0] = Complex64::new((m as f64).sqrt(), 0.0);
        let (_, hi) = ritz_bounds(&h, &r).unwrap();
        assert!((hi - 1.0).abs() < 1e-12);
        let q = quadratic_form(&h, &r).unwrap() / (m * m) as f64;
        assert!((q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ritz_sandwich_random_instances() {
        let m = 16;
        let geom = ArrayGeometry::new(m);
        for i in 0..200 {
            let x = i as f64;
            let delta = 0.05 + (x * 0.013) % 2.8;
            let r = one_ring_covariance(geom, delta, 2.0 * x).unwrap();
            let h = ula_los(geom, -1.0 + 0.031 * x);
            let (lo, hi) = ritz_bounds(&h, &r).unwrap();
            let q = quadratic_form(&h, &r).unwrap() / (m * m) as f64;
            assert!(lo <= q + 1e-10 && q <= hi + 1e-10, "sandwich violated");
            assert!(hi <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn alignment_profile_identity_and_unit_mass() {
        let m = 12;
        let geom = ArrayGeometry::new(m);
        let r = one_ring_covariance(geom, 0.7, 0.3).unwrap();
        let h = ula_los(geom, 1.0);
        let profile = alignment_profile(&h, &r).unwrap();
        let mass: f64 = profile.betas().iter().map(|b| b.norm_sqr()).sum();
        assert!((mass - 1.0).abs() <= 1e-9);

        let direct = quadratic_form(&h, &r).unwrap() / (m * m) as f64;
        let via_betas = profile.normalized_quadratic_form();
        assert!((direct - via_betas).abs() <= 1e-9);
    }

    #[test]
    fn alignment_with_single_eigenvector() {
        let m = 10;
        let geom = ArrayGeometry::new(m);
        let r = one_ring_covariance(geom, 0.2, 0.5).unwrap();
        let eig = hermitian_eig(&r).unwrap();
        let h = eig.eigenvector(0) * Complex64::new((m as f64).sqrt(), 0.0);
        let profile = alignment_profile(&h, &r).unwrap();
        assert!((profile.betas()[0].norm() - 1.0).abs() < 1e-9);
        for i in 1..m {
            assert!(profile.betas()[i].norm() < 1e-7, "beta_{i} not zero");
        }
    }

    #[test]
    fn trace_product_bound_cases() {
        let m = 9;
        let id = CMatrix::identity(m, m);
        let (v, b) = trace_product_bound(&id, &id).unwrap();
        assert!((v - 1.0 / m as f64).abs() < 1e-12);
        assert!((b - 1.0 / m as f64).abs() < 1e-12);

        let mut spike = CMatrix::zeros(m, m);
        spike[(0, 0)] = Complex64::new(m as f64, 0.0);
        let (v, b) = trace_product_bound(&spike, &spike).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!((b - 1.0).abs() < 1e-12);

        // eigen-expansion oracle from the trace-term analysis
        let geom = ArrayGeometry::new(m);
        let r_l = one_ring_covariance(geom, 0.6, 0.1).unwrap();
        let r_k = one_ring_covariance(geom, 1.2, -0.7).unwrap();
        let (v, b) = trace_product_bound(&r_l, &r_k).unwrap();
        let eig_k = hermitian_eig(&r_k).unwrap();
        let mut expansion = 0.0;
        for i in 0..m {
            let u = eig_k.eigenvector(i);
            expansion += eig_k.eigenvalues()[i] * quadratic_form(&u, &r_l).unwrap();
        }
        expansion /= (m * m) as f64;
        assert!((v - expansion).abs() <= 1e-10);
        assert!(v <= b + 1e-12 && b <= 1.0 + 1e-12);
    }

    #[test]
    fn scaling_iid_gives_slope_minus_one() {
        let factory = |m: usize| -> Result<(UserProfile, UserProfile)> {
            let x = m as f64;
            Ok((
                iid_user(m, 0.0, 0.21 * x.sin()),
                iid_user(m, 0.0, 1.4 * (x * 0.37).cos()),
            ))
        };
        let ms = [16, 32, 64, 128, 256];
        let report = scaling_report(factory, &ms).unwrap();
        for (i, &m) in ms.iter().enumerate() {
            assert!((report.c2_metric()[i] - 1.0 / m as f64).abs() < 1e-12);
        }
        let slope = report.fitted_slopes()[1];
        assert!((slope + 1.0).abs() <= 0.01, "slope {slope}");
        assert_eq!(report.classifications()[1], ScalingClass::Vanishing);
    }

    #[test]
    fn scaling_aligned_los_is_flat() {
        let factory = |m: usize| -> Result<(UserProfile, UserProfile)> {
            let u = iid_user(m, 1.0, 0.4);
            Ok((u.clone(), u))
        };
        let report = scaling_report(factory, &[8, 16, 32, 64]).unwrap();
        for &c3 in report.c3_metric() {
            assert!((c3 - 1.0).abs() < 1e-12);
        }
        assert!(report.fitted_slopes()[2].abs() < 1e-6);
        assert_eq!(report.classifications()[2], ScalingClass::NonVanishing);
    }

    #[test]
    fn scaling_rejects_bad_grids() {
        let factory = |m: usize| Ok((iid_user(m, 0.0, 0.0), iid_user(m, 0.0, 0.0)));
        assert!(scaling_report(factory, &[16]).is_err());
        let factory = |m: usize| Ok((iid_user(m, 0.0, 0.0), iid_user(m, 0.0, 0.0)));
        assert!(scaling_report(factory, &[32, 16]).is_err());
        // factory returning wrong M
        let factory = |_m: usize| Ok((iid_user(8, 0.0, 0.0), iid_user(8, 0.0, 0.0)));
        assert!(matches!(
            scaling_report(factory, &[16, 32]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn zero_metric_reports_sentinel_slope() {
        // orthogonal unit-basis LoS vectors scaled to norm M: inner product 0
        let factory = |m: usize| -> Result<(UserProfile, UserProfile)> {
            let mut a = CVector::zeros(m);
            a[0] = Complex64::new((m as f64).sqrt(), 0.0);
            let mut b = CVector::zeros(m);
            b[1] = Complex64::new((m as f64).sqrt(), 0.0);
            Ok((
                UserProfile::iid(1.0, a, 1.0)?,
                UserProfile::iid(1.0, b, 1.0)?,
            ))
        };
        let report = scaling_report(factory, &[4, 8, 16, 32]).unwrap();
        assert_eq!(report.fitted_slopes()[2], f64::NEG_INFINITY);
        assert_eq!(report.classifications()[2], ScalingClass::Vanishing);
    }
}
