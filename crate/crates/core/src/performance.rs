//! Capacity per user, MRC spectral efficiency, and the Gram-matrix
//! mean-square convergence diagnostics.
//!
//! Capacity is `(1/L) log2 det(I_L + p_u B^H B)` with `B = G D^{1/2}`; the
//! MRC SINR for user `k` uses unit noise power:
//! `p_u ||b_k||^4 / (p_u sum_{l != k} |b_k^H b_l|^2 + ||b_k||^2)`.
//!
//! When the C1-C2 conditions hold, `(1/M) G^H G` concentrates around its
//! mean; [`gram_deviation`] estimates the worst entrywise mean-square
//! deviation and evaluates the closed-form variances of the three zero-mean
//! fluctuation terms for the first user pair.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{build_channel_matrix, k_factor_weight, RngStream, UserProfile};
use crate::linalg::{quadratic_form, trace_product, trace_re, CMatrix};
use crate::{Error, Result};

/// Gram-matrix concentration estimate at one antenna count.
#[derive(Debug, Clone, Copy)]
pub struct GramDeviation {
    pub m: usize,
    /// Largest entrywise mean-square deviation between `(1/M) G^H G` and its
    /// closed-form mean, estimated over trials.
    pub max_entry_msd: f64,
    /// Standard error of the `max_entry_msd` estimate.
    pub max_entry_msd_se: f64,
    /// Closed-form variances of the three fluctuation terms for users (0, 1).
    pub s1_var: f64,
    pub s2_var: f64,
    pub s3_var: f64,
}

/// `(1/L) log2 det(I_L + p_u B^H B)` with `B = G D^{1/2}`, computed through
/// a Cholesky factorization of the `L x L` Hermitian matrix.
pub fn capacity_per_user(g: &CMatrix, d: &[f64], p_u: f64) -> Result<f64> {
    let b = apply_large_scale(g, d)?;
    ensure_power(p_u)?;
    let l = b.ncols();
    let mut a = b.adjoint() * &b * Complex64::new(p_u, 0.0);
    for i in 0..l {
        a[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::Numerical("capacity: I + p_u B^H B not positive definite".into()))?;
    let log2_det: f64 = (0..l).map(|i| 2.0 * chol.l_dirty()[(i, i)].re.log2()).sum();
    if !log2_det.is_finite() {
        return Err(Error::Numerical(
            "capacity: non-finite log-determinant".into(),
        ));
    }
    Ok((log2_det / l as f64).max(0.0))
}

/// Per-user spectral efficiency `log2(1 + SINR_k)` for a maximum-ratio
/// combining detector with unit noise power. A zero column yields SE 0.
pub fn mrc_se_per_user(g: &CMatrix, d: &[f64], p_u: f64) -> Result<Vec<f64>> {
    let b = apply_large_scale(g, d)?;
    ensure_power(p_u)?;
    let l = b.ncols();
    let gram = b.adjoint() * &b;
    let mut se = Vec::with_capacity(l);
    for k in 0..l {
        let norm_sq = gram[(k, k)].re;
        if norm_sq <= 0.0 {
            se.push(0.0);
            continue;
        }
        let interference: f64 = (0..l)
            .filter(|&j| j != k)
            .map(|j| gram[(k, j)].norm_sqr())
            .sum();
        let sinr = p_u * norm_sq * norm_sq / (p_u * interference + norm_sq);
        se.push((1.0 + sinr).log2());
    }
    Ok(se)
}

/// Closed-form `(1/M) E[G^H G]`: unit diagonal under trace-M normalization
/// and LoS cross terms `sqrt(w_k w_l) h_k^H h_l / M` off the diagonal.
pub fn expected_gram(users: &[UserProfile]) -> Result<CMatrix> {
    let m = match users.first() {
        Some(u) => u.m(),
        None => return Err(Error::Dimension("expected_gram: no users".into())),
    };
    if users.iter().any(|u| u.m() != m) {
        return Err(Error::Dimension(
            "expected_gram: mixed antenna counts".into(),
        ));
    }
    let l = users.len();
    let m_f = m as f64;
    let mut out = CMatrix::zeros(l, l);
    for k in 0..l {
        let u_k = &users[k];
        let diag =
            (u_k.k_factor() * m_f + trace_re(u_k.covariance())) / ((u_k.k_factor() + 1.0) * m_f);
        out[(k, k)] = Complex64::new(diag, 0.0);
        for j in 0..k {
            let u_j = &users[j];
            let weight = (k_factor_weight(u_j.k_factor()) * k_factor_weight(u_k.k_factor())).sqrt();
            let entry = u_j.los().dotc(u_k.los()) * Complex64::new(weight / m_f, 0.0);
            out[(j, k)] = entry;
            out[(k, j)] = entry.conj();
        }
    }
    Ok(out)
}

/// Monte-Carlo estimate of `max_{k,l} E |[(1/M) G^H G]_{kl} - mean_{kl}|^2`
/// together with the closed-form S1/S2/S3 variances for users (0, 1).
/// Trials consume streams `(seed, 0..trials)` and are reduced in trial
/// order, so the result is independent of the worker count.
pub fn gram_deviation(users: &[UserProfile], trials: usize, seed: u64) -> Result<GramDeviation> {
    if trials < 100 {
        return Err(Error::Parameter(format!(
            "gram_deviation: need at least 100 trials, got {trials}"
        )));
    }
    if users.len() < 2 {
        return Err(Error::Parameter(
            "gram_deviation: need at least 2 users for the S-term variances".into(),
        ));
    }
    let expected = expected_gram(users)?;
    let m = users[0].m();
    let l = users.len();
    let m_f = m as f64;

    // per-trial squared deviations of every Gram entry, in trial order
    let sq_devs: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let mut rng = RngStream::new(seed, t).rng();
            let g = build_channel_matrix(users, &mut rng)?;
            let gram = g.adjoint() * &g / Complex64::new(m_f, 0.0);
            Ok((&gram - &expected).iter().map(|z| z.norm_sqr()).collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let entries = l * l;
    let mut means = vec![0.0; entries];
    for row in &sq_devs {
        for (acc, &v) in means.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for acc in &mut means {
        *acc /= trials as f64;
    }
    let (argmax, &max_entry_msd) = means
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite msd"))
        .expect("non-empty");
    let var: f64 = sq_devs
        .iter()
        .map(|row| (row[argmax] - max_entry_msd).powi(2))
        .sum::<f64>()
        / (trials - 1) as f64;
    let max_entry_msd_se = (var / trials as f64).sqrt();

    let (u_k, u_l) = (&users[0], &users[1]);
    let (k_k, k_l) = (u_k.k_factor(), u_l.k_factor());
    let m2 = m_f * m_f;
    let s1_var =
        k_factor_weight(k_k) / (k_l + 1.0) * quadratic_form(u_k.los(), u_l.covariance())? / m2;
    let s2_var =
        k_factor_weight(k_l) / (k_k + 1.0) * quadratic_form(u_l.los(), u_k.covariance())? / m2;
    let s3_var =
        trace_product(u_l.covariance(), u_k.covariance())? / ((k_k + 1.0) * (k_l + 1.0)) / m2;

    Ok(GramDeviation {
        m,
        max_entry_msd,
        max_entry_msd_se,
        s1_var,
        s2_var,
        s3_var,
    })
}

/// `B = G D^{1/2}`: scale column `k` by `sqrt(d_k)`.
fn apply_large_scale(g: &CMatrix, d: &[f64]) -> Result<CMatrix> {
    if d.len() != g.ncols() {
        return Err(Error::Dimension(format!(
            "large-scale vector length {} does not match {} users",
            d.len(),
            g.ncols()
        )));
    }
    if let Some(bad) = d.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Parameter(format!(
            "large-scale coefficients must be finite and > 0, got {bad}"
        )));
    }
    let mut b = g.clone();
    for (mut col, &dk) in b.column_iter_mut().zip(d) {
        col *= Complex64::new(dk.sqrt(), 0.0);
    }
    Ok(b)
}

fn ensure_power(p_u: f64) -> Result<()> {
    if !(p_u >= 0.0 && p_u.is_finite()) {
        return Err(Error::Parameter(format!(
            "transmit power must be finite and >= 0, got {p_u}"
        )));
    }
    Ok(())
}
