//! Complex Hermitian linear-algebra primitives: eigendecomposition, PSD
//! square root, and PSD projection.
//!
//! All operations are pure functions over immutable inputs. Eigenvector
//! phase ambiguity is resolved deterministically (largest-magnitude entry
//! rotated to the positive real axis, ties broken by lowest index), so
//! repeated calls on identical inputs are bit-reproducible.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix, column-major.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

/// Relative eigenvalue tolerance: eigenvalues below `-REL_PSD_TOL * lambda_1`
/// make a matrix non-PSD; anything in `[-tol, 0)` is clipped to zero.
pub const REL_PSD_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted descending; column `i` of
/// [`eigenvectors`](Self::eigenvectors) is the unit-norm eigenvector paired
/// with eigenvalue `i`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl EigenSystem {
    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix of eigenvectors (columns).
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Eigenvector for the `i`-th largest eigenvalue.
    pub fn eigenvector(&self, i: usize) -> CVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// Dimension of the decomposed matrix.
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Eigendecomposition of a Hermitian `M x M` matrix.
///
/// The input is symmetrized as `(H + H^H) / 2` before decomposition, so
/// Hermitian deviations up to rounding are tolerated. Errors on non-square
/// or non-finite input.
pub fn hermitian_eig(h: &CMatrix) -> Result<EigenSystem> {
    ensure_square(h, "hermitian_eig")?;
    ensure_finite(h, "hermitian_eig")?;

    let sym = hermitian_part(h);
    let decomp = sym.symmetric_eigen();

    // Sort descending; the stable sort keeps the solver's order on ties.
    let n = decomp.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        decomp.eigenvalues[b]
            .partial_cmp(&decomp.eigenvalues[a])
            .expect("finite eigenvalues")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| decomp.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors
            .column_mut(dst)
            .copy_from(&decomp.eigenvectors.column(src));
    }
    fix_column_phases(&mut eigenvectors);

    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Hermitian PSD square root: returns `S` with `S * S = R`.
///
/// Eigenvalues in `[-REL_PSD_TOL * lambda_1, 0)` are clipped to zero;
/// anything below that threshold is a [`Error::NotPsd`].
pub fn psd_sqrt(r: &CMatrix) -> Result<CMatrix> {
    if let Some(diag) = as_diagonal(r) {
        let clipped = clip_spectrum(&diag)?;
        return Ok(CMatrix::from_diagonal(&DVector::from_iterator(
            clipped.len(),
            clipped.iter().map(|&x| Complex64::new(x.sqrt(), 0.0)),
        )));
    }
    let eig = hermitian_eig(r)?;
    let clipped = clip_spectrum(eig.eigenvalues())?;
    Ok(reassemble(
        eig.eigenvectors(),
        clipped.iter().map(|&x| x.sqrt()),
    ))
}

/// Projection onto the PSD cone: eigenvalues clipped at zero and the matrix
/// reassembled. Idempotent; a PSD input comes back as its own Hermitian part
/// (bitwise unchanged when already Hermitian), so exact structure like a unit
/// diagonal survives.
pub fn psd_project(h: &CMatrix) -> Result<CMatrix> {
    if let Some(diag) = as_diagonal(h) {
        return Ok(CMatrix::from_diagonal(&DVector::from_iterator(
            diag.len(),
            diag.iter().map(|&x| Complex64::new(x.max(0.0), 0.0)),
        )));
    }
    let eig = hermitian_eig(h)?;
    if eig.lambda_min() >= 0.0 {
        return Ok(hermitian_part(h));
    }
    Ok(reassemble(
        eig.eigenvectors(),
        eig.eigenvalues().iter().map(|&x| x.max(0.0)),
    ))
}

/// Square root assembled from an existing decomposition, with the same
/// clipping and not-PSD semantics as [`psd_sqrt`]. Lets callers that already
/// hold an [`EigenSystem`] (per-trial covariance construction, principal
/// eigenvector extraction) avoid a second decomposition.
pub fn sqrt_from_eigen(eig: &EigenSystem) -> Result<CMatrix> {
    let clipped = clip_spectrum(eig.eigenvalues())?;
    Ok(reassemble(
        eig.eigenvectors(),
        clipped.iter().map(|&x| x.sqrt()),
    ))
}

fn clip_spectrum(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    let lambda_1 = eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = -REL_PSD_TOL * lambda_1.max(0.0);
    let min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < threshold || lambda_1 < 0.0 {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            threshold,
        });
    }
    Ok(eigenvalues.iter().map(|&x| x.max(0.0)).collect())
}

/// `U diag(f) U^H`, kept exactly conjugate-symmetric by filling the upper
/// triangle from the lower.
fn reassemble(u: &CMatrix, spectrum: impl Iterator<Item = f64> + Clone) -> CMatrix {
    let n = u.nrows();
    let mut scaled = u.clone();
    for (mut col, lambda) in scaled.column_iter_mut().zip(spectrum) {
        col *= Complex64::new(lambda, 0.0);
    }
    let mut out = scaled * u.adjoint();
    for i in 0..n {
        out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
        for j in 0..i {
            out[(j, i)] = out[(i, j)].conj();
        }
    }
    out
}

/// Rotate each column so its largest-magnitude entry is real and positive;
/// ties broken by lowest index.
fn fix_column_phases(u: &mut CMatrix) {
    for mut col in u.column_iter_mut() {
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].norm_sqr() > col[best].norm_sqr() {
                best = i;
            }
        }
        let pivot = col[best];
        let modulus = pivot.norm();
        if modulus > 0.0 {
            let rotation = pivot.conj() / modulus;
            col *= rotation;
        }
    }
}

/// `(H + H^H) / 2`.
pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        out[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in 0..i {
            let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            out[(i, j)] = avg;
            out[(j, i)] = avg.conj();
        }
    }
    out
}

/// `Some(diagonal)` when every off-diagonal entry is exactly zero and the
/// diagonal is real; lets diagonal covariances skip the dense eigensolver.
fn as_diagonal(h: &CMatrix) -> Option<Vec<f64>> {
    if !h.is_square() {
        return None;
    }
    let n = h.nrows();
    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        for i in 0..n {
            let z = h[(i, j)];
            if i == j {
                if z.im != 0.0 || !z.re.is_finite() {
                    return None;
                }
                diag.push(z.re);
            } else if z != Complex64::ZERO {
                return None;
            }
        }
    }
    Some(diag)
}

/// `Re(x^H A x)` for Hermitian `A` (the imaginary part is rounding noise).
pub fn quadratic_form(x: &CVector, a: &CMatrix) -> Result<f64> {
    if a.nrows() != x.len() || a.ncols() != x.len() {
        return Err(Error::Dimension(format!(
            "quadratic_form: matrix {}x{} incompatible with vector of length {}",
            a.nrows(),
            a.ncols(),
            x.len()
        )));
    }
    let ax = a * x;
    Ok(x.dotc(&ax).re)
}

/// `Re(tr(A B))` in `O(M^2)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Dimension(format!(
            "trace_product: shapes {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = a[(i, j)] * b[(j, i)];
            acc += p.re;
        }
    }
    Ok(acc)
}

/// Frobenius norm.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real trace of a (Hermitian) matrix.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Largest entrywise deviation `|a_ij - b_ij|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// True when `||H - H^H||_max <= tol`.
pub fn is_hermitian(h: &CMatrix, tol: f64) -> bool {
    if !h.is_square() {
        return false;
    }
    let n = h.nrows();
    for i in 0..n {
        if h[(i, i)].im.abs() > tol {
            return false;
        }
        for j in 0..i {
            if (h[(i, j)] - h[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

pub(crate) fn ensure_square(m: &CMatrix, ctx: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "{ctx}: expected square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn ensure_finite(m: &CMatrix, ctx: &str) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite(format!("{ctx}: non-finite matrix entry")));
    }
    Ok(())
}

pub(crate) fn ensure_finite_vec(v: &CVector, ctx: &str) -> Result<()> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite(format!("{ctx}: non-finite vector entry")));
    }
    Ok(())
}
