//! Dense numerical kernels shared by the identification pipeline.
//!
//! Everything here operates on `nalgebra` dynamic matrices. Eigenvalues are
//! always read off the diagonal of the complex Schur form ([`schur_complex`])
//! so that every spectral quantity in the crate comes from one numeric path.

mod schur;
mod sqrtm;

pub use schur::{schur_complex, ComplexSchur};
pub use sqrtm::{sqrtm, sqrtm_detailed};

use nalgebra::DMatrix;
use thiserror::Error;

/// Relative singular-value cutoff used by [`pinv`] when no explicit
/// tolerance is supplied.
pub const DEFAULT_PINV_REL_TOL: f64 = 1e-12;

/// Default relative bound on the imaginary residue discarded by [`sqrtm`].
pub const DEFAULT_IMAG_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum MatError {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Schur iteration did not converge after {iterations} QR sweeps")]
    NonConvergence { iterations: usize },
    #[error("matrix has no principal square root (recursion divisor vanished)")]
    NoPrincipalRoot,
    #[error(
        "principal square root is complex: relative imaginary magnitude {magnitude:.3e} \
         exceeds the tolerance {tolerance:.3e}"
    )]
    ComplexRoot { magnitude: f64, tolerance: f64 },
}

pub(crate) fn check_finite(m: &DMatrix<f64>) -> Result<(), MatError> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(MatError::NonFinite)
    }
}

pub(crate) fn check_square(m: &DMatrix<f64>) -> Result<(), MatError> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(MatError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Moore-Penrose pseudoinverse via SVD.
///
/// Singular values below `rel_tol` times the largest singular value are
/// truncated to zero.
pub fn pinv(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>, MatError> {
    check_finite(m)?;
    if !(rel_tol > 0.0) {
        return Err(MatError::InvalidInput(format!(
            "pinv rel_tol must be positive, got {rel_tol}"
        )));
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd requested u");
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = rel_tol * smax;

    // M† = V Σ† Uᵀ with truncated inverse singular values.
    let k = svd.singular_values.len();
    let mut inv = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        let s = svd.singular_values[i];
        if s > cutoff && s > 0.0 {
            inv[(i, i)] = 1.0 / s;
        }
    }
    Ok(v_t.transpose() * inv * u.transpose())
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64, MatError> {
    check_finite(m)?;
    let svd = m.clone().svd(false, false);
    Ok(svd.singular_values.iter().cloned().fold(0.0_f64, f64::max))
}

/// Maximum eigenvalue modulus, read from the Schur diagonal.
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64, MatError> {
    let schur = schur_complex(m)?;
    Ok(schur
        .eigenvalues()
        .iter()
        .map(|l| l.norm())
        .fold(0.0_f64, f64::max))
}

/// Minimum eigenvalue modulus, read from the Schur diagonal.
pub fn min_eig_modulus(m: &DMatrix<f64>) -> Result<f64, MatError> {
    let schur = schur_complex(m)?;
    Ok(schur
        .eigenvalues()
        .iter()
        .map(|l| l.norm())
        .fold(f64::INFINITY, f64::min))
}

/// Smallest and largest eigenvalue of a symmetric matrix.
///
/// The input is symmetrized before factoring, so tiny asymmetries from
/// floating-point assembly do not leak imaginary parts into the result.
/// Used to evaluate Lyapunov-inequality residuals.
pub fn sym_eig_range(m: &DMatrix<f64>) -> Result<(f64, f64), MatError> {
    check_square(m)?;
    let sym = (m + m.transpose()) * 0.5;
    let schur = schur_complex(&sym)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for l in schur.eigenvalues() {
        lo = lo.min(l.re);
        hi = hi.max(l.re);
    }
    Ok((lo, hi))
}
