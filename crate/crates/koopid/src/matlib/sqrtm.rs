//! Principal matrix square root.
//!
//! Computed by complex Schur triangularization followed by the triangular
//! recursion
//!
//! ```text
//! S_ii² = T_ii
//! S_ij  = (T_ij − Σ_{k=i+1}^{j−1} S_ik S_kj) / (S_ii + S_jj)
//! ```
//!
//! and back-transformation `R = Q S Qᴴ`. The principal branch puts every
//! `S_ii` in the closed right half-plane, so the divisor can only vanish when
//! two diagonal entries are (numerically) zero; that happens exactly for a
//! defective zero eigenvalue, which has no square root reachable this way.

use super::schur::schur_complex;
use super::{check_finite, check_square, MatError};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Principal square root of a real square matrix.
///
/// Imaginary parts of the back-transformed result are discarded when their
/// Frobenius mass stays below `imag_tol` times the result norm; a genuinely
/// complex root (negative real eigenvalues) is an error.
pub fn sqrtm(m: &DMatrix<f64>, imag_tol: f64) -> Result<DMatrix<f64>, MatError> {
    sqrtm_detailed(m, imag_tol).map(|(root, _)| root)
}

/// As [`sqrtm`], additionally returning the relative magnitude of the
/// discarded imaginary part.
pub fn sqrtm_detailed(m: &DMatrix<f64>, imag_tol: f64) -> Result<(DMatrix<f64>, f64), MatError> {
    check_square(m)?;
    check_finite(m)?;
    if !(imag_tol > 0.0) {
        return Err(MatError::InvalidInput(format!(
            "sqrtm imag_tol must be positive, got {imag_tol}"
        )));
    }

    let schur = schur_complex(m)?;
    let t = &schur.t;
    let n = t.nrows();
    let tiny = f64::EPSILON * t.norm().max(1.0);

    let mut s = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = t[(i, i)].sqrt();
    }
    // Fill superdiagonals in order of increasing offset so every S_ik, S_kj
    // needed on the right-hand side is already available.
    for offset in 1..n {
        for i in 0..n - offset {
            let j = i + offset;
            let mut rhs = t[(i, j)];
            for k in (i + 1)..j {
                rhs -= s[(i, k)] * s[(k, j)];
            }
            let divisor = s[(i, i)] + s[(j, j)];
            if divisor.norm() <= tiny {
                if rhs.norm() <= tiny {
                    // 0/0: a zero eigenvalue with no coupling; S_ij = 0 works.
                    s[(i, j)] = Complex64::ZERO;
                    continue;
                }
                return Err(MatError::NoPrincipalRoot);
            }
            s[(i, j)] = rhs / divisor;
        }
    }

    let root_c = &schur.q * s * schur.q.adjoint();
    let mut real_sq = 0.0;
    let mut imag_sq = 0.0;
    for v in root_c.iter() {
        real_sq += v.re * v.re;
        imag_sq += v.im * v.im;
    }
    let full = (real_sq + imag_sq).sqrt();
    let imag_rel = if full > 0.0 {
        imag_sq.sqrt() / full
    } else {
        0.0
    };
    if imag_rel > imag_tol {
        return Err(MatError::ComplexRoot {
            magnitude: imag_rel,
            tolerance: imag_tol,
        });
    }
    let root = DMatrix::from_fn(n, n, |i, j| root_c[(i, j)].re);
    Ok((root, imag_rel))
}
