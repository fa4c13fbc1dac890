//! Complex Schur decomposition of a real matrix.
//!
//! The matrix is promoted to complex, reduced to upper Hessenberg form with
//! Householder reflectors, and triangularized by an explicitly shifted QR
//! iteration with Givens rotations and Wilkinson shifts. The complex form is
//! used (rather than the real quasi-triangular one) because downstream
//! consumers need a strictly triangular factor: the square-root recursion is
//! stated element-wise on triangular matrices, and eigenvalues are read
//! directly from the diagonal.

use super::{check_finite, check_square, MatError};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Unitary factor `Q` and upper-triangular factor `T` with `M = Q T Qᴴ`.
pub struct ComplexSchur {
    pub q: DMatrix<Complex64>,
    pub t: DMatrix<Complex64>,
}

impl ComplexSchur {
    /// Eigenvalues of the decomposed matrix: the diagonal of `T`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Complex Schur decomposition `M = Q T Qᴴ` of a real square matrix.
pub fn schur_complex(m: &DMatrix<f64>) -> Result<ComplexSchur, MatError> {
    check_square(m)?;
    check_finite(m)?;
    let n = m.nrows();

    let mut h = DMatrix::from_fn(n, n, |i, j| Complex64::new(m[(i, j)], 0.0));
    let mut q = DMatrix::<Complex64>::identity(n, n);

    if n > 2 {
        hessenberg(&mut h, &mut q);
    }
    qr_iterate(&mut h, &mut q)?;

    // Clean the strictly lower part: the iteration drives it below the
    // deflation threshold but not to exact zero.
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = Complex64::ZERO;
        }
    }

    Ok(ComplexSchur { q, t: h })
}

/// Householder reduction to upper Hessenberg form, accumulating `Q` so that
/// the input equals `Q H Qᴴ`.
fn hessenberg(h: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>) {
    let n = h.nrows();
    let mut w = vec![Complex64::ZERO; n];

    for k in 0..n - 2 {
        // Reflector for column k, rows k+1..n.
        let len = n - k - 1;
        let mut norm_sq = 0.0;
        for i in 0..len {
            norm_sq += h[(k + 1 + i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm <= f64::MIN_POSITIVE {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::ONE
        };
        let alpha = -phase * norm;

        // u = x - alpha e1, normalized into w.
        let mut u_norm_sq = 0.0;
        for i in 0..len {
            let mut u = h[(k + 1 + i, k)];
            if i == 0 {
                u -= alpha;
            }
            w[i] = u;
            u_norm_sq += u.norm_sqr();
        }
        if u_norm_sq <= f64::MIN_POSITIVE {
            continue;
        }
        let inv = Complex64::new(1.0 / u_norm_sq.sqrt(), 0.0);
        for wi in w.iter_mut().take(len) {
            *wi *= inv;
        }

        // Left: rows k+1..n of all columns, H ← (I - 2wwᴴ) H.
        for j in k..n {
            let mut dot = Complex64::ZERO;
            for i in 0..len {
                dot += w[i].conj() * h[(k + 1 + i, j)];
            }
            dot *= 2.0;
            for i in 0..len {
                let v = h[(k + 1 + i, j)] - dot * w[i];
                h[(k + 1 + i, j)] = v;
            }
        }
        // Right: columns k+1..n of all rows, H ← H (I - 2wwᴴ).
        for i in 0..n {
            let mut dot = Complex64::ZERO;
            for j in 0..len {
                dot += h[(i, k + 1 + j)] * w[j];
            }
            dot *= 2.0;
            for j in 0..len {
                let v = h[(i, k + 1 + j)] - dot * w[j].conj();
                h[(i, k + 1 + j)] = v;
            }
        }
        // Accumulate: Q ← Q (I - 2wwᴴ).
        for i in 0..n {
            let mut dot = Complex64::ZERO;
            for j in 0..len {
                dot += q[(i, k + 1 + j)] * w[j];
            }
            dot *= 2.0;
            for j in 0..len {
                let v = q[(i, k + 1 + j)] - dot * w[j].conj();
                q[(i, k + 1 + j)] = v;
            }
        }
    }
}

fn subdiag_negligible(h: &DMatrix<Complex64>, i: usize, scale: f64) -> bool {
    let local = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
    let threshold = f64::EPSILON * if local > 0.0 { local } else { scale };
    h[(i, i - 1)].norm() <= threshold
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block closest to the
/// bottom-right entry.
fn wilkinson_shift(h: &DMatrix<Complex64>, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Explicitly shifted QR iteration on a Hessenberg matrix, accumulating the
/// rotations into `q`. Deflates from the bottom-right corner.
fn qr_iterate(h: &mut DMatrix<Complex64>, q: &mut DMatrix<Complex64>) -> Result<(), MatError> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let max_sweeps = 60 * n;
    let mut sweeps = 0usize;
    let mut stagnant = 0usize;
    // Rotation store for one sweep: (c, s) pairs.
    let mut rot = vec![(Complex64::ZERO, Complex64::ZERO); n];

    let mut hi = n - 1;
    loop {
        // Deflate converged trailing eigenvalues.
        while hi > 0 && subdiag_negligible(h, hi, scale) {
            h[(hi, hi - 1)] = Complex64::ZERO;
            hi -= 1;
            stagnant = 0;
        }
        if hi == 0 {
            return Ok(());
        }
        // Active block `lo..=hi`: walk up until a negligible coupling.
        let mut lo = hi;
        while lo > 0 && !subdiag_negligible(h, lo, scale) {
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = Complex64::ZERO;
        }

        if sweeps >= max_sweeps {
            return Err(MatError::NonConvergence { iterations: sweeps });
        }
        sweeps += 1;
        stagnant += 1;

        let mu = if stagnant % 12 == 0 {
            // Exceptional shift to break symmetric cycling.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h, hi)
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }

        // Left pass: QR of the shifted block by Givens rotations. Rotation k
        // zeroes H[k+1, k] acting on rows (k, k+1) over columns k..n.
        for k in lo..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if r <= f64::MIN_POSITIVE {
                rot[k] = (Complex64::ONE, Complex64::ZERO);
                continue;
            }
            let c = a / r;
            let s = b / r;
            rot[k] = (c, s);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c.conj() * x + s.conj() * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
        }

        // Right pass: H ← H Gᴴ restores Hessenberg form; also Q ← Q Gᴴ.
        for k in lo..hi {
            let (c, s) = rot[k];
            let row_end = (k + 1).min(hi);
            for i in 0..=row_end {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s;
                h[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + y * s;
                q[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }

        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
}
