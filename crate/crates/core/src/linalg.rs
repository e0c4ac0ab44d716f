use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues of a Hermitian matrix, ascending. The matrix is embedded as
/// the real symmetric block form [[X, -Y], [Y, X]] (X = Re A, Y = Im A),
/// whose spectrum is that of A with every eigenvalue doubled, and the
/// embedding is diagonalised by cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(a: &Array2<Complex64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = Array2::<f64>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            // Symmetrise so roundoff in a nominally Hermitian input cannot
            // leak an antisymmetric part into the embedding.
            let re = 0.5 * (a[[i, j]].re + a[[j, i]].re);
            let im = 0.5 * (a[[i, j]].im - a[[j, i]].im);
            m[[i, j]] = re;
            m[[n + i, n + j]] = re;
            m[[i, n + j]] = -im;
            m[[n + i, j]] = im;
        }
    }
    let mut eig = jacobi_symmetric(m);
    eig.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    // The doubled spectrum is sorted, so the two copies of each eigenvalue
    // are adjacent; keep one per pair.
    Ok(eig.into_iter().step_by(2).collect())
}

fn jacobi_symmetric(mut m: Array2<f64>) -> Vec<f64> {
    let n = m.nrows();
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[[k, p]];
                    let akq = m[[k, q]];
                    m[[k, p]] = c * akp - s * akq;
                    m[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[[p, k]];
                    let aqk = m[[q, k]];
                    m[[p, k]] = c * apk - s * aqk;
                    m[[q, k]] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[[i, i]]).collect()
}

/// Largest singular value, computed as sqrt of the top eigenvalue of A^dag A.
pub fn operator_norm(a: &Array2<Complex64>) -> Result<f64> {
    let ah = a.t().mapv(|z| z.conj());
    let gram = ah.dot(a);
    let eig = hermitian_eigenvalues(&gram)?;
    Ok(eig.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}
