//! Dense symmetric eigensolver: cyclic Jacobi rotations with eigenvector
//! accumulation. Matrices in this crate stay below 256x256, where Jacobi
//! is simple, accurate and fast enough.

use crate::{Error, Result};
use nalgebra::DMatrix;

const MAX_SWEEPS: usize = 100;
const OFF_THRESHOLD: f64 = 1e-12;

/// Eigen-decomposition of a symmetric matrix.
///
/// Returns `(values, vectors)` with eigenvalues ascending and `vectors`
/// holding the corresponding orthonormal eigenvectors as columns.
pub fn symmetric_eigen(mat: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols(), "matrix must be square");
    let asym = (mat - mat.transpose()).norm();
    if asym > 1e-10 * mat.norm().max(1.0) {
        return Err(Error::ModelConsistency(format!(
            "symmetric_eigen called on a non-symmetric matrix (asymmetry {asym:.3e})"
        )));
    }
    let mut a = mat.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = mat.norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= OFF_THRESHOLD * scale {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, off });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::EPSILON * scale {
                    continue;
                }
                // Classic symmetric Schur rotation zeroing a[(p,q)].
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                apply_rotation(&mut a, p, q, c, s);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &v.column(i));
    }
    Ok((values, vectors))
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(mat: &DMatrix<f64>) -> Result<f64> {
    let (values, _) = symmetric_eigen(mat)?;
    Ok(*values.last().expect("nonempty spectrum"))
}

fn off_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += a[(p, q)] * a[(p, q)];
        }
    }
    (2.0 * s).sqrt()
}

fn apply_rotation(a: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = c * aip - s * aiq;
        a[(i, q)] = s * aip + c * aiq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = c * apj - s * aqj;
        a[(q, j)] = s * apj + c * aqj;
    }
}
