//! Explicit real matrix bases for so(1,m), su(1,m) and sp(1,m), the latter
//! two realified (complex entries as 2x2 blocks, quaternions as 4x4 blocks
//! of the left-multiplication representation). Basis elements are chosen as
//! eigenvectors of the Cartan involution X -> eta X eta.

use crate::models::{Family, ModelSpec};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Basis of the isometry algebra together with the Cartan eigenvalue of
/// each element (-1 for p, +1 for l).
pub struct RawBasis {
    pub basis: Vec<DMatrix<f64>>,
    pub theta_sign: Vec<f64>,
    pub matrix_dim: usize,
}

impl RawBasis {
    pub fn p_indices(&self) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| self.theta_sign[i] < 0.0).collect()
    }

    pub fn l_indices(&self) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| self.theta_sign[i] > 0.0).collect()
    }
}

pub fn raw_basis(spec: &ModelSpec) -> Result<RawBasis> {
    match spec.family {
        Family::Real => Ok(so_basis(spec.m as usize)),
        Family::Complex => Ok(su_basis(spec.m as usize)),
        Family::Quaternion => Ok(sp_basis(spec.m as usize)),
        Family::Octonion => Err(Error::UnsupportedModel(
            "no matrix model is built for the octonionic family; gamma and root data \
             come from the catalog"
                .into(),
        )),
    }
}

/// so(1,m): boosts E_{0i} + E_{i0} span p, rotations E_{ij} - E_{ji} span l.
fn so_basis(m: usize) -> RawBasis {
    let d = m + 1;
    let mut basis = Vec::new();
    let mut theta_sign = Vec::new();
    for i in 1..=m {
        let mut x = DMatrix::zeros(d, d);
        x[(0, i)] = 1.0;
        x[(i, 0)] = 1.0;
        basis.push(x);
        theta_sign.push(-1.0);
    }
    for i in 1..=m {
        for j in (i + 1)..=m {
            let mut x = DMatrix::zeros(d, d);
            x[(i, j)] = 1.0;
            x[(j, i)] = -1.0;
            basis.push(x);
            theta_sign.push(1.0);
        }
    }
    RawBasis { basis, theta_sign, matrix_dim: d }
}

/// Realification of the complex matrix A + iB as [[A, -B], [B, A]].
fn realify_complex(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    for r in 0..d {
        for c in 0..d {
            out[(r, c)] = a[(r, c)];
            out[(r, c + d)] = -b[(r, c)];
            out[(r + d, c)] = b[(r, c)];
            out[(r + d, c + d)] = a[(r, c)];
        }
    }
    out
}

/// su(1,m), realified. Real dimension (m+1)^2 - 1; p has real dimension 2m.
fn su_basis(m: usize) -> RawBasis {
    let d = m + 1;
    let zeros = || DMatrix::<f64>::zeros(d, d);
    let mut basis = Vec::new();
    let mut theta_sign = Vec::new();

    // p: first row/column pairs, one real and one imaginary per column.
    for j in 1..=m {
        let mut a = zeros();
        a[(0, j)] = 1.0;
        a[(j, 0)] = 1.0;
        basis.push(realify_complex(&a, &zeros()));
        theta_sign.push(-1.0);

        let mut b = zeros();
        b[(j, 0)] = 1.0;
        b[(0, j)] = -1.0;
        basis.push(realify_complex(&zeros(), &b));
        theta_sign.push(-1.0);
    }
    // l: rotations and i-symmetric pairs in the lower block.
    for j in 1..=m {
        for k in (j + 1)..=m {
            let mut a = zeros();
            a[(j, k)] = 1.0;
            a[(k, j)] = -1.0;
            basis.push(realify_complex(&a, &zeros()));
            theta_sign.push(1.0);

            let mut b = zeros();
            b[(j, k)] = 1.0;
            b[(k, j)] = 1.0;
            basis.push(realify_complex(&zeros(), &b));
            theta_sign.push(1.0);
        }
    }
    // l: traceless i-diagonals i(E_00 - E_jj).
    for j in 1..=m {
        let mut b = zeros();
        b[(0, 0)] = 1.0;
        b[(j, j)] = -1.0;
        basis.push(realify_complex(&zeros(), &b));
        theta_sign.push(1.0);
    }
    RawBasis { basis, theta_sign, matrix_dim: 2 * d }
}

/// Quaternion as (w, x, y, z) = w + xi + yj + zk.
#[derive(Clone, Copy)]
struct Quat(f64, f64, f64, f64);

impl Quat {
    const ONE: Quat = Quat(1.0, 0.0, 0.0, 0.0);
    const I: Quat = Quat(0.0, 1.0, 0.0, 0.0);
    const J: Quat = Quat(0.0, 0.0, 1.0, 0.0);
    const K: Quat = Quat(0.0, 0.0, 0.0, 1.0);

    fn conj(self) -> Quat {
        Quat(self.0, -self.1, -self.2, -self.3)
    }

    fn neg(self) -> Quat {
        Quat(-self.0, -self.1, -self.2, -self.3)
    }

    /// Left-multiplication matrix on the basis (1, i, j, k).
    fn left_mul(self) -> [[f64; 4]; 4] {
        let Quat(w, x, y, z) = self;
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    }
}

fn set_quat_block(mat: &mut DMatrix<f64>, row: usize, col: usize, q: Quat) {
    let l = q.left_mul();
    for r in 0..4 {
        for c in 0..4 {
            mat[(4 * row + r, 4 * col + c)] = l[r][c];
        }
    }
}

/// sp(1,m), realified through the left-multiplication representation.
/// Real dimension (m+1)(2m+3); p has real dimension 4m.
fn sp_basis(m: usize) -> RawBasis {
    let d = m + 1;
    let rd = 4 * d;
    let mut basis = Vec::new();
    let mut theta_sign = Vec::new();
    let units = [Quat::ONE, Quat::I, Quat::J, Quat::K];
    let imag = [Quat::I, Quat::J, Quat::K];

    // p: first row/column, X_{j0} = q, X_{0j} = conj(q).
    for j in 1..=m {
        for q in units {
            let mut x = DMatrix::zeros(rd, rd);
            set_quat_block(&mut x, j, 0, q);
            set_quat_block(&mut x, 0, j, q.conj());
            basis.push(x);
            theta_sign.push(-1.0);
        }
    }
    // l: imaginary diagonal entries (including the (0,0) sp(1) factor).
    for j in 0..=m {
        for q in imag {
            let mut x = DMatrix::zeros(rd, rd);
            set_quat_block(&mut x, j, j, q);
            basis.push(x);
            theta_sign.push(1.0);
        }
    }
    // l: anti-Hermitian off-diagonal pairs in the lower block.
    for j in 1..=m {
        for k in (j + 1)..=m {
            for q in units {
                let mut x = DMatrix::zeros(rd, rd);
                set_quat_block(&mut x, j, k, q);
                set_quat_block(&mut x, k, j, q.conj().neg());
                basis.push(x);
                theta_sign.push(1.0);
            }
        }
    }
    RawBasis { basis, theta_sign, matrix_dim: rd }
}

/// The realified signature matrix eta = diag(-1, 1, ..., 1).
pub fn eta_realified(spec: &ModelSpec, matrix_dim: usize) -> DMatrix<f64> {
    let block = match spec.family {
        Family::Real => 1,
        Family::Complex => matrix_dim / (spec.m as usize + 1),
        Family::Quaternion => 4,
        Family::Octonion => unreachable!(),
    };
    let mut eta = DMatrix::identity(matrix_dim, matrix_dim);
    match spec.family {
        // Complex realification stacks the real and imaginary copies, so the
        // distinguished coordinate appears at positions 0 and m+1.
        Family::Complex => {
            let d = spec.m as usize + 1;
            eta[(0, 0)] = -1.0;
            eta[(d, d)] = -1.0;
        }
        _ => {
            for i in 0..block {
                eta[(i, i)] = -1.0;
            }
        }
    }
    eta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_model;

    fn check_counts(family: Family, m: u32, dim: usize, p_dim: usize) {
        let spec = build_model(family, m).unwrap();
        let raw = raw_basis(&spec).unwrap();
        assert_eq!(raw.basis.len(), dim, "{family:?} m={m} total dim");
        assert_eq!(raw.p_indices().len(), p_dim, "{family:?} m={m} p dim");
        assert_eq!(p_dim as i64, spec.n);
    }

    #[test]
    fn dimensions() {
        // dim so(1,4) = 10 with p of dimension 4.
        check_counts(Family::Real, 4, 10, 4);
        // realified su(1,2): real dim 8, p dim 4.
        check_counts(Family::Complex, 2, 8, 4);
        // realified sp(1,1): real dim 10, p dim 4.
        check_counts(Family::Quaternion, 1, 10, 4);
        check_counts(Family::Real, 7, 28, 7);
        check_counts(Family::Complex, 3, 15, 6);
        check_counts(Family::Quaternion, 2, 21, 8);
    }

    #[test]
    fn octonion_has_no_matrix_model() {
        let spec = build_model(Family::Octonion, 2).unwrap();
        assert!(matches!(raw_basis(&spec), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn basis_elements_are_theta_eigenvectors() {
        for (family, m) in [(Family::Real, 3), (Family::Complex, 2), (Family::Quaternion, 1)] {
            let spec = build_model(family, m).unwrap();
            let raw = raw_basis(&spec).unwrap();
            let eta = eta_realified(&spec, raw.matrix_dim);
            for (x, &s) in raw.basis.iter().zip(&raw.theta_sign) {
                let tx = &eta * x * &eta;
                assert!((tx - x * s).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn quaternion_left_mul_is_a_homomorphism() {
        let prods = [
            (Quat::I, Quat::J, Quat::K),
            (Quat::J, Quat::K, Quat::I),
            (Quat::K, Quat::I, Quat::J),
        ];
        for (a, b, c) in prods {
            let la = DMatrix::from_fn(4, 4, |r, s| a.left_mul()[r][s]);
            let lb = DMatrix::from_fn(4, 4, |r, s| b.left_mul()[r][s]);
            let lc = DMatrix::from_fn(4, 4, |r, s| c.left_mul()[r][s]);
            assert!((la.clone() * lb.clone() - lc).norm() < 1e-15);
            assert!((lb * la + DMatrix::from_fn(4, 4, |r, s| c.left_mul()[r][s])).norm() < 1e-15);
        }
    }
}
