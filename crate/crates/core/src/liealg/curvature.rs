//! Curvature operator on symmetric 2-tensors of p, assembled from
//! R(x,y)z = [[x,y],z] in the physical metric lambda<.,.>, together with
//! the Casimir-operator identity that cross-checks it.

use super::NormalizedModel;
use crate::jacobi;
use crate::Result;
use nalgebra::{DMatrix, DVector};

/// Matrix of h -> R_ikjl h^kl restricted to symmetric 2-tensors, in the
/// orthonormal tensor basis induced by an orthonormal basis of p.
pub struct CurvatureOperator {
    /// Dimension n of p.
    pub n: usize,
    /// Full operator on p ⊗ p (n^2 x n^2).
    pub tensor_matrix: DMatrix<f64>,
    /// Restriction to Sym^2(p), dimension n(n+1)/2.
    pub sym_matrix: DMatrix<f64>,
}

/// Casimir operators of the isotropy representation on p and p ⊗ p, built
/// from an orthonormal basis of l for the physical form -lambda<.,.> (the
/// normalization that matches the curvature operator above).
pub struct CasimirOperators {
    pub c_p: DMatrix<f64>,
    pub c_pp: DMatrix<f64>,
}

/// Assembles the curvature operator of a normalized model.
///
/// The entry convention is M[(ab),(cd)] = lambda <[b_a, b_c], [b_b, b_d]>
/// with b_* the physical-orthonormal p-basis; the sign is pinned by the
/// real family (largest eigenvalue +1) and by Rm(g) = Ric.
pub fn curvature_operator(model: &NormalizedModel) -> Result<CurvatureOperator> {
    let n = model.model.p_dim();
    // Brackets [b_a, b_c] of all orthonormal p-pairs, as coordinates.
    let mut brackets: Vec<Vec<DVector<f64>>> = Vec::with_capacity(n);
    let ads: Vec<DMatrix<f64>> = (0..n).map(|a| model.model.ad_of(&model.p_vector(a))).collect();
    for a in 0..n {
        let row: Vec<DVector<f64>> = (0..n).map(|c| &ads[a] * model.p_vector(c)).collect();
        brackets.push(row);
    }
    // Cache K * [b_a, b_c] to turn entries into dot products.
    let k_brackets: Vec<Vec<DVector<f64>>> = brackets
        .iter()
        .map(|row| row.iter().map(|v| &model.model.killing * v).collect())
        .collect();

    let mut tensor = DMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let val = model.lambda * k_brackets[a][c].dot(&brackets[b][d]);
                    tensor[(a * n + b, c * n + d)] = val;
                }
            }
        }
    }
    let sym = restrict_to_sym(&tensor, n);
    Ok(CurvatureOperator { n, tensor_matrix: tensor, sym_matrix: sym })
}

/// Projects an operator on p ⊗ p to the orthonormal Sym^2 basis
/// {e_aa} ∪ {(e_ab + e_ba)/sqrt(2), a < b}.
fn restrict_to_sym(tensor: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let pairs = sym_index_pairs(n);
    let nn = pairs.len();
    let mut p = DMatrix::zeros(nn, n * n);
    for (row, &(a, b)) in pairs.iter().enumerate() {
        if a == b {
            p[(row, a * n + a)] = 1.0;
        } else {
            let w = 1.0 / 2.0f64.sqrt();
            p[(row, a * n + b)] = w;
            p[(row, b * n + a)] = w;
        }
    }
    &p * tensor * p.transpose()
}

/// Index pairs (a <= b) enumerating the Sym^2 basis.
pub fn sym_index_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        pairs.push((a, a));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            pairs.push((a, b));
        }
    }
    pairs
}

/// Symmetric-tensor coordinates of the metric g = sum_a e_aa.
pub fn metric_sym_vector(n: usize) -> DVector<f64> {
    let pairs = sym_index_pairs(n);
    DVector::from_fn(pairs.len(), |i, _| if pairs[i].0 == pairs[i].1 { 1.0 } else { 0.0 })
}

/// Largest eigenvalue of the curvature operator on Sym^2(p).
pub fn gamma(model: &NormalizedModel) -> Result<f64> {
    let op = curvature_operator(model)?;
    jacobi::max_eigenvalue(&op.sym_matrix)
}

/// Casimir operators of l acting on p and on p ⊗ p.
pub fn casimir_operators(model: &NormalizedModel) -> Result<CasimirOperators> {
    let n = model.model.p_dim();
    let l_dim = model.model.l_dim();
    // Action maps A_i: p -> p, u -> [e_i, u] in the orthonormal p-basis.
    let mut actions = Vec::with_capacity(l_dim);
    for i in 0..l_dim {
        let ad_e = model.model.ad_of(&model.l_vector(i));
        let mut a = DMatrix::zeros(n, n);
        for c in 0..n {
            let img = &ad_e * model.p_vector(c);
            let k_img = &model.model.killing * img;
            for r in 0..n {
                a[(r, c)] = model.lambda * model.p_vector(r).dot(&k_img);
            }
        }
        actions.push(a);
    }
    let mut c_p = DMatrix::zeros(n, n);
    for a in &actions {
        c_p -= a * a;
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut c_pp = kron(&c_p, &id) + kron(&id, &c_p);
    for a in &actions {
        c_pp -= kron(a, a) * 2.0;
    }
    Ok(CasimirOperators { c_p, c_pp })
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}
