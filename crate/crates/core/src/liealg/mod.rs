//! Matrix Lie-algebra models of the rank-1 spaces: structure constants,
//! Killing form, Cartan decomposition, restricted roots and the curvature
//! operator of the isotropy representation.

pub mod basis;
mod curvature;
pub mod htype;

pub use curvature::{
    casimir_operators, curvature_operator, gamma, metric_sym_vector, sym_index_pairs,
    CasimirOperators, CurvatureOperator,
};
pub use htype::{htype_algebra, NilpotentAlgebra};

use crate::jacobi;
use crate::models::ModelSpec;
use crate::{Error, Result};
use basis::{eta_realified, raw_basis, RawBasis};
use nalgebra::{DMatrix, DVector};

const CLOSURE_TOL: f64 = 1e-10;

/// An explicit matrix model of the isometry algebra with its Cartan
/// decomposition and Killing form.
pub struct MatrixLieModel {
    pub spec: ModelSpec,
    pub basis: Vec<DMatrix<f64>>,
    /// Cartan eigenvalue per basis element: -1 on p, +1 on l.
    pub theta_sign: Vec<f64>,
    pub p_indices: Vec<usize>,
    pub l_indices: Vec<usize>,
    /// Structure constants: bracket[i][j] holds the coordinates of
    /// [basis_i, basis_j] in the model basis.
    structure: Vec<Vec<DVector<f64>>>,
    /// ad-matrices: ad[i] * x = coordinates of [basis_i, x].
    ad: Vec<DMatrix<f64>>,
    /// Gram matrix of the Killing form Tr(ad x . ad y).
    pub killing: DMatrix<f64>,
}

impl MatrixLieModel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn p_dim(&self) -> usize {
        self.p_indices.len()
    }

    pub fn l_dim(&self) -> usize {
        self.l_indices.len()
    }

    /// Bracket of coordinate vectors.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut ad_x = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.dim() {
            if x[i] != 0.0 {
                ad_x += &self.ad[i] * x[i];
            }
        }
        ad_x * y
    }

    /// ad-matrix of a coordinate vector.
    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut ad_x = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.dim() {
            if x[i] != 0.0 {
                ad_x += &self.ad[i] * x[i];
            }
        }
        ad_x
    }

    /// Killing pairing of coordinate vectors.
    pub fn killing_pair(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.killing * y)[(0, 0)]
    }

    /// Matrix realization of a coordinate vector.
    pub fn realize(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.basis[0].nrows(), self.basis[0].ncols());
        for i in 0..self.dim() {
            if x[i] != 0.0 {
                out += &self.basis[i] * x[i];
            }
        }
        out
    }
}

/// Builds the matrix model for one catalog entry (Real, Complex or
/// Quaternion families; the octonionic family has no matrix model here).
pub fn matrix_model(spec: &ModelSpec) -> Result<MatrixLieModel> {
    let raw = raw_basis(spec)?;
    let RawBasis { basis, theta_sign, matrix_dim } = raw;
    let dim = basis.len();

    // Gram matrix of the Frobenius product; used to expand brackets.
    let mut gram = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = frobenius(&basis[i], &basis[j]);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let gram_chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::ModelConsistency("basis Gram matrix is singular".into()))?;

    let mut structure: Vec<Vec<DVector<f64>>> = vec![vec![DVector::zeros(dim); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            if j < i {
                structure[i][j] = -structure[j][i].clone();
                continue;
            }
            if j == i {
                continue;
            }
            let br = &basis[i] * &basis[j] - &basis[j] * &basis[i];
            let rhs = DVector::from_fn(dim, |k, _| frobenius(&basis[k], &br));
            let coeffs = gram_chol.solve(&rhs);
            // Closure check: the bracket must lie in the span of the basis.
            let mut recon = DMatrix::zeros(matrix_dim, matrix_dim);
            for k in 0..dim {
                if coeffs[k].abs() > 0.0 {
                    recon += &basis[k] * coeffs[k];
                }
            }
            let res = (&recon - &br).norm();
            if res > CLOSURE_TOL * br.norm().max(1.0) {
                return Err(Error::ModelConsistency(format!(
                    "bracket [b{i}, b{j}] leaves the basis span (residual {res:.3e})"
                )));
            }
            structure[i][j] = coeffs;
        }
    }

    let ad: Vec<DMatrix<f64>> = (0..dim)
        .map(|i| DMatrix::from_fn(dim, dim, |k, j| structure[i][j][k]))
        .collect();

    let mut killing = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = (&ad[i] * &ad[j]).trace();
            killing[(i, j)] = v;
            killing[(j, i)] = v;
        }
    }

    let model = MatrixLieModel {
        spec: *spec,
        p_indices: (0..dim).filter(|&i| theta_sign[i] < 0.0).collect(),
        l_indices: (0..dim).filter(|&i| theta_sign[i] > 0.0).collect(),
        basis,
        theta_sign,
        structure,
        ad,
        killing,
    };
    check_cartan_relations(&model, matrix_dim, spec)?;
    Ok(model)
}

fn frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Verifies [p,p] ⊆ l, [p,l] ⊆ p, [l,l] ⊆ l, the eta-involution, and the
/// definiteness pattern of the Killing form.
fn check_cartan_relations(model: &MatrixLieModel, matrix_dim: usize, spec: &ModelSpec) -> Result<()> {
    let dim = model.dim();
    for i in 0..dim {
        for j in 0..dim {
            // [e_i, e_j] must land in the (s_i * s_j)-eigenspace.
            let target = model.theta_sign[i] * model.theta_sign[j];
            for k in 0..dim {
                if model.theta_sign[k] != target && model.structure[i][j][k].abs() > CLOSURE_TOL {
                    return Err(Error::ModelConsistency(format!(
                        "bracket [b{i}, b{j}] violates the Cartan grading at b{k}"
                    )));
                }
            }
        }
    }
    let eta = eta_realified(spec, matrix_dim);
    for (x, &s) in model.basis.iter().zip(&model.theta_sign) {
        if (&eta * x * &eta - x * s).norm() > 1e-12 {
            return Err(Error::ModelConsistency("basis element is not an eta-eigenvector".into()));
        }
    }
    // Killing form: positive definite on p, negative definite on l, p ⟂ l.
    for &i in &model.p_indices {
        for &j in &model.l_indices {
            if model.killing[(i, j)].abs() > 1e-9 {
                return Err(Error::ModelConsistency("Killing form does not split p ⟂ l".into()));
            }
        }
    }
    let kp = submatrix(&model.killing, &model.p_indices);
    let kl = submatrix(&model.killing, &model.l_indices);
    if kp.clone().cholesky().is_none() {
        return Err(Error::ModelConsistency("Killing form not positive definite on p".into()));
    }
    if (-kl).cholesky().is_none() {
        return Err(Error::ModelConsistency("Killing form not negative definite on l".into()));
    }
    Ok(())
}

fn submatrix(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// A model with the maximal abelian line chosen, roots scaled so that the
/// smallest restricted root takes the value 1 (value 2 for the degenerate
/// members whose 1-root space is empty) and the metric scale lambda fixed
/// by (v1, v1) = lambda <v1, v1> = 1.
pub struct NormalizedModel {
    pub model: MatrixLieModel,
    /// Coordinates of the unit radial generator v1.
    pub v1: DVector<f64>,
    pub lambda: f64,
    /// Eigenvalues of ad(v1), ascending.
    pub ad_spectrum: Vec<f64>,
    pub mult1: usize,
    pub mult2: usize,
    /// Orthonormal basis of p for lambda<.,.>, as coordinate columns.
    pub p_ortho: DMatrix<f64>,
    /// Orthonormal basis of l for -lambda<.,.>, as coordinate columns.
    pub l_ortho: DMatrix<f64>,
}

/// Fixes the normalization of a matrix model.
///
/// The maximal abelian line is searched among the p-basis elements in order
/// of ad-matrix sparsity and validated through its ad-spectrum, which must
/// cluster on {0, ±mu} or {0, ±mu, ±2mu}.
pub fn normalize(model: MatrixLieModel) -> Result<NormalizedModel> {
    let dim = model.dim();
    // Positive definite form B(x,y) = -<x, theta y> used to symmetrize ad(v).
    let mut b_theta = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            b_theta[(i, j)] = -model.killing[(i, j)] * model.theta_sign[j];
        }
    }
    let chol = b_theta
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Normalization("B_theta not positive definite".into()))?;
    let l_mat = chol.l();
    let l_inv = l_mat
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Normalization("Cholesky factor not invertible".into()))?;

    let mut candidates: Vec<usize> = model.p_indices.clone();
    candidates.sort_by_key(|&i| model.ad[i].iter().filter(|x| x.abs() > 1e-12).count());

    let mut last_err = Error::Normalization("no candidate abelian direction".into());
    for &ci in &candidates {
        let sym = l_mat.transpose() * &model.ad[ci] * l_inv.transpose();
        if (&sym - sym.transpose()).norm() > 1e-8 * sym.norm().max(1.0) {
            last_err =
                Error::Normalization(format!("ad(b{ci}) not symmetrizable; not an abelian direction"));
            continue;
        }
        let sym = (&sym + sym.transpose()) * 0.5;
        let (values, _) = jacobi::symmetric_eigen(&sym)?;
        match classify_spectrum(&values, &model.spec) {
            Ok((scale, mult1, mult2)) => {
                let mut v1 = DVector::zeros(dim);
                v1[ci] = 1.0 / scale;
                let norm_sq = model.killing_pair(&v1, &v1);
                if norm_sq <= 0.0 {
                    return Err(Error::Normalization("candidate v1 has nonpositive Killing norm".into()));
                }
                let lambda = 1.0 / norm_sq;
                let spectrum: Vec<f64> = values.iter().map(|v| v / scale).collect();
                let p_ortho = orthonormal_columns(&model, &model.p_indices, lambda)?;
                let l_ortho = orthonormal_columns(&model, &model.l_indices, lambda)?;
                return Ok(NormalizedModel {
                    model,
                    v1,
                    lambda,
                    ad_spectrum: spectrum,
                    mult1,
                    mult2,
                    p_ortho,
                    l_ortho,
                });
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Groups an ad(v)-spectrum into clusters and decides the root scaling.
/// Returns (scale, mult1, mult2) where eigenvalue/scale gives root values.
fn classify_spectrum(values: &[f64], spec: &ModelSpec) -> Result<(f64, usize, usize)> {
    let scale_ref = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let cluster_tol = 1e-7 * scale_ref;
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        match clusters.last_mut() {
            Some((center, count)) if (v - *center).abs() <= cluster_tol => {
                *center = (*center * *count as f64 + v) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    for pair in clusters.windows(2) {
        if (pair[1].0 - pair[0].0).abs() < 1e-6 * scale_ref {
            return Err(Error::Normalization(format!(
                "eigenvalue clusters too close: {} vs {}",
                pair[0].0, pair[1].0
            )));
        }
    }
    let positives: Vec<(f64, usize)> = clusters.iter().copied().filter(|&(c, _)| c > cluster_tol).collect();
    let has_zero = clusters.iter().any(|&(c, _)| c.abs() <= cluster_tol);
    if !has_zero {
        return Err(Error::Normalization("ad(v) spectrum has no kernel".into()));
    }
    match positives.len() {
        2 => {
            let (mu, m1) = positives[0];
            let (mu2, m2) = positives[1];
            if (mu2 / mu - 2.0).abs() > 1e-8 {
                return Err(Error::Normalization(format!(
                    "positive eigenvalues not in ratio 1:2 ({mu} vs {mu2})"
                )));
            }
            Ok((mu, m1, m2))
        }
        1 => {
            let (mu, count) = positives[0];
            // Degenerate members: when the 1-root space is empty the single
            // positive cluster carries root value 2 (Complex/Quaternion m=1).
            if spec.mult1 == 0 {
                Ok((mu / 2.0, 0, count))
            } else {
                Ok((mu, count, 0))
            }
        }
        other => Err(Error::Normalization(format!(
            "expected 1 or 2 positive eigenvalue clusters, found {other}"
        ))),
    }
}

/// Orthonormalizes the given sub-basis against sign * lambda * Killing,
/// where sign makes the form positive (+ on p, - on l).
fn orthonormal_columns(model: &MatrixLieModel, idx: &[usize], lambda: f64) -> Result<DMatrix<f64>> {
    let k = idx.len();
    let sign = if model.theta_sign[idx[0]] < 0.0 { 1.0 } else { -1.0 };
    let gram = DMatrix::from_fn(k, k, |r, c| sign * lambda * model.killing[(idx[r], idx[c])]);
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Normalization("physical Gram not positive definite".into()))?;
    let linv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Normalization("Gram factor not invertible".into()))?;
    // Columns of basis * L^{-T} are orthonormal for the form.
    let mut out = DMatrix::zeros(model.dim(), k);
    for a in 0..k {
        for r in 0..k {
            out[(idx[r], a)] = linv[(a, r)];
        }
    }
    Ok(out)
}

impl NormalizedModel {
    /// Restricted-root multiplicities (count of roots 1 and 2) read off the
    /// ad(v1) spectrum; errors when the spectrum leaves {0, ±1, ±2} or the
    /// counts disagree with the catalog.
    pub fn root_data(&self) -> Result<(usize, usize)> {
        for &v in &self.ad_spectrum {
            let nearest = [0.0f64, 1.0, -1.0, 2.0, -2.0]
                .iter()
                .fold(f64::INFINITY, |best, &t| best.min((v - t).abs()));
            if nearest > 1e-8 {
                return Err(Error::ModelConsistency(format!(
                    "ad(v1) eigenvalue {v} not in {{0, ±1, ±2}}"
                )));
            }
        }
        let expect = (self.model.spec.mult1 as usize, self.model.spec.mult2 as usize);
        if (self.mult1, self.mult2) != expect {
            return Err(Error::ModelConsistency(format!(
                "root multiplicities ({}, {}) disagree with catalog {:?}",
                self.mult1, self.mult2, expect
            )));
        }
        Ok((self.mult1, self.mult2))
    }

    /// Coordinates of the a-th physical-orthonormal p-basis vector.
    pub fn p_vector(&self, a: usize) -> DVector<f64> {
        self.p_ortho.column(a).into_owned()
    }

    pub fn l_vector(&self, i: usize) -> DVector<f64> {
        self.l_ortho.column(i).into_owned()
    }
}
