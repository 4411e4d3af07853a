//! Cohomogeneity-one curvature engine in the horospherical gauge: frames,
//! radial grids, frame-component metric fields and the Koszul-formula
//! connection/curvature assembly, plus closed-form background oracles.

mod curvature;
pub mod fd;
mod frame;
mod oracles;

pub use curvature::{
    background_connection, curvature, koszul_connection, ricci_scalar, Connection,
    CurvatureBundle, RicciField,
};
pub use frame::FrameSpec;
pub use oracles::{delta_d, einstein_residual, horosphere_mean_curvature, sphere_density};

use crate::{Error, Result};

/// Uniform radial grid, inclusive of both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub dr: f64,
    pub count: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, dr: f64) -> Result<RadialGrid> {
        if !(r_min < r_max) {
            return Err(Error::Domain(format!("grid needs r_min < r_max, got [{r_min}, {r_max}]")));
        }
        if !(dr > 0.0) {
            return Err(Error::Domain(format!("grid step must be positive, got {dr}")));
        }
        let steps = ((r_max - r_min) / dr).round();
        if ((r_max - r_min) - steps * dr).abs() > 1e-9 * dr {
            return Err(Error::Domain(format!(
                "grid step {dr} does not evenly divide [{r_min}, {r_max}]"
            )));
        }
        let count = steps as usize + 1;
        // The one-sided stencils span five nodes from each end.
        if count < 9 {
            return Err(Error::Domain(format!("grid needs at least 9 nodes, got {count}")));
        }
        Ok(RadialGrid { r_min, r_max, dr, count })
    }

    pub fn r(&self, node: usize) -> f64 {
        self.r_min + node as f64 * self.dr
    }

    /// Nodes unaffected by the one-sided boundary stencils.
    pub fn interior(&self) -> std::ops::Range<usize> {
        2..self.count - 2
    }
}

/// Field of symmetric n x n frame-component matrices over a radial grid.
/// The background metric is the identity at every node.
#[derive(Debug, Clone)]
pub struct RadialMetric {
    pub grid: RadialGrid,
    pub n: usize,
    /// Node-major, row-major n^2 entries per node.
    pub data: Vec<f64>,
}

impl RadialMetric {
    pub fn background(n: usize, grid: RadialGrid) -> RadialMetric {
        let mut data = vec![0.0; grid.count * n * n];
        for node in 0..grid.count {
            for a in 0..n {
                data[(node * n + a) * n + a] = 1.0;
            }
        }
        RadialMetric { grid, n, data }
    }

    #[inline]
    pub fn at(&self, node: usize) -> &[f64] {
        &self.data[node * self.n * self.n..(node + 1) * self.n * self.n]
    }

    #[inline]
    pub fn at_mut(&mut self, node: usize) -> &mut [f64] {
        let nn = self.n * self.n;
        &mut self.data[node * nn..(node + 1) * nn]
    }

    #[inline]
    pub fn get(&self, node: usize, a: usize, b: usize) -> f64 {
        self.data[(node * self.n + a) * self.n + b]
    }

    pub fn set(&mut self, node: usize, a: usize, b: usize, value: f64) {
        let n = self.n;
        self.data[(node * n + a) * n + b] = value;
        self.data[(node * n + b) * n + a] = value;
    }

    /// Frobenius norm of (g - identity) at a node.
    pub fn deviation_norm(&self, node: usize) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                let d = self.get(node, a, b) - if a == b { 1.0 } else { 0.0 };
                s += d * d;
            }
        }
        s.sqrt()
    }

    /// Largest node deviation from the background.
    pub fn sup_deviation(&self) -> f64 {
        (0..self.grid.count).map(|i| self.deviation_norm(i)).fold(0.0, f64::max)
    }
}

/// Cholesky factorization of a dense symmetric matrix given as a row-major
/// slice; returns the lower factor or None when a pivot fails.
pub(crate) fn cholesky_slice(g: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Inverse of a symmetric positive definite matrix from its Cholesky factor.
pub(crate) fn spd_inverse(l: &[f64], n: usize) -> Vec<f64> {
    // Solve L L^T X = I column by column.
    let mut inv = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for c in 0..n {
        for i in 0..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i * n + k] * col[k];
            }
            col[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * inv[k * n + c];
            }
            inv[i * n + c] = s / l[i * n + i];
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(-4.0, 4.0, 1.0 / 32.0).is_ok());
        assert!(RadialGrid::new(4.0, -4.0, 0.1).is_err());
        assert!(RadialGrid::new(-1.0, 1.0, 0.0).is_err());
        assert!(RadialGrid::new(0.0, 1.0, 0.3).is_err());
        assert!(RadialGrid::new(0.0, 0.5, 0.125).is_err(), "too few nodes");
        let g = RadialGrid::new(-4.0, 4.0, 1.0 / 32.0).unwrap();
        assert_eq!(g.count, 257);
        assert_eq!(g.r(0), -4.0);
        assert!((g.r(g.count - 1) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn background_is_identity() {
        let grid = RadialGrid::new(-2.0, 2.0, 0.25).unwrap();
        let g = RadialMetric::background(4, grid);
        for node in 0..grid.count {
            for a in 0..4 {
                for b in 0..4 {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert_eq!(g.get(node, a, b), expect);
                }
            }
            assert_eq!(g.deviation_norm(node), 0.0);
        }
    }

    #[test]
    fn cholesky_inverse_roundtrip() {
        let g = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let l = cholesky_slice(&g, 3).unwrap();
        let inv = spd_inverse(&l, 3);
        // g * inv = I.
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += g[i * 3 + k] * inv[k * 3 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-12);
            }
        }
        // Indefinite matrix has no factor.
        let bad = [1.0, 2.0, 2.0, 1.0];
        assert!(cholesky_slice(&bad, 2).is_none());
    }
}
