//! Connection and curvature of radial frame metrics via the frame Koszul
//! formula. Radial derivatives use the fourth-order stencils from `fd`;
//! everything else is node-local algebra.

use super::fd;
use super::frame::FrameSpec;
use super::{cholesky_slice, spd_inverse, RadialMetric};
use crate::{Error, Result};

/// Connection data of a radial frame metric.
///
/// `gamma` stores the coefficients of `nabla_{e_a} e_b = Gamma^c_{ab} e_c`
/// per node in c-major layout (index `(c n + a) n + b`), so the
/// `Gamma^0`-block is contiguous.
pub struct Connection {
    pub n: usize,
    pub count: usize,
    pub gamma: Vec<f64>,
    /// Inverse metric per node (row-major n^2).
    pub ginv: Vec<f64>,
    /// Radial derivative of the metric per node (row-major n^2).
    pub dg: Vec<f64>,
    /// sqrt(det g) per node.
    pub sqrt_det: Vec<f64>,
}

impl Connection {
    #[inline]
    pub fn gamma_at(&self, node: usize, c: usize, a: usize, b: usize) -> f64 {
        let n = self.n;
        self.gamma[node * n * n * n + (c * n + a) * n + b]
    }

    #[inline]
    pub fn ginv_at(&self, node: usize, a: usize, b: usize) -> f64 {
        self.ginv[(node * self.n + a) * self.n + b]
    }
}

/// Koszul-formula connection of a radial frame metric. Only e_0-derivatives
/// of the components are nonzero; they are taken with 4th-order stencils.
pub fn koszul_connection(frame: &FrameSpec, metric: &RadialMetric) -> Result<Connection> {
    let n = frame.n;
    assert_eq!(n, metric.n, "frame and metric dimension");
    let count = metric.grid.count;
    let nn = n * n;
    let dg = fd::d1_new(&metric.data, count, nn, metric.grid.dr);

    let mut gamma = vec![0.0; count * n * nn];
    let mut ginv = vec![0.0; count * nn];
    let mut sqrt_det = vec![0.0; count];
    let mut lower = vec![0.0; n * nn];
    let mut bg = vec![0.0; n * nn];

    for node in 0..count {
        let g = metric.at(node);
        let l = cholesky_slice(g, n).ok_or(Error::SingularMetric {
            node,
            r: metric.grid.r(node),
        })?;
        let inv = spd_inverse(&l, n);
        ginv[node * nn..(node + 1) * nn].copy_from_slice(&inv);
        sqrt_det[node] = (0..n).map(|i| l[i * n + i]).product();

        // B[a][b][c] = sum_d c(a,b,d) g_{dc}, accumulated sparsely.
        bg.iter_mut().for_each(|x| *x = 0.0);
        for &(a, b, d, val) in frame.nonzero_brackets() {
            for c in 0..n {
                bg[(a * n + b) * n + c] += val * g[d * n + c];
            }
        }

        let dgn = &dg[node * nn..(node + 1) * nn];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut v = bg[(a * n + b) * n + c] - bg[(b * n + c) * n + a]
                        + bg[(c * n + a) * n + b];
                    if a == 0 {
                        v += dgn[b * n + c];
                    }
                    if b == 0 {
                        v += dgn[a * n + c];
                    }
                    if c == 0 {
                        v -= dgn[a * n + b];
                    }
                    lower[(a * n + b) * n + c] = 0.5 * v;
                }
            }
        }
        // Raise the last index: Gamma^c_{ab} = ginv^{ce} lower_{ab,e}.
        let base = node * n * nn;
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut s = 0.0;
                    for e in 0..n {
                        s += inv[c * n + e] * lower[(a * n + b) * n + e];
                    }
                    gamma[base + (c * n + a) * n + b] = s;
                }
            }
        }
    }
    Ok(Connection { n, count, gamma, ginv, dg, sqrt_det })
}

/// Connection of the background metric (identity at every node); its
/// coefficients are r-independent.
pub fn background_connection(frame: &FrameSpec, grid: super::RadialGrid) -> Connection {
    let metric = RadialMetric::background(frame.n, grid);
    koszul_connection(frame, &metric).expect("background metric is positive definite")
}

/// Full curvature data of a radial frame metric.
pub struct CurvatureBundle {
    pub n: usize,
    pub count: usize,
    pub conn: Connection,
    /// R_{abcd} = g(R(e_a, e_b) e_c, e_d), node-major n^4.
    pub riemann: Vec<f64>,
    /// Ricci tensor per node (row-major n^2).
    pub ricci: Vec<f64>,
    /// Scalar curvature per node.
    pub scalar: Vec<f64>,
}

impl CurvatureBundle {
    #[inline]
    pub fn riemann_at(&self, node: usize, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.n;
        self.riemann[node * n * n * n * n + ((a * n + b) * n + c) * n + d]
    }

    #[inline]
    pub fn ricci_at(&self, node: usize, a: usize, b: usize) -> f64 {
        self.ricci[(node * self.n + a) * self.n + b]
    }
}

/// Assembles the full Riemann tensor, Ricci tensor and scalar curvature.
///
/// R(e_a, e_b) e_c = nabla_a nabla_b e_c - nabla_b nabla_a e_c
///                   - nabla_{[e_a, e_b]} e_c
/// in frame components, with the radial derivative of Gamma supplied by
/// finite differences.
pub fn curvature(frame: &FrameSpec, metric: &RadialMetric) -> Result<CurvatureBundle> {
    let conn = koszul_connection(frame, metric)?;
    let n = frame.n;
    let count = conn.count;
    let nn = n * n;
    let n3 = n * nn;
    let dgamma = fd::d1_new(&conn.gamma, count, n3, metric.grid.dr);

    let mut riemann = vec![0.0; count * nn * nn];
    let mut ricci = vec![0.0; count * nn];
    let mut scalar = vec![0.0; count];

    for node in 0..count {
        let ga = &conn.gamma[node * n3..(node + 1) * n3];
        let dga = &dgamma[node * n3..(node + 1) * n3];
        let g = metric.at(node);
        let gi = &conn.ginv[node * nn..(node + 1) * nn];
        let gam = |c: usize, a: usize, b: usize| ga[(c * n + a) * n + b];
        let dgam = |c: usize, a: usize, b: usize| dga[(c * n + a) * n + b];

        let rm = &mut riemann[node * nn * nn..(node + 1) * nn * nn];
        // Mixed components R^d_{abc}, reused for the lowering pass.
        let mut mixed = vec![0.0; nn * nn];
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                for c in 0..n {
                    for d in 0..n {
                        let mut v = 0.0;
                        if a == 0 {
                            v += dgam(d, b, c);
                        }
                        if b == 0 {
                            v -= dgam(d, a, c);
                        }
                        for e in 0..n {
                            v += gam(e, b, c) * gam(d, a, e) - gam(e, a, c) * gam(d, b, e);
                        }
                        mixed[((a * n + b) * n + c) * n + d] = v;
                    }
                }
            }
        }
        for &(a, b, e, val) in frame.nonzero_brackets() {
            for c in 0..n {
                for d in 0..n {
                    mixed[((a * n + b) * n + c) * n + d] -= val * gam(d, e, c);
                }
            }
        }
        // Lower the last index and contract for Ricci.
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut v = 0.0;
                        for e in 0..n {
                            v += mixed[((a * n + b) * n + c) * n + e] * g[e * n + d];
                        }
                        rm[((a * n + b) * n + c) * n + d] = v;
                    }
                }
            }
        }
        let ric = &mut ricci[node * nn..(node + 1) * nn];
        for b in 0..n {
            for c in 0..n {
                let mut v = 0.0;
                for a in 0..n {
                    v += mixed[((a * n + b) * n + c) * n + a];
                }
                ric[b * n + c] = v;
            }
        }
        // Symmetrize; the assembly is symmetric up to finite-difference
        // consistency only.
        for b in 0..n {
            for c in (b + 1)..n {
                let s = 0.5 * (ric[b * n + c] + ric[c * n + b]);
                ric[b * n + c] = s;
                ric[c * n + b] = s;
            }
        }
        let mut sc = 0.0;
        for b in 0..n {
            for c in 0..n {
                sc += gi[b * n + c] * ric[b * n + c];
            }
        }
        scalar[node] = sc;
    }
    Ok(CurvatureBundle { n, count, conn, riemann, ricci, scalar })
}

/// Ricci tensor and scalar curvature only; avoids assembling the full
/// Riemann tensor. This is the hot path of the flow solver.
pub struct RicciField {
    pub n: usize,
    pub count: usize,
    pub conn: Connection,
    pub ricci: Vec<f64>,
    pub scalar: Vec<f64>,
}

pub fn ricci_scalar(frame: &FrameSpec, metric: &RadialMetric) -> Result<RicciField> {
    let conn = koszul_connection(frame, metric)?;
    let n = frame.n;
    let count = conn.count;
    let nn = n * n;
    let n3 = n * nn;
    let dr = metric.grid.dr;

    // Fields that need radial differentiation: the Gamma^0 block and the
    // contracted trace T_e = Gamma^a_{ae}.
    let mut gamma0 = vec![0.0; count * nn];
    let mut trace = vec![0.0; count * n];
    for node in 0..count {
        let ga = &conn.gamma[node * n3..(node + 1) * n3];
        gamma0[node * nn..(node + 1) * nn].copy_from_slice(&ga[0..nn]);
        for e in 0..n {
            let mut t = 0.0;
            for a in 0..n {
                t += ga[(a * n + a) * n + e];
            }
            trace[node * n + e] = t;
        }
    }
    let dgamma0 = fd::d1_new(&gamma0, count, nn, dr);
    let dtrace = fd::d1_new(&trace, count, n, dr);

    let mut ricci = vec![0.0; count * nn];
    let mut scalar = vec![0.0; count];
    for node in 0..count {
        let ga = &conn.gamma[node * n3..(node + 1) * n3];
        let gam = |c: usize, a: usize, b: usize| ga[(c * n + a) * n + b];
        let t = &trace[node * n..(node + 1) * n];
        let gi = &conn.ginv[node * nn..(node + 1) * nn];
        let ric = &mut ricci[node * nn..(node + 1) * nn];

        for b in 0..n {
            for c in 0..n {
                let mut v = dgamma0[node * nn + b * n + c];
                if b == 0 {
                    v -= dtrace[node * n + c];
                }
                for e in 0..n {
                    v += gam(e, b, c) * t[e];
                }
                for a in 0..n {
                    for e in 0..n {
                        v -= gam(e, a, c) * gam(a, b, e);
                    }
                }
                ric[b * n + c] = v;
            }
        }
        for &(a, b, e, val) in frame.nonzero_brackets() {
            for c in 0..n {
                ric[b * n + c] -= val * gam(a, e, c);
            }
        }
        for b in 0..n {
            for c in (b + 1)..n {
                let s = 0.5 * (ric[b * n + c] + ric[c * n + b]);
                ric[b * n + c] = s;
                ric[c * n + b] = s;
            }
        }
        let mut sc = 0.0;
        for b in 0..n {
            for c in 0..n {
                sc += gi[b * n + c] * ric[b * n + c];
            }
        }
        scalar[node] = sc;
    }
    Ok(RicciField { n, count, conn, ricci, scalar })
}
