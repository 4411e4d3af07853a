//! Invariant frames in the horospherical gauge. The frame consists of the
//! radial direction e_0 and weighted left-invariant fields e_1..e_{n-1} of
//! the nilpotent part; all structure constants are r-independent and the
//! background metric is the identity.

use crate::liealg::htype_algebra;
use crate::models::ModelSpec;

/// Bracket table for the gauge frame:
///   [e_0, e_i] = -a_i e_i,
///   [e_u, e_v] = 2 sum_z <J_z u, v> e_z   (u, v in the 1-root block),
/// with all other brackets zero. The factor 2 on the nilpotent bracket is
/// what makes the background with weights (1, 2) an Einstein metric.
#[derive(Debug, Clone)]
pub struct FrameSpec {
    pub n: usize,
    /// Root value per frame index; roots[0] = 0 for the radial direction.
    pub roots: Vec<f64>,
    /// Dense structure constants, c[(a n + b) n + d] = coefficient of e_d
    /// in [e_a, e_b].
    c: Vec<f64>,
    /// Nonzero entries as (a, b, d, value) for sparse accumulation.
    nonzero: Vec<(usize, usize, usize, f64)>,
}

impl FrameSpec {
    /// Frame of a catalog entry.
    pub fn normalized_frame(spec: &ModelSpec) -> FrameSpec {
        let mult1 = spec.mult1 as usize;
        let mult2 = spec.mult2 as usize;
        let n = 1 + mult1 + mult2;
        let mut roots = vec![0.0; n];
        for i in 0..mult1 {
            roots[1 + i] = 1.0;
        }
        for i in 0..mult2 {
            roots[1 + mult1 + i] = 2.0;
        }
        let mut frame = FrameSpec { n, roots, c: vec![0.0; n * n * n], nonzero: Vec::new() };
        for i in 1..n {
            frame.add(0, i, i, -frame.roots[i]);
            frame.add(i, 0, i, frame.roots[i]);
        }
        let algebra = htype_algebra(spec);
        for (alpha, j) in algebra.j_maps.iter().enumerate() {
            let z = 1 + mult1 + alpha;
            for p in 0..mult1 {
                for q in 0..mult1 {
                    // <J_alpha e_p, e_q> = J[(q, p)].
                    let val = 2.0 * j[(q, p)];
                    if val != 0.0 {
                        frame.add(1 + p, 1 + q, z, val);
                    }
                }
            }
        }
        frame
    }

    /// Frame with all brackets zero (flat product R x R^{n-1}).
    pub fn flat(n: usize) -> FrameSpec {
        FrameSpec { n, roots: vec![0.0; n], c: vec![0.0; n * n * n], nonzero: Vec::new() }
    }

    fn add(&mut self, a: usize, b: usize, d: usize, value: f64) {
        if value == 0.0 {
            return;
        }
        let n = self.n;
        self.c[(a * n + b) * n + d] += value;
        self.nonzero.push((a, b, d, value));
    }

    #[inline]
    pub fn c(&self, a: usize, b: usize, d: usize) -> f64 {
        self.c[(a * self.n + b) * self.n + d]
    }

    #[inline]
    pub fn nonzero_brackets(&self) -> &[(usize, usize, usize, f64)] {
        &self.nonzero
    }

    /// Largest Jacobi-identity residual over all frame triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for e in 0..n {
                        let mut s = 0.0;
                        for d in 0..n {
                            s += self.c(a, b, d) * self.c(d, cc, e);
                            s += self.c(b, cc, d) * self.c(d, a, e);
                            s += self.c(cc, a, d) * self.c(d, b, e);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}
