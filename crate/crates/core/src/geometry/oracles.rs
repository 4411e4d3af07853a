//! Closed-form background quantities in geodesic polar coordinates and the
//! consistency checks tying the numeric engine to them.

use super::curvature::{curvature, koszul_connection};
use super::frame::FrameSpec;
use super::{RadialGrid, RadialMetric};
use crate::models::ModelSpec;
use crate::{Error, Result};

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// Laplacian of the distance function along a geodesic radius,
/// `mult1 * coth(r) + 2 * mult2 * coth(2r)`.
pub fn delta_d(spec: &ModelSpec, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("delta_d needs r > 0, got {r}")));
    }
    Ok(spec.mult1 as f64 * coth(r) + 2.0 * spec.mult2 as f64 * coth(2.0 * r))
}

/// Volume density of the geodesic sphere per unit direction measure,
/// `sinh(r)^mult1 * sinh(2r)^mult2`; its logarithmic derivative is delta_d.
pub fn sphere_density(spec: &ModelSpec, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("sphere_density needs r > 0, got {r}")));
    }
    Ok(r.sinh().powi(spec.mult1 as i32) * (2.0 * r).sinh().powi(spec.mult2 as i32))
}

/// Sup over interior nodes of ||Ric(g0) + (mult1 + 4 mult2) g0||_F from the
/// numeric engine; the background is r-constant in the frame, so the only
/// error is rounding.
pub fn einstein_residual(spec: &ModelSpec, grid: RadialGrid) -> Result<f64> {
    let frame = FrameSpec::normalized_frame(spec);
    let metric = RadialMetric::background(frame.n, grid);
    let bundle = curvature(&frame, &metric)?;
    let n = frame.n;
    let sum_sq = spec.root_square_sum() as f64;
    let mut worst = 0.0f64;
    for node in grid.interior() {
        let mut frob = 0.0;
        for a in 0..n {
            for b in 0..n {
                let target = if a == b { -sum_sq } else { 0.0 };
                let d = bundle.ricci_at(node, a, b) - target;
                frob += d * d;
            }
        }
        worst = worst.max(frob.sqrt());
    }
    Ok(worst)
}

/// Mean curvature of the invariant hypersurfaces (trace of the shape
/// operator nabla e_0), evaluated on the background; equals tau0.
pub fn horosphere_mean_curvature(spec: &ModelSpec, grid: RadialGrid) -> Result<f64> {
    let frame = FrameSpec::normalized_frame(spec);
    let metric = RadialMetric::background(frame.n, grid);
    let conn = koszul_connection(&frame, &metric)?;
    let node = grid.count / 2;
    Ok((1..frame.n).map(|i| conn.gamma_at(node, i, i, 0)).sum())
}
