//! Relative volume, the volume-derivative identity, integrability of the
//! background density, exponential decay-rate fits and the strict-stability
//! Rayleigh quotient.
//!
//! All integrals are per unit Haar measure of the invariant slice; the
//! background volume weight is exp(tau0 * r) dr on the window.

use crate::flow::{FlowEngine, MonitorRow, TimeSeries};
use crate::geometry::{
    background_connection, curvature, fd, FrameSpec, RadialGrid, RadialMetric,
};
use crate::models::ModelSpec;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Composite quadrature weights on a uniform grid: Simpson's rule, closed
/// with a 3/8 block when the interval count is odd.
pub fn simpson_weights(count: usize, dr: f64) -> Vec<f64> {
    assert!(count >= 5);
    let mut w = vec![0.0; count];
    let intervals = count - 1;
    let simpson_end = if intervals % 2 == 0 { count - 1 } else { count - 4 };
    // Simpson over nodes 0..=simpson_end.
    let third = dr / 3.0;
    w[0] += third;
    w[simpson_end] += third;
    for i in 1..simpson_end {
        w[i] += if i % 2 == 1 { 4.0 * third } else { 2.0 * third };
    }
    if intervals % 2 != 0 {
        // 3/8 rule over the last three intervals.
        let eighth = 3.0 * dr / 8.0;
        w[count - 4] += eighth;
        w[count - 3] += 3.0 * eighth;
        w[count - 2] += 3.0 * eighth;
        w[count - 1] += eighth;
    }
    w
}

fn sqrt_det(metric: &RadialMetric, node: usize) -> f64 {
    match crate::geometry::cholesky_slice(metric.at(node), metric.n) {
        Some(l) => (0..metric.n).map(|i| l[i * metric.n + i]).product(),
        None => f64::NAN,
    }
}

/// Relative volume of a frame metric against the background,
/// integral of (sqrt(det g) - 1) exp(tau0 r) dr over the window.
pub fn relative_volume(metric: &RadialMetric, spec: &ModelSpec) -> f64 {
    let grid = metric.grid;
    let w = simpson_weights(grid.count, grid.dr);
    let tau0 = spec.tau0_f();
    (0..grid.count)
        .map(|i| w[i] * (sqrt_det(metric, i) - 1.0) * (tau0 * grid.r(i)).exp())
        .sum()
}

/// Integral of the background density exp(tau0 r) over the window.
pub fn background_density_integral(spec: &ModelSpec, grid: RadialGrid) -> f64 {
    let w = simpson_weights(grid.count, grid.dr);
    (0..grid.count).map(|i| w[i] * (spec.tau0_f() * grid.r(i)).exp()).sum()
}

/// Both sides of the volume evolution identity
///   dV/dt = -∫ (R - R0) dmu_g + boundary flux of the DeTurck field,
/// with the left side obtained by inserting the flow right-hand side into
/// the determinant derivative.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub flux: f64,
    pub residual: f64,
}

pub fn volume_derivative_identity(spec: &ModelSpec, metric: &RadialMetric) -> Result<IdentityReport> {
    let engine = FlowEngine::new(spec);
    let bundle = engine.nrdf_rhs(metric)?;
    let n = bundle.n;
    let nn = n * n;
    let grid = metric.grid;
    // Integrated over the evolving sub-window: the two Dirichlet nodes are
    // constraints of the flow, not dynamics, and do not move V.
    let w = simpson_weights(grid.count - 2, grid.dr);
    let tau0 = spec.tau0_f();

    let mut lhs = 0.0;
    let mut bulk = 0.0;
    for node in 1..grid.count - 1 {
        let density = (tau0 * grid.r(node)).exp();
        let gi = &bundle.ginv[node * nn..(node + 1) * nn];
        let rh = &bundle.rhs[node * nn..(node + 1) * nn];
        let mut tr = 0.0;
        for a in 0..n {
            for b in 0..n {
                tr += gi[a * n + b] * rh[b * n + a];
            }
        }
        lhs += w[node - 1] * 0.5 * bundle.sqrt_det[node] * tr * density;
        bulk -= w[node - 1] * (bundle.scalar[node] - spec.r0_f()) * bundle.sqrt_det[node] * density;
    }
    let flux_at =
        |node: usize| bundle.w_sharp[node * n] * bundle.sqrt_det[node] * (tau0 * grid.r(node)).exp();
    let flux = flux_at(grid.count - 2) - flux_at(1);
    let rhs = bulk + flux;
    Ok(IdentityReport { lhs, rhs, flux, residual: (lhs - rhs).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrability {
    Finite,
    Divergent,
}

/// Analytic integrability of exp(-tau d) against the background volume:
/// finite exactly when tau exceeds tau0.
pub fn integrability_check(spec: &ModelSpec, tau: f64) -> Result<Integrability> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("integrability needs tau > 0, got {tau}")));
    }
    Ok(if tau > spec.tau0_f() { Integrability::Finite } else { Integrability::Divergent })
}

/// Numerical cross-check by quadrature of exp((tau0 - tau) r) on doubling
/// windows, declared finite on Cauchy saturation at 1e-10.
pub fn integrability_probe(spec: &ModelSpec, tau: f64) -> Result<Integrability> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("integrability needs tau > 0, got {tau}")));
    }
    let rate = spec.tau0_f() - tau;
    let dr = 1.0f64 / 16.0;
    let mut previous = 0.0f64;
    let mut r_max = 8.0f64;
    while r_max <= 4096.0 {
        let count = (r_max / dr).round() as usize + 1;
        let w = simpson_weights(count, dr);
        let integral: f64 = (0..count).map(|i| w[i] * (rate * (i as f64 * dr)).exp()).sum();
        if !integral.is_finite() {
            break; // monotone growth past the float range
        }
        if (integral - previous).abs() <= 1e-10 * integral.abs().max(1.0) {
            return Ok(Integrability::Finite);
        }
        previous = integral;
        r_max *= 2.0;
    }
    Ok(Integrability::Divergent)
}

/// Exponential rate fitted to the tail of a monitor column.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Fitted lambda in value ~ C exp(-lambda t).
    pub rate: f64,
    pub intercept: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorColumn {
    SupH,
    SupWeightedH,
    SupGradH,
    SupWeightedW,
    Volume,
}

impl MonitorColumn {
    fn extract(self, row: &MonitorRow) -> f64 {
        match self {
            MonitorColumn::SupH => row.sup_h,
            MonitorColumn::SupWeightedH => row.sup_weighted_h,
            MonitorColumn::SupGradH => row.sup_grad_h,
            MonitorColumn::SupWeightedW => row.sup_weighted_w,
            MonitorColumn::Volume => row.volume,
        }
    }
}

/// Least-squares log-linear fit over the second half of a series.
pub fn decay_fit(series: &TimeSeries, column: MonitorColumn) -> Result<DecayFit> {
    let samples: Vec<(f64, f64)> =
        series.rows.iter().map(|r| (r.t, column.extract(r))).collect();
    decay_fit_samples(&samples)
}

pub fn decay_fit_samples(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.is_empty() {
        return Err(Error::FitDomain { needed: 10, got: 0 });
    }
    let t_lo = samples[0].0;
    let t_hi = samples[samples.len() - 1].0;
    let cut = 0.5 * (t_lo + t_hi);
    let tail: Vec<(f64, f64)> = samples.iter().copied().filter(|&(t, _)| t >= cut).collect();
    if tail.len() < 10 {
        return Err(Error::FitDomain { needed: 10, got: tail.len() });
    }
    if tail.iter().any(|&(_, v)| !(v > 0.0)) {
        let got = tail.iter().filter(|&&(_, v)| v > 0.0).count();
        return Err(Error::FitDomain { needed: tail.len(), got });
    }
    let n = tail.len() as f64;
    let (mut st, mut sy) = (0.0, 0.0);
    for &(t, v) in &tail {
        st += t;
        sy += v.ln();
    }
    let (tbar, ybar) = (st / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(t, v) in &tail {
        num += (t - tbar) * (v.ln() - ybar);
        den += (t - tbar) * (t - tbar);
    }
    let slope = num / den;
    let rate = -slope;
    let ln_c = ybar - slope * tbar;
    let mut rss = 0.0;
    for &(t, v) in &tail {
        let e = v.ln() - (ln_c + slope * t);
        rss += e * e;
    }
    Ok(DecayFit {
        rate,
        intercept: ln_c.exp(),
        residual: (rss / n).sqrt(),
        window: (tail[0].0, t_hi),
    })
}

/// Applies the stability operator L u = Delta u + 2 Rm(u) of the background
/// to a radial symmetric 2-tensor field in frame components.
pub fn lichnerowicz_apply(spec: &ModelSpec, u: &RadialMetric) -> Vec<f64> {
    let frame = FrameSpec::normalized_frame(spec);
    let n = frame.n;
    let nn = n * n;
    let count = u.grid.count;
    let conn = background_connection(&frame, u.grid);
    let bg = &conn.gamma[..n * nn];
    let gam = |c: usize, a: usize, b: usize| bg[(c * n + a) * n + b];

    // Curvature-operator matrix Rm[(ab),(cd)] = -R_std(e_a, e_c, e_b, e_d)
    // of the background, r-independent.
    let background = RadialMetric::background(n, u.grid);
    let bundle = curvature(&frame, &background).expect("background curvature");
    let mid = count / 2;
    let mut rm = vec![0.0; nn * nn];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    rm[(a * n + b) * nn + c * n + d] = -bundle.riemann_at(mid, a, c, b, d);
                }
            }
        }
    }

    let du = fd::d1_new(&u.data, count, nn, u.grid.dr);
    // First covariant derivative D1[c; a b] per node.
    let mut d1_field = vec![0.0; count * n * nn];
    for node in 0..count {
        let uu = u.at(node);
        let duu = &du[node * nn..(node + 1) * nn];
        let out = &mut d1_field[node * n * nn..(node + 1) * n * nn];
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let mut v = if c == 0 { duu[a * n + b] } else { 0.0 };
                    for d in 0..n {
                        v -= gam(d, c, a) * uu[d * n + b] + gam(d, c, b) * uu[a * n + d];
                    }
                    out[(c * n + a) * n + b] = v;
                }
            }
        }
    }
    // Radial derivative of the c = 0 slice.
    let mut d1_radial = vec![0.0; count * nn];
    for node in 0..count {
        d1_radial[node * nn..(node + 1) * nn]
            .copy_from_slice(&d1_field[node * n * nn..node * n * nn + nn]);
    }
    let dd1 = fd::d1_new(&d1_radial, count, nn, u.grid.dr);

    let mut out = vec![0.0; count * nn];
    for node in 0..count {
        let d1n = &d1_field[node * n * nn..(node + 1) * n * nn];
        let uu = u.at(node);
        let lap = &mut out[node * nn..(node + 1) * nn];
        for a in 0..n {
            for b in 0..n {
                let mut v = dd1[node * nn + a * n + b];
                for c in 0..n {
                    for d in 0..n {
                        v -= gam(d, c, c) * d1n[(d * n + a) * n + b];
                        v -= gam(d, c, a) * d1n[(c * n + d) * n + b];
                        v -= gam(d, c, b) * d1n[(c * n + a) * n + d];
                    }
                }
                lap[a * n + b] = v;
            }
        }
        // + 2 Rm(u).
        for a in 0..n {
            for b in 0..n {
                let mut v = 0.0;
                for c in 0..n {
                    for d in 0..n {
                        v += rm[(a * n + b) * nn + c * n + d] * uu[c * n + d];
                    }
                }
                lap[a * n + b] += 2.0 * v;
            }
        }
    }
    out
}

/// Rayleigh quotient ∫<-L u, u> dmu0 / ∫|u|^2 dmu0 of a compactly
/// supported radial test tensor; strict stability makes it positive.
pub fn rayleigh_quotient(spec: &ModelSpec, u: &RadialMetric) -> Result<f64> {
    let lu = lichnerowicz_apply(spec, u);
    let n = u.n;
    let nn = n * n;
    let grid = u.grid;
    let w = simpson_weights(grid.count, grid.dr);
    let tau0 = spec.tau0_f();
    let mut num = 0.0;
    let mut den = 0.0;
    for node in 0..grid.count {
        let density = w[node] * (tau0 * grid.r(node)).exp();
        let uu = u.at(node);
        let lun = &lu[node * nn..(node + 1) * nn];
        let mut dot = 0.0;
        let mut norm = 0.0;
        for k in 0..nn {
            dot += lun[k] * uu[k];
            norm += uu[k] * uu[k];
        }
        num -= density * dot;
        den += density * norm;
    }
    if den <= 0.0 {
        return Err(Error::Domain("rayleigh quotient of the zero tensor".into()));
    }
    Ok(num / den)
}

/// Description of one random test tensor and its quotient.
#[derive(Debug, Clone, Copy)]
pub struct StabilitySample {
    pub center: f64,
    pub width: f64,
    pub quotient: f64,
}

/// Upper bound on the stability constant lambda0 from a batch of random
/// compactly supported radial test tensors.
#[derive(Debug, Clone)]
pub struct StabilityEstimate {
    pub lambda0_estimate: f64,
    pub batch: usize,
    pub samples: Vec<StabilitySample>,
}

/// Runs a seeded batch of Rayleigh quotients with compact-bump envelopes
/// and random symmetric component patterns.
pub fn stability_batch(
    spec: &ModelSpec,
    grid: RadialGrid,
    count: usize,
    seed: u64,
) -> Result<StabilityEstimate> {
    let frame = FrameSpec::normalized_frame(spec);
    let n = frame.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    let mut lambda0 = f64::INFINITY;
    for _ in 0..count {
        let center: f64 = rng.gen_range(-1.5..1.5);
        let width: f64 = rng.gen_range(0.6..1.4);
        let mut pattern = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                pattern[a * n + b] = v;
                pattern[b * n + a] = v;
            }
        }
        let mut u = RadialMetric::background(n, grid);
        u.data.iter_mut().for_each(|x| *x = 0.0);
        for node in 0..grid.count {
            let s = (grid.r(node) - center) / width;
            let env = if s.abs() < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
            if env != 0.0 {
                let slice = u.at_mut(node);
                for k in 0..n * n {
                    slice[k] = env * pattern[k];
                }
            }
        }
        let quotient = rayleigh_quotient(spec, &u)?;
        lambda0 = lambda0.min(quotient);
        samples.push(StabilitySample { center, width, quotient });
    }
    Ok(StabilityEstimate { lambda0_estimate: lambda0, batch: count, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{initial_data, FlowConfig, Perturbation, ProfileShape, TargetBlock};
    use crate::models::{build_model, Family};
    use approx::assert_abs_diff_eq;

    fn grid() -> RadialGrid {
        RadialGrid::new(-4.0, 4.0, 1.0 / 32.0).unwrap()
    }

    #[test]
    fn simpson_exactness() {
        // Exact on cubics for both parities of the interval count.
        for count in [17usize, 18] {
            let dr = 0.1;
            let w = simpson_weights(count, dr);
            let integral: f64 = (0..count)
                .map(|i| {
                    let x = i as f64 * dr;
                    w[i] * (1.0 + x - x * x + 2.0 * x * x * x)
                })
                .sum();
            let b = (count - 1) as f64 * dr;
            let exact = b + b * b / 2.0 - b * b * b / 3.0 + b * b * b * b / 2.0;
            assert_abs_diff_eq!(integral, exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn relative_volume_background_and_conformal() {
        let spec = build_model(Family::Real, 4).unwrap();
        let g0 = RadialMetric::background(4, grid());
        assert_eq!(relative_volume(&g0, &spec), 0.0);

        // g = (1 + eps) g0 has V = ((1+eps)^{n/2} - 1) * integral of density.
        let eps = 1e-2;
        let mut g = g0.clone();
        for node in 0..g.grid.count {
            for a in 0..4 {
                g.set(node, a, a, 1.0 + eps);
            }
        }
        let expect = ((1.0f64 + eps).powf(2.0) - 1.0) * background_density_integral(&spec, grid());
        assert_abs_diff_eq!(relative_volume(&g, &spec), expect, epsilon = 1e-10 * expect.abs());
    }

    #[test]
    fn relative_volume_matches_refined_grid_oracle() {
        // Brute-force quadrature at double resolution agrees to O(dr^4).
        let spec = build_model(Family::Real, 4).unwrap();
        let bump = |r: f64| {
            let s: f64 = r / 1.5;
            if s.abs() < 1.0 { 1e-2 * (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 }
        };
        let build = |dr: f64| {
            let grid = RadialGrid::new(-4.0, 4.0, dr).unwrap();
            let mut g = RadialMetric::background(4, grid);
            for node in 0..grid.count {
                let v = 1.0 + bump(grid.r(node));
                for a in 1..4 {
                    g.set(node, a, a, v);
                }
            }
            g
        };
        let coarse = relative_volume(&build(1.0 / 32.0), &spec);
        let fine = relative_volume(&build(1.0 / 64.0), &spec);
        let quarter = relative_volume(&build(1.0 / 128.0), &spec);
        let diff1 = (coarse - fine).abs();
        let diff2 = (fine - quarter).abs();
        assert!(diff1 <= 1e-6, "difference {diff1:.3e}");
        // Quadrature-order shrinkage under halving.
        assert!(diff1 / diff2 >= 8.0, "ratio {}", diff1 / diff2);
    }

    #[test]
    fn volume_first_variation_is_half_trace() {
        // |V(g0 + eps h) - eps/2 ∫ tr(h) dmu0| = O(eps^2).
        let spec = build_model(Family::Real, 4).unwrap();
        let g = grid();
        let w = simpson_weights(g.count, g.dr);
        let h_profile = |r: f64| (-(r * r)).exp();
        let mut trace_integral = 0.0;
        for node in 0..g.count {
            // h = profile * diag(0, 1, 2, 0.5).
            trace_integral += w[node] * 3.5 * h_profile(g.r(node)) * (spec.tau0_f() * g.r(node)).exp();
        }
        let v_of = |eps: f64| {
            let mut m = RadialMetric::background(4, g);
            for node in 0..g.count {
                let p = eps * h_profile(g.r(node));
                m.set(node, 1, 1, 1.0 + p);
                m.set(node, 2, 2, 1.0 + 2.0 * p);
                m.set(node, 3, 3, 1.0 + 0.5 * p);
            }
            relative_volume(&m, &spec)
        };
        let e1 = (v_of(1e-3) - 1e-3 * 0.5 * trace_integral).abs();
        let e2 = (v_of(5e-4) - 5e-4 * 0.5 * trace_integral).abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "quadratic remainder, ratio {ratio}");
    }

    #[test]
    fn identity_zero_on_background() {
        let spec = build_model(Family::Complex, 2).unwrap();
        let g0 = RadialMetric::background(4, grid());
        let report = volume_derivative_identity(&spec, &g0).unwrap();
        assert!(report.lhs.abs() <= 1e-10);
        assert!(report.rhs.abs() <= 1e-10);
    }

    #[test]
    fn identity_residual_small_on_bump() {
        let spec = build_model(Family::Real, 4).unwrap();
        let config = FlowConfig {
            spec,
            grid: RadialGrid::new(-4.0, 4.0, 1.0 / 128.0).unwrap(),
            t_end: 1.0,
            cfl: 0.2,
            perturbation: Perturbation {
                shape: ProfileShape::CompactBump,
                amplitude: 1e-3,
                center: 0.0,
                width: 2.0,
                block: TargetBlock::VBlock,
            },
            monitor_stride: 8,
            tau: 1.0,
            delta: 3.5,
        };
        let (metric, _) = initial_data(&config).unwrap();
        let report = volume_derivative_identity(&spec, &metric).unwrap();
        assert!(
            report.residual <= 1e-8 * (1.0 + report.lhs.abs()),
            "residual {:.3e} lhs {:.3e}",
            report.residual,
            report.lhs
        );
        // Compactly supported data far from the boundary leaks no flux.
        assert!(report.flux.abs() <= 1e-12, "flux {:.3e}", report.flux);
    }

    #[test]
    fn identity_residual_shrinks_at_quadrature_order() {
        let spec = build_model(Family::Real, 4).unwrap();
        let residual_at = |dr: f64| {
            let grid = RadialGrid::new(-4.0, 4.0, dr).unwrap();
            let mut g = RadialMetric::background(4, grid);
            for node in 0..grid.count {
                let r = grid.r(node);
                let s: f64 = r / 1.2;
                let bump = if s.abs() < 1.0 { 2e-3 * (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
                for a in 1..4 {
                    g.set(node, a, a, 1.0 + bump);
                }
            }
            volume_derivative_identity(&spec, &g).unwrap().residual
        };
        let r1 = residual_at(1.0 / 16.0);
        let r2 = residual_at(1.0 / 32.0);
        assert!(r1 / r2 >= 3.5, "ratio {}", r1 / r2);
    }

    #[test]
    fn integrability_analytic_and_probe_agree() {
        for (family, m) in [
            (Family::Real, 4),
            (Family::Complex, 2),
            (Family::Quaternion, 1),
            (Family::Octonion, 2),
        ] {
            let spec = build_model(family, m).unwrap();
            for offset in [-0.5, -0.1, 0.1, 0.5] {
                let tau = spec.tau0_f() + offset;
                let analytic = integrability_check(&spec, tau).unwrap();
                let probe = integrability_probe(&spec, tau).unwrap();
                assert_eq!(analytic, probe, "{family:?} tau = tau0 + {offset}");
                let expect =
                    if offset > 0.0 { Integrability::Finite } else { Integrability::Divergent };
                assert_eq!(analytic, expect);
            }
        }
        // Spec examples for (Real,4): tau0 = 3.
        let real4 = build_model(Family::Real, 4).unwrap();
        assert_eq!(integrability_probe(&real4, 2.0).unwrap(), Integrability::Divergent);
        assert_eq!(integrability_probe(&real4, 3.5).unwrap(), Integrability::Finite);
        assert!(integrability_check(&real4, 0.0).is_err());
    }

    #[test]
    fn decay_fit_synthetic() {
        // value = 7 exp(-2 t) fits exactly.
        let samples: Vec<(f64, f64)> =
            (0..40).map(|i| (i as f64 * 0.1, 7.0 * (-2.0 * i as f64 * 0.1).exp())).collect();
        let fit = decay_fit_samples(&samples).unwrap();
        assert_abs_diff_eq!(fit.rate, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.intercept, 7.0, epsilon = 1e-9);
        assert!(fit.residual <= 1e-12);

        // Constant series fits rate 0.
        let flat: Vec<(f64, f64)> = (0..40).map(|i| (i as f64 * 0.1, 0.25)).collect();
        let fit = decay_fit_samples(&flat).unwrap();
        assert_abs_diff_eq!(fit.rate, 0.0, epsilon = 1e-12);

        // Too few samples and nonpositive values error.
        assert!(decay_fit_samples(&samples[..12]).is_err());
        let mut bad = samples.clone();
        bad[35].1 = 0.0;
        assert!(decay_fit_samples(&bad).is_err());
    }

    #[test]
    fn rayleigh_scaling_invariance_and_positivity() {
        let spec = build_model(Family::Real, 4).unwrap();
        let mut u = RadialMetric::background(4, grid());
        u.data.iter_mut().for_each(|x| *x = 0.0);
        for node in 0..u.grid.count {
            let s = u.grid.r(node) / 1.0;
            let env = if s.abs() < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
            u.set(node, 1, 1, env);
            u.set(node, 2, 2, -env);
        }
        let q = rayleigh_quotient(&spec, &u).unwrap();
        assert!(q > 0.0, "traceless diagonal bump quotient {q}");

        let mut cu = u.clone();
        cu.data.iter_mut().for_each(|x| *x *= -3.7);
        let qc = rayleigh_quotient(&spec, &cu).unwrap();
        assert_abs_diff_eq!(q, qc, epsilon = 1e-12 * q.abs());

        let zero = {
            let mut z = u.clone();
            z.data.iter_mut().for_each(|x| *x = 0.0);
            z
        };
        assert!(rayleigh_quotient(&spec, &zero).is_err());
    }

    #[test]
    fn narrower_bump_increases_quotient() {
        let spec = build_model(Family::Real, 4).unwrap();
        let quotient_for = |width: f64| {
            let mut u = RadialMetric::background(4, grid());
            u.data.iter_mut().for_each(|x| *x = 0.0);
            for node in 0..u.grid.count {
                let s = u.grid.r(node) / width;
                let env = if s.abs() < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
                u.set(node, 1, 1, env);
                u.set(node, 2, 2, -env);
            }
            rayleigh_quotient(&spec, &u).unwrap()
        };
        let wide = quotient_for(1.6);
        let narrow = quotient_for(0.8);
        assert!(wide > 0.0 && narrow > 0.0);
        assert!(narrow > wide, "narrow {narrow} vs wide {wide}");
    }

    #[test]
    fn stability_batches_positive() {
        for (family, m) in [(Family::Real, 4), (Family::Complex, 2), (Family::Quaternion, 1)] {
            let spec = build_model(family, m).unwrap();
            let est = stability_batch(&spec, grid(), 50, 42).unwrap();
            assert_eq!(est.batch, 50);
            assert!(
                est.lambda0_estimate > 0.0,
                "{family:?}: lambda0 estimate {}",
                est.lambda0_estimate
            );
        }
    }

    #[test]
    fn frame_curvature_operator_isospectral_with_matrix_model() {
        // The curvature term of the stability operator (frame engine) and
        // the matrix-model curvature operator describe the same map in two
        // orthonormal frames of the tangent space; spectra must agree.
        use crate::jacobi;
        use crate::liealg::{self, sym_index_pairs};
        use nalgebra::DMatrix;
        for (family, m) in [(Family::Real, 4), (Family::Complex, 2), (Family::Quaternion, 1)] {
            let spec = build_model(family, m).unwrap();
            let frame = FrameSpec::normalized_frame(&spec);
            let n = frame.n;
            let g = RadialGrid::new(-2.0, 2.0, 0.25).unwrap();
            let bundle = curvature(&frame, &RadialMetric::background(n, g)).unwrap();
            let mid = g.count / 2;
            let mut tensor = DMatrix::<f64>::zeros(n * n, n * n);
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            tensor[(a * n + b, c * n + d)] = -bundle.riemann_at(mid, a, c, b, d);
                        }
                    }
                }
            }
            let pairs = sym_index_pairs(n);
            let mut proj = DMatrix::<f64>::zeros(pairs.len(), n * n);
            for (row, &(a, b)) in pairs.iter().enumerate() {
                if a == b {
                    proj[(row, a * n + a)] = 1.0;
                } else {
                    let w = 0.5f64.sqrt();
                    proj[(row, a * n + b)] = w;
                    proj[(row, b * n + a)] = w;
                }
            }
            let sym = &proj * &tensor * proj.transpose();
            let frame_gamma = jacobi::max_eigenvalue(&sym).unwrap();
            let model = liealg::normalize(liealg::matrix_model(&spec).unwrap()).unwrap();
            let algebra_gamma = liealg::gamma(&model).unwrap();
            assert_abs_diff_eq!(frame_gamma, algebra_gamma, epsilon = 1e-9);
        }
    }

    #[test]
    fn linearized_rhs_matches_stability_operator_on_tt_tensors() {
        // On divergence-free traceless radial tensors the linearization of
        // the flow right-hand side converges to L h at rate eps^2.
        let spec = build_model(Family::Real, 4).unwrap();
        let engine = FlowEngine::new(&spec);
        let g = grid();
        let mut h = RadialMetric::background(4, g);
        h.data.iter_mut().for_each(|x| *x = 0.0);
        for node in 0..g.count {
            let s = g.r(node) / 1.3;
            let env = if s.abs() < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
            h.set(node, 1, 1, env);
            h.set(node, 3, 3, -env);
        }
        let lh = lichnerowicz_apply(&spec, &h);
        let defect = |eps: f64| {
            let perturbed = |sign: f64| {
                let mut m = RadialMetric::background(4, g);
                for (v, hv) in m.data.iter_mut().zip(&h.data) {
                    *v += sign * eps * hv;
                }
                engine.nrdf_rhs(&m).unwrap().rhs
            };
            let plus = perturbed(1.0);
            let minus = perturbed(-1.0);
            let mut worst = 0.0f64;
            for node in g.interior() {
                for k in 0..16 {
                    let i = node * 16 + k;
                    let lin = (plus[i] - minus[i]) / (2.0 * eps);
                    worst = worst.max((lin - lh[i]).abs());
                }
            }
            worst
        };
        let d1 = defect(1e-3);
        let d2 = defect(5e-4);
        assert!(d1 <= 1e-4, "linearization defect {d1:.3e}");
        let ratio = d1 / d2;
        assert!((3.0..5.0).contains(&ratio), "eps^2 rate, ratio {ratio}");
    }
}
