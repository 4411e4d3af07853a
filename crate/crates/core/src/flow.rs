//! Normalized Ricci-DeTurck flow on radial frame metrics: right-hand side
//! assembly, DeTurck vector field, explicit RK4 stepping and runtime
//! monitors.
//!
//! The evolution is
//!   d/dt g = -2 (Ric[g] - (R0/n) g) + L_W g,
//! where W is the DeTurck field g^{pq}(Gamma(g) - Gamma(g0))^k_{pq} and
//! L_W g its Lie derivative. The background is a stationary point.

use crate::analysis::simpson_weights;
use crate::geometry::{
    background_connection, fd, koszul_connection, ricci_scalar, FrameSpec, RadialGrid,
    RadialMetric,
};
use crate::models::{admissibility_windows, ModelSpec};
use crate::report::f64_17;
use crate::{Error, Result};

/// Convergence threshold on sup|g - g0| declaring rigidity-style
/// convergence to the background.
pub const CONVERGENCE_SUP_H: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileShape {
    GaussianBump,
    CompactBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetBlock {
    Conformal,
    VBlock,
    ZBlock,
    Radial,
}

/// Radial perturbation profile inserted into one block of the metric.
#[derive(Debug, Clone, Copy)]
pub struct Perturbation {
    pub shape: ProfileShape,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub block: TargetBlock,
}

impl Perturbation {
    pub fn value(&self, r: f64) -> f64 {
        let s = (r - self.center) / self.width;
        match self.shape {
            ProfileShape::GaussianBump => self.amplitude * (-0.5 * s * s).exp(),
            ProfileShape::CompactBump => {
                if s.abs() < 1.0 {
                    self.amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FlowConfig {
    pub spec: ModelSpec,
    pub grid: RadialGrid,
    pub t_end: f64,
    pub cfl: f64,
    pub perturbation: Perturbation,
    pub monitor_stride: usize,
    /// Weight for the metric-decay monitors, from the tau window.
    pub tau: f64,
    /// Weight for the DeTurck-decay monitor, from the volume-comparison window.
    pub delta: f64,
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) {
            return Err(Error::ConfigValidation {
                key: "run.t_end".into(),
                message: format!("must be positive, got {}", self.t_end),
            });
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::ConfigValidation {
                key: "run.cfl".into(),
                message: format!("must lie in (0, 0.5], got {}", self.cfl),
            });
        }
        if self.monitor_stride == 0 {
            return Err(Error::ConfigValidation {
                key: "run.monitor_stride".into(),
                message: "must be at least 1".into(),
            });
        }
        if !(self.perturbation.width > 0.0) {
            return Err(Error::ConfigValidation {
                key: "perturbation.width".into(),
                message: format!("must be positive, got {}", self.perturbation.width),
            });
        }
        Ok(())
    }
}

/// Midpoints of the tau and delta windows, the documented weight defaults.
/// None when the corresponding window is empty (non-admissible members).
pub fn default_weights(spec: &ModelSpec) -> (Option<f64>, Option<f64>) {
    let report = admissibility_windows(spec);
    (
        report.tau_window.map(|w| w.midpoint()),
        report.delta_window_r.map(|w| w.midpoint()),
    )
}

/// One flow state: time and the metric field. Boundary nodes stay pinned
/// to the background.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub metric: RadialMetric,
}

/// Byproducts of one right-hand-side evaluation.
pub struct RhsBundle {
    pub n: usize,
    pub count: usize,
    /// Time derivative of the metric, node-major n^2; boundary rows zero.
    pub rhs: Vec<f64>,
    /// Ricci tensor of the evolving metric.
    pub ricci: Vec<f64>,
    /// Scalar curvature per node.
    pub scalar: Vec<f64>,
    /// DeTurck covector W_a per node.
    pub w_flat: Vec<f64>,
    /// DeTurck vector W^a per node.
    pub w_sharp: Vec<f64>,
    /// Inverse metric per node.
    pub ginv: Vec<f64>,
    /// sqrt(det g) per node.
    pub sqrt_det: Vec<f64>,
    /// Radial derivative of the metric per node.
    pub dg: Vec<f64>,
}

/// Flow driver for one catalog entry: frame table plus the r-independent
/// background connection.
pub struct FlowEngine {
    pub spec: ModelSpec,
    pub frame: FrameSpec,
    /// Background Gamma^c_{ab}, c-major n^3 (node-independent).
    bg_gamma: Vec<f64>,
}

impl FlowEngine {
    pub fn new(spec: &ModelSpec) -> FlowEngine {
        let frame = FrameSpec::normalized_frame(spec);
        // The background connection is r-independent; any valid grid works.
        let grid = RadialGrid::new(0.0, 8.0, 1.0).expect("static grid");
        let conn = background_connection(&frame, grid);
        let n3 = frame.n * frame.n * frame.n;
        let bg_gamma = conn.gamma[..n3].to_vec();
        FlowEngine { spec: *spec, frame, bg_gamma }
    }

    pub fn n(&self) -> usize {
        self.frame.n
    }

    /// DeTurck field of a metric: returns (W_flat, W_sharp) per node.
    pub fn deturck_vector(&self, metric: &RadialMetric) -> Result<(Vec<f64>, Vec<f64>)> {
        let conn = koszul_connection(&self.frame, metric)?;
        Ok(self.deturck_from_connection(metric, &conn.gamma, &conn.ginv))
    }

    fn deturck_from_connection(
        &self,
        metric: &RadialMetric,
        gamma: &[f64],
        ginv: &[f64],
    ) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let nn = n * n;
        let n3 = n * nn;
        let count = metric.grid.count;
        let mut w_flat = vec![0.0; count * n];
        let mut w_sharp = vec![0.0; count * n];
        for node in 0..count {
            let ga = &gamma[node * n3..(node + 1) * n3];
            let gi = &ginv[node * nn..(node + 1) * nn];
            let g = metric.at(node);
            for k in 0..n {
                let mut x = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        x += gi[p * n + q] * (ga[(k * n + p) * n + q] - self.bg_gamma[(k * n + p) * n + q]);
                    }
                }
                w_sharp[node * n + k] = x;
            }
            for a in 0..n {
                let mut v = 0.0;
                for k in 0..n {
                    v += g[a * n + k] * w_sharp[node * n + k];
                }
                w_flat[node * n + a] = v;
            }
        }
        (w_flat, w_sharp)
    }

    /// Full right-hand-side evaluation at a metric.
    pub fn nrdf_rhs(&self, metric: &RadialMetric) -> Result<RhsBundle> {
        let n = self.n();
        let nn = n * n;
        let count = metric.grid.count;
        let fast = ricci_scalar(&self.frame, metric)?;
        let (w_flat, w_sharp) = self.deturck_from_connection(metric, &fast.conn.gamma, &fast.conn.ginv);
        let dw_sharp = fd::d1_new(&w_sharp, count, n, metric.grid.dr);

        let r0_over_n = self.spec.r0_f() / self.spec.n_f();
        let mut rhs = vec![0.0; count * nn];
        let mut asym = vec![0.0; nn];
        for node in 0..count {
            if node == 0 || node + 1 == count {
                continue; // Dirichlet: boundary rows stay zero.
            }
            let g = metric.at(node);
            let dg = &fast.conn.dg[node * nn..(node + 1) * nn];
            let ric = &fast.ricci[node * nn..(node + 1) * nn];
            let x = &w_sharp[node * n..(node + 1) * n];
            let dx = &dw_sharp[node * n..(node + 1) * n];
            let out = &mut rhs[node * nn..(node + 1) * nn];

            // Lie derivative L_X g = X^0 g' + A + A^T with
            // A_{ab} = -X^c c(c,a,d) g_{db} + delta_{a0} X'^d g_{db}.
            asym.iter_mut().for_each(|v| *v = 0.0);
            for &(c, a, d, val) in self.frame.nonzero_brackets() {
                let xc = x[c];
                if xc != 0.0 {
                    for b in 0..n {
                        asym[a * n + b] -= xc * val * g[d * n + b];
                    }
                }
            }
            for b in 0..n {
                let mut v = 0.0;
                for d in 0..n {
                    v += dx[d] * g[d * n + b];
                }
                asym[b] += v; // a = 0 row
            }
            for a in 0..n {
                for b in 0..n {
                    out[a * n + b] = -2.0 * (ric[a * n + b] - r0_over_n * g[a * n + b])
                        + x[0] * dg[a * n + b]
                        + asym[a * n + b]
                        + asym[b * n + a];
                }
            }
        }
        Ok(RhsBundle {
            n,
            count,
            rhs,
            ricci: fast.ricci,
            scalar: fast.scalar,
            w_flat,
            w_sharp,
            ginv: fast.conn.ginv,
            sqrt_det: fast.conn.sqrt_det,
            dg: fast.conn.dg,
        })
    }

    /// Parabolic step-size bound cfl * dr^2 / max_node lambda_max(g^{-1}),
    /// with the largest eigenvalue bounded by the row-sum norm.
    pub fn step_bound(&self, metric: &RadialMetric, cfl: f64) -> Result<f64> {
        let n = self.n();
        let nn = n * n;
        let mut lam_max = 0.0f64;
        for node in 0..metric.grid.count {
            let l = super::geometry::cholesky_slice(metric.at(node), n).ok_or(
                Error::SingularMetric { node, r: metric.grid.r(node) },
            )?;
            let inv = super::geometry::spd_inverse(&l, n);
            for a in 0..n {
                let row: f64 = (0..nn).skip(a * n).take(n).map(|i| inv[i].abs()).sum();
                lam_max = lam_max.max(row);
            }
        }
        Ok(cfl * metric.grid.dr * metric.grid.dr / lam_max)
    }

    /// One classical RK4 step. Boundary nodes are re-pinned to the
    /// background after every stage (the rhs keeps them static already).
    pub fn step(&self, state: &FlowState, dt: f64, cfl: f64) -> Result<FlowState> {
        let bound = self.step_bound(&state.metric, cfl)?;
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::StepBound { dt, bound });
        }
        self.step_unchecked(state, dt)
    }

    fn step_unchecked(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let g = &state.metric;
        let map_err = |e: Error, t: f64| match e {
            Error::SingularMetric { node, .. } => Error::BlowUp {
                t,
                node,
                series: Box::new(TimeSeries::empty(self.spec)),
            },
            other => other,
        };
        let k1 = self.nrdf_rhs(g).map_err(|e| map_err(e, state.t))?;
        let g1 = add_scaled(g, &k1.rhs, 0.5 * dt);
        let k2 = self.nrdf_rhs(&g1).map_err(|e| map_err(e, state.t))?;
        let g2 = add_scaled(g, &k2.rhs, 0.5 * dt);
        let k3 = self.nrdf_rhs(&g2).map_err(|e| map_err(e, state.t))?;
        let g3 = add_scaled(g, &k3.rhs, dt);
        let k4 = self.nrdf_rhs(&g3).map_err(|e| map_err(e, state.t))?;

        let mut out = g.clone();
        let scale = dt / 6.0;
        for (i, v) in out.data.iter_mut().enumerate() {
            *v += scale * (k1.rhs[i] + 2.0 * k2.rhs[i] + 2.0 * k3.rhs[i] + k4.rhs[i]);
        }
        pin_boundary(&mut out);
        let t_new = state.t + dt;
        // Positivity after the full step.
        for node in 0..out.grid.count {
            if super::geometry::cholesky_slice(out.at(node), out.n).is_none() {
                return Err(Error::BlowUp {
                    t: t_new,
                    node,
                    series: Box::new(TimeSeries::empty(self.spec)),
                });
            }
        }
        Ok(FlowState { t: t_new, metric: out })
    }

    /// One monitor row at the current state.
    pub fn monitor(&self, state: &FlowState, config: &FlowConfig) -> Result<MonitorRow> {
        let bundle = self.nrdf_rhs(&state.metric)?;
        Ok(self.monitor_from_bundle(state, config, &bundle))
    }

    fn monitor_from_bundle(
        &self,
        state: &FlowState,
        config: &FlowConfig,
        bundle: &RhsBundle,
    ) -> MonitorRow {
        let n = self.n();
        let nn = n * n;
        let grid = state.metric.grid;
        let count = grid.count;
        let tau0 = self.spec.tau0_f();
        let weights = simpson_weights(count, grid.dr);
        // The volume identity is integrated over the evolving sub-window
        // (the Dirichlet nodes carry constraints, not dynamics); its flux
        // sits at the outermost evolving nodes. V itself is unaffected:
        // pinned nodes contribute sqrt(det) - 1 = 0.
        let wi = simpson_weights(count - 2, grid.dr);

        let mut sup_h = 0.0f64;
        let mut sup_wh = 0.0f64;
        let mut sup_wgrad = 0.0f64;
        let mut sup_ww = 0.0f64;
        let mut min_gap = f64::INFINITY;
        let mut volume = 0.0;
        let mut lhs = 0.0;
        let mut rhs_bulk = 0.0;
        for node in 0..count {
            let r = grid.r(node);
            let wt_tau = (config.tau * r.abs()).exp();
            let wt_delta = (config.delta * r.abs()).exp();
            let h = state.metric.deviation_norm(node);
            sup_h = sup_h.max(h);
            sup_wh = sup_wh.max(wt_tau * h);
            let dh: f64 = bundle.dg[node * nn..(node + 1) * nn].iter().map(|x| x * x).sum::<f64>().sqrt();
            sup_wgrad = sup_wgrad.max(wt_tau * dh);
            let wnorm: f64 =
                bundle.w_flat[node * n..(node + 1) * n].iter().map(|x| x * x).sum::<f64>().sqrt();
            sup_ww = sup_ww.max(wt_delta * wnorm);
            let gap = bundle.scalar[node] - self.spec.r0_f();
            min_gap = min_gap.min(gap);

            let density = (tau0 * r).exp();
            let sd = bundle.sqrt_det[node];
            volume += weights[node] * (sd - 1.0) * density;
            if node == 0 || node + 1 == count {
                continue;
            }
            // d/dt sqrt(det) = sqrt(det) tr(g^{-1} dg/dt) / 2.
            let gi = &bundle.ginv[node * nn..(node + 1) * nn];
            let rh = &bundle.rhs[node * nn..(node + 1) * nn];
            let mut tr = 0.0;
            for a in 0..n {
                for b in 0..n {
                    tr += gi[a * n + b] * rh[b * n + a];
                }
            }
            lhs += wi[node - 1] * 0.5 * sd * tr * density;
            rhs_bulk -= wi[node - 1] * gap * sd * density;
        }
        // Outward flux of the DeTurck field through the sub-window ends.
        let flux_at = |node: usize| {
            bundle.w_sharp[node * n] * bundle.sqrt_det[node] * (tau0 * grid.r(node)).exp()
        };
        let flux = flux_at(count - 2) - flux_at(1);
        MonitorRow {
            t: state.t,
            sup_h,
            sup_weighted_h: sup_wh,
            sup_grad_h: sup_wgrad,
            min_r_gap: min_gap,
            sup_weighted_w: sup_ww,
            volume,
            dv_dt_lhs: lhs,
            dv_dt_rhs: rhs_bulk + flux,
        }
    }
}

fn add_scaled(g: &RadialMetric, rhs: &[f64], s: f64) -> RadialMetric {
    let mut out = g.clone();
    for (v, r) in out.data.iter_mut().zip(rhs.iter()) {
        *v += s * r;
    }
    pin_boundary(&mut out);
    out
}

fn pin_boundary(g: &mut RadialMetric) {
    let n = g.n;
    let last = g.grid.count - 1;
    for node in [0, last] {
        let slice = g.at_mut(node);
        for a in 0..n {
            for b in 0..n {
                slice[a * n + b] = if a == b { 1.0 } else { 0.0 };
            }
        }
    }
}

/// Scalar-curvature range of freshly built initial data.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureReport {
    pub min_gap: f64,
    pub max_gap: f64,
}

/// Background plus the configured profile inserted into the requested
/// block, with the boundary pinned; reports the range of R - R0 so the
/// experimenter can select sign-correct data.
pub fn initial_data(config: &FlowConfig) -> Result<(RadialMetric, CurvatureReport)> {
    config.validate()?;
    let frame = FrameSpec::normalized_frame(&config.spec);
    let n = frame.n;
    let mult1 = config.spec.mult1 as usize;
    let mut metric = RadialMetric::background(n, config.grid);
    let last = config.grid.count - 1;
    for node in 1..last {
        let phi = config.perturbation.value(config.grid.r(node));
        if phi == 0.0 {
            continue;
        }
        match config.perturbation.block {
            TargetBlock::Conformal => {
                for a in 0..n {
                    let v = metric.get(node, a, a) + phi;
                    metric.set(node, a, a, v);
                }
            }
            TargetBlock::VBlock => {
                for a in 1..=mult1 {
                    let v = metric.get(node, a, a) + phi;
                    metric.set(node, a, a, v);
                }
            }
            TargetBlock::ZBlock => {
                for a in (1 + mult1)..n {
                    let v = metric.get(node, a, a) + phi;
                    metric.set(node, a, a, v);
                }
            }
            TargetBlock::Radial => {
                let v = metric.get(node, 0, 0) + phi;
                metric.set(node, 0, 0, v);
            }
        }
    }
    for node in 0..config.grid.count {
        if super::geometry::cholesky_slice(metric.at(node), n).is_none() {
            return Err(Error::Amplitude { amplitude: config.perturbation.amplitude, node });
        }
    }
    let report = curvature_report(&config.spec, &metric)?;
    Ok((metric, report))
}

/// Range of R - R0 over the window nodes.
pub fn curvature_report(spec: &ModelSpec, metric: &RadialMetric) -> Result<CurvatureReport> {
    let frame = FrameSpec::normalized_frame(spec);
    let fast = ricci_scalar(&frame, metric)?;
    let r0 = spec.r0_f();
    let mut min_gap = f64::INFINITY;
    let mut max_gap = f64::NEG_INFINITY;
    for &s in &fast.scalar {
        min_gap = min_gap.min(s - r0);
        max_gap = max_gap.max(s - r0);
    }
    Ok(CurvatureReport { min_gap, max_gap })
}

/// One monitor row of a flow run.
#[derive(Debug, Clone, Copy)]
pub struct MonitorRow {
    pub t: f64,
    pub sup_h: f64,
    pub sup_weighted_h: f64,
    pub sup_grad_h: f64,
    pub min_r_gap: f64,
    pub sup_weighted_w: f64,
    pub volume: f64,
    pub dv_dt_lhs: f64,
    pub dv_dt_rhs: f64,
}

/// Monitor rows of one run.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub spec: ModelSpec,
    pub rows: Vec<MonitorRow>,
    pub converged: bool,
}

impl TimeSeries {
    fn empty(spec: ModelSpec) -> TimeSeries {
        TimeSeries { spec, rows: Vec::new(), converged: false }
    }

    /// CSV rendering with the exact column set of the flow interface.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "t,sup_h,sup_weighted_h,sup_grad_h,min_R_gap,sup_weighted_W,V,dV_dt_lhs,dV_dt_rhs\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                f64_17(row.t),
                f64_17(row.sup_h),
                f64_17(row.sup_weighted_h),
                f64_17(row.sup_grad_h),
                f64_17(row.min_r_gap),
                f64_17(row.sup_weighted_w),
                f64_17(row.volume),
                f64_17(row.dv_dt_lhs),
                f64_17(row.dv_dt_rhs),
            ));
        }
        out
    }
}

/// Integrates the configured flow from freshly built initial data.
pub fn run(config: &FlowConfig) -> Result<TimeSeries> {
    let (initial, _) = initial_data(config)?;
    run_from(config, initial)
}

/// Integrates the configured flow from caller-supplied initial data
/// (pinned at the boundary by the caller or here).
pub fn run_from(config: &FlowConfig, mut initial: RadialMetric) -> Result<TimeSeries> {
    config.validate()?;
    pin_boundary(&mut initial);
    let engine = FlowEngine::new(&config.spec);
    // Headroom under the initial bound so that mild drift of lambda_max
    // along the flow cannot violate the per-step precondition.
    let dt_max = 0.9 * engine.step_bound(&initial, config.cfl)?;
    let n_steps = (config.t_end / dt_max).ceil().max(1.0) as usize;
    let dt = config.t_end / n_steps as f64;

    let mut series = TimeSeries::empty(config.spec);
    let mut state = FlowState { t: 0.0, metric: initial };
    series.rows.push(engine.monitor(&state, config)?);

    let attach = |mut e: Error, series: &TimeSeries| {
        if let Error::BlowUp { series: ref mut s, .. } = e {
            *s = Box::new(series.clone());
        }
        e
    };

    for step_idx in 1..=n_steps {
        state = engine
            .step(&state, dt, config.cfl)
            .map_err(|e| attach(e, &series))?;
        // Stepping accumulates t additively; keep the grid exact.
        state.t = dt * step_idx as f64;
        let due = step_idx % config.monitor_stride == 0 || step_idx == n_steps;
        let sup_h = state.metric.sup_deviation();
        if due || sup_h < CONVERGENCE_SUP_H {
            series.rows.push(engine.monitor(&state, config).map_err(|e| attach(e, &series))?);
        }
        if sup_h < CONVERGENCE_SUP_H {
            series.converged = true;
            break;
        }
    }
    Ok(series)
}
