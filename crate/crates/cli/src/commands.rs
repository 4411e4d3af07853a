//! Subcommand implementations: each renders one CSV document.

use rank1flow::analysis::{stability_batch, volume_derivative_identity, relative_volume};
use rank1flow::flow::{self, FlowConfig};
use rank1flow::geometry::{curvature, delta_d, sphere_density, FrameSpec, RadialGrid, RadialMetric};
use rank1flow::liealg::{gamma, matrix_model, normalize};
use rank1flow::models::{
    admissibility_windows, build_model, list_models, Family, ModelSpec, Window,
};
use rank1flow::report::f64_17;
use rank1flow::{Error, Result};

/// Golden table of the catalog: one row per spec.
pub fn models_csv(max_m: u32) -> Result<String> {
    let mut out = String::from("family,m,n,mult1,mult2,tau0,R0,gamma,admissible\n");
    for spec in list_models(max_m)? {
        let report = admissibility_windows(&spec);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            spec.family.name(),
            spec.m,
            spec.n,
            spec.mult1,
            spec.mult2,
            spec.tau0,
            spec.r0,
            spec.gamma,
            report.admissible
        ));
    }
    Ok(out)
}

fn window_fields(w: Option<Window>) -> (String, String) {
    match w {
        Some(w) => (f64_17(w.lo), f64_17(w.hi)),
        None => (String::new(), String::new()),
    }
}

/// Admissibility windows of one catalog entry.
pub fn admissibility_csv(spec: &ModelSpec) -> String {
    let report = admissibility_windows(spec);
    let (tau_lo, tau_hi) = window_fields(report.tau_window);
    let (dw_lo, dw_hi) = window_fields(report.delta_window_w);
    let (dr_lo, dr_hi) = window_fields(report.delta_window_r);
    let mut out = String::from(
        "family,m,tau0,gamma,tau_lo,tau_hi,delta_w_lo,delta_w_hi,delta_r_lo,delta_r_hi,admissible\n",
    );
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{},{}\n",
        spec.family.name(),
        spec.m,
        spec.tau0,
        spec.gamma,
        tau_lo,
        tau_hi,
        dw_lo,
        dw_hi,
        dr_lo,
        dr_hi,
        report.admissible
    ));
    out
}

/// Computed curvature-operator gamma against the catalog value. The
/// octonionic family has no matrix model; its gamma column reads `table`.
pub fn spectrum_csv(spec: &ModelSpec) -> Result<String> {
    let mut out = String::from("family,m,gamma,gamma_table,residual\n");
    if spec.family == Family::Octonion {
        out.push_str(&format!("{},{},table,{},\n", spec.family.name(), spec.m, spec.gamma));
        return Ok(out);
    }
    let model = normalize(matrix_model(spec)?)?;
    let computed = gamma(&model)?;
    let residual = (computed - spec.gamma as f64).abs();
    out.push_str(&format!(
        "{},{},{},{},{}\n",
        spec.family.name(),
        spec.m,
        f64_17(computed),
        spec.gamma,
        f64_17(residual)
    ));
    Ok(out)
}

/// Background oracles along the radius: polar Laplacian of the distance,
/// sphere density and the engine's scalar-curvature residual.
pub fn background_csv(spec: &ModelSpec, grid: RadialGrid) -> Result<String> {
    if grid.r_min <= 0.0 {
        return Err(Error::Domain(format!(
            "background oracles need rmin > 0, got {}",
            grid.r_min
        )));
    }
    let frame = FrameSpec::normalized_frame(spec);
    let metric = RadialMetric::background(frame.n, grid);
    let bundle = curvature(&frame, &metric)?;
    let mut out = String::from("r,delta_d,sphere_density,scalar_curvature_residual\n");
    for node in 0..grid.count {
        let r = grid.r(node);
        out.push_str(&format!(
            "{},{},{},{}\n",
            f64_17(r),
            f64_17(delta_d(spec, r)?),
            f64_17(sphere_density(spec, r)?),
            f64_17((bundle.scalar[node] - spec.r0_f()).abs())
        ));
    }
    Ok(out)
}

/// Runs the configured flow; on blow-up the partial series is returned
/// along with the error so the caller can still emit it.
pub fn flow_csv(config: &FlowConfig) -> std::result::Result<String, (Error, Option<String>)> {
    match flow::run(config) {
        Ok(series) => Ok(series.to_csv()),
        Err(Error::BlowUp { t, node, series }) => {
            let csv = series.to_csv();
            Err((
                Error::BlowUp { t, node, series },
                Some(csv),
            ))
        }
        Err(e) => Err((e, None)),
    }
}

/// Relative volume and the volume-derivative identity of the configured
/// initial data.
pub fn volume_csv(config: &FlowConfig) -> Result<String> {
    let (metric, report) = flow::initial_data(config)?;
    let v = relative_volume(&metric, &config.spec);
    let identity = volume_derivative_identity(&config.spec, &metric)?;
    let mut out = String::from("# per-unit-haar\nquantity,value\n");
    for (name, value) in [
        ("V", v),
        ("dV_dt_lhs", identity.lhs),
        ("dV_dt_rhs", identity.rhs),
        ("identity_residual", identity.residual),
        ("boundary_flux", identity.flux),
        ("min_R_gap", report.min_gap),
        ("max_R_gap", report.max_gap),
    ] {
        out.push_str(&format!("{name},{}\n", f64_17(value)));
    }
    Ok(out)
}

/// Batch of Rayleigh quotients on random compact test tensors.
pub fn stability_csv(
    spec: &ModelSpec,
    grid: RadialGrid,
    count: usize,
    seed: u64,
) -> Result<String> {
    let estimate = stability_batch(spec, grid, count, seed)?;
    let mut out = String::new();
    out.push_str("# per-unit-haar\n");
    out.push_str(&format!("# lambda0_estimate = {}\n", f64_17(estimate.lambda0_estimate)));
    out.push_str(&format!("# batch = {}\n", estimate.batch));
    out.push_str("sample,center,width,quotient\n");
    for (i, s) in estimate.samples.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            f64_17(s.center),
            f64_17(s.width),
            f64_17(s.quotient)
        ));
    }
    Ok(out)
}

pub fn model_from_flags(family: &str, m: u32) -> Result<ModelSpec> {
    build_model(Family::parse(family)?, m)
}
