use thiserror::Error;

/// Errors surfaced by the model catalog, the Lie-algebra layer, the
/// curvature engine and the flow solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameter: {0}")]
    Parameter(String),

    #[error("unsupported matrix model: {0}")]
    UnsupportedModel(String),

    #[error("model consistency failure: {0}")]
    ModelConsistency(String),

    #[error("normalization failure: {0}")]
    Normalization(String),

    #[error("eigensolver did not converge within {sweeps} sweeps (off-norm {off:.3e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },

    #[error("metric not positive definite at node {node} (r = {r:.6})")]
    SingularMetric { node: usize, r: f64 },

    #[error("initial perturbation destroys positivity (amplitude {amplitude}, first bad node {node})")]
    Amplitude { amplitude: f64, node: usize },

    #[error("time step {dt:.3e} violates the parabolic bound {bound:.3e}")]
    StepBound { dt: f64, bound: f64 },

    #[error("flow blew up at t = {t:.6} (node {node})")]
    BlowUp {
        t: f64,
        node: usize,
        /// Monitor rows recorded before the failure.
        series: Box<crate::flow::TimeSeries>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("decay fit needs {needed} positive samples, got {got}")]
    FitDomain { needed: usize, got: usize },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config validation error: {key}: {message}")]
    ConfigValidation { key: String, message: String },
}
