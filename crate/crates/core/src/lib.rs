//! Numerical laboratory for the four families of rank-1 symmetric spaces of
//! non-compact type: explicit matrix Lie-algebra models and their curvature
//! operators, a cohomogeneity-one curvature engine in the horospherical
//! gauge, the normalized Ricci-DeTurck flow on radially invariant
//! perturbations, and the relative-volume functional with its evolution
//! identity.

pub mod analysis;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod jacobi;
pub mod liealg;
pub mod models;
pub mod report;

pub use error::Error;
pub use models::{Family, ModelSpec, WindowReport};

pub type Result<T> = std::result::Result<T, Error>;
