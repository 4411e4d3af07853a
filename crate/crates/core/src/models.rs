//! Catalog of the four rank-1 families and the admissibility-window
//! arithmetic used by the volume comparison experiment.

use crate::{Error, Result};

/// The four families of rank-1 symmetric spaces of non-compact type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Real,
    Complex,
    Quaternion,
    Octonion,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Real,
        Family::Complex,
        Family::Quaternion,
        Family::Octonion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Real => "real",
            Family::Complex => "complex",
            Family::Quaternion => "quaternion",
            Family::Octonion => "octonion",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "real" => Ok(Family::Real),
            "complex" => Ok(Family::Complex),
            "quaternion" => Ok(Family::Quaternion),
            "octonion" => Ok(Family::Octonion),
            other => Err(Error::Parameter(format!("unknown family `{other}`"))),
        }
    }

    /// Smallest admitted parameter m.
    pub fn m_min(self) -> u32 {
        match self {
            Family::Real | Family::Octonion => 2,
            Family::Complex | Family::Quaternion => 1,
        }
    }

    /// Largest admitted parameter m (`None` when unbounded).
    pub fn m_max(self) -> Option<u32> {
        match self {
            Family::Octonion => Some(2),
            _ => None,
        }
    }
}

/// One member of the catalog with its exact integer constants.
///
/// `tau0 = mult1 + 2*mult2` is the limit of the Laplacian of the distance
/// function and `r0 = -n*(mult1 + 4*mult2)` the scalar curvature of the
/// background; both follow from the root multiplicities by integer
/// arithmetic. `gamma` is the largest eigenvalue of the curvature operator
/// on symmetric 2-tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub family: Family,
    pub m: u32,
    /// Real dimension of the space.
    pub n: i64,
    /// Number of restricted roots of value 1.
    pub mult1: i64,
    /// Number of restricted roots of value 2.
    pub mult2: i64,
    pub tau0: i64,
    pub r0: i64,
    pub gamma: i64,
}

impl ModelSpec {
    /// Multiplicity-weighted sum of squared root values, `mult1 + 4*mult2`.
    /// The background satisfies `Ric = -sum_sq * g0`.
    pub fn root_square_sum(&self) -> i64 {
        self.mult1 + 4 * self.mult2
    }

    pub fn tau0_f(&self) -> f64 {
        self.tau0 as f64
    }

    pub fn r0_f(&self) -> f64 {
        self.r0 as f64
    }

    pub fn n_f(&self) -> f64 {
        self.n as f64
    }

    /// Root value of frame direction `i` (1-based over the n-1 invariant
    /// directions: the mult1 v-directions carry 1, the mult2 z-directions 2).
    pub fn root_values(&self) -> Vec<f64> {
        let mut roots = vec![1.0; self.mult1 as usize];
        roots.extend(std::iter::repeat(2.0).take(self.mult2 as usize));
        roots
    }
}

/// Builds the catalog entry for one family member.
pub fn build_model(family: Family, m: u32) -> Result<ModelSpec> {
    if m < family.m_min() {
        return Err(Error::Parameter(format!(
            "family {} needs m >= {}, got {m}",
            family.name(),
            family.m_min()
        )));
    }
    if let Some(max) = family.m_max() {
        if m > max {
            return Err(Error::Parameter(format!(
                "family {} admits only m <= {max}, got {m}",
                family.name()
            )));
        }
    }
    let m = m as i64;
    let (n, mult1, mult2, gamma) = match family {
        Family::Real => (m, m - 1, 0, 1),
        Family::Complex => (2 * m, 2 * m - 2, 1, 4),
        Family::Quaternion => (4 * m, 4 * m - 4, 3, 4),
        Family::Octonion => (16, 8, 7, 4),
    };
    debug_assert_eq!(n, mult1 + mult2 + 1);
    Ok(ModelSpec {
        family,
        m: m as u32,
        n,
        mult1,
        mult2,
        tau0: mult1 + 2 * mult2,
        r0: -n * (mult1 + 4 * mult2),
        gamma,
    })
}

/// All valid catalog entries with parameter `<= max_m`, ordered by family
/// (Real, Complex, Quaternion, Octonion) and ascending m.
pub fn list_models(max_m: u32) -> Result<Vec<ModelSpec>> {
    if max_m < 1 {
        return Err(Error::Parameter(format!("max_m must be >= 1, got {max_m}")));
    }
    let mut out = Vec::new();
    for family in Family::ALL {
        let hi = family.m_max().map_or(max_m, |cap| cap.min(max_m));
        for m in family.m_min()..=hi {
            out.push(build_model(family, m)?);
        }
    }
    Ok(out)
}

/// An open interval `(lo, hi)`; empty unless `lo < hi` strictly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Option<Window> {
        (lo < hi).then_some(Window { lo, hi })
    }

    pub fn intersect(a: Option<Window>, b: Option<Window>) -> Option<Window> {
        match (a, b) {
            (Some(a), Some(b)) => Window::new(a.lo.max(b.lo), a.hi.min(b.hi)),
            _ => None,
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }
}

/// The three weight windows governing the flow estimates. They use three
/// different radicands (2*gamma, -R0/n and -2*R0/n); all are reported,
/// and admissibility follows the volume-comparison version `delta_window_r`.
#[derive(Debug, Clone, Copy)]
pub struct WindowReport {
    /// Decay weights tau for the metric perturbation: `(0, tau0/2 + sqrt(tau0^2/4 - 2*gamma))`.
    pub tau_window: Option<Window>,
    /// Weights delta for the DeTurck field:
    /// `(0, tau0/2 + sqrt(tau0^2/4 - R0/n)) ∩ (tau0, tau0 + 2*sqrt(tau0^2/4 - 2*gamma))`.
    pub delta_window_w: Option<Window>,
    /// Weights delta for the scalar-curvature estimate and the volume comparison:
    /// `(0, tau0/2 + sqrt(tau0^2/4 - 2*R0/n)) ∩ (tau0, tau0 + 2*sqrt(tau0^2/4 - 2*gamma))`.
    pub delta_window_r: Option<Window>,
    pub admissible: bool,
}

/// Evaluates the three windows for one catalog entry.
pub fn admissibility_windows(spec: &ModelSpec) -> WindowReport {
    let tau0 = spec.tau0_f();
    let gamma = spec.gamma as f64;
    let r0_over_n = spec.r0_f() / spec.n_f();

    let disc = tau0 * tau0 / 4.0 - 2.0 * gamma;
    let tau_window = if disc > 0.0 {
        Window::new(0.0, tau0 / 2.0 + disc.sqrt())
    } else {
        None
    };
    // Right factor shared by both delta windows.
    let upper = if disc > 0.0 {
        Window::new(tau0, tau0 + 2.0 * disc.sqrt())
    } else {
        None
    };
    let left_w = Window::new(0.0, tau0 / 2.0 + (tau0 * tau0 / 4.0 - r0_over_n).sqrt());
    let left_r = Window::new(0.0, tau0 / 2.0 + (tau0 * tau0 / 4.0 - 2.0 * r0_over_n).sqrt());
    let delta_window_w = Window::intersect(left_w, upper);
    let delta_window_r = Window::intersect(left_r, upper);
    WindowReport {
        tau_window,
        delta_window_w,
        delta_window_r,
        admissible: delta_window_r.is_some(),
    }
}

/// Smallest dimension in the family whose member is admissible for the
/// volume comparison.
pub fn dimension_threshold(family: Family) -> i64 {
    let hi = family.m_max().unwrap_or(64);
    for m in family.m_min()..=hi {
        let spec = build_model(family, m).expect("in-range parameter");
        if admissibility_windows(&spec).admissible {
            return spec.n;
        }
    }
    unreachable!("every family has admissible members")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn table_rows_match_closed_forms() {
        // Closed forms per family: -m(m-1), -2m(2m+2), -4m(4m+8), -16*36.
        for m in 2..=7 {
            let s = build_model(Family::Real, m).unwrap();
            let m = m as i64;
            assert_eq!(s.n, m);
            assert_eq!((s.mult1, s.mult2), (m - 1, 0));
            assert_eq!(s.tau0, m - 1);
            assert_eq!(s.r0, -m * (m - 1));
            assert_eq!(s.gamma, 1);
        }
        for m in 1..=5 {
            let s = build_model(Family::Complex, m).unwrap();
            let m = m as i64;
            assert_eq!(s.n, 2 * m);
            assert_eq!((s.mult1, s.mult2), (2 * m - 2, 1));
            assert_eq!(s.tau0, 2 * m);
            assert_eq!(s.r0, -2 * m * (2 * m + 2));
            assert_eq!(s.gamma, 4);
        }
        for m in 1..=5 {
            let s = build_model(Family::Quaternion, m).unwrap();
            let m = m as i64;
            assert_eq!(s.n, 4 * m);
            assert_eq!((s.mult1, s.mult2), (4 * m - 4, 3));
            assert_eq!(s.tau0, 4 * m + 2);
            assert_eq!(s.r0, -4 * m * (4 * m + 8));
            assert_eq!(s.gamma, 4);
        }
        let s = build_model(Family::Octonion, 2).unwrap();
        assert_eq!(s.n, 16);
        assert_eq!((s.mult1, s.mult2), (8, 7));
        assert_eq!(s.tau0, 22);
        assert_eq!(s.r0, -16 * 36);
        assert_eq!(s.gamma, 4);
    }

    #[test]
    fn spec_examples() {
        let s = build_model(Family::Real, 4).unwrap();
        assert_eq!((s.n, s.mult1, s.mult2, s.tau0, s.r0, s.gamma), (4, 3, 0, 3, -12, 1));
        let s = build_model(Family::Complex, 3).unwrap();
        assert_eq!((s.n, s.mult1, s.mult2, s.tau0, s.r0, s.gamma), (6, 4, 1, 6, -48, 4));
        let s = build_model(Family::Octonion, 2).unwrap();
        assert_eq!((s.n, s.tau0, s.r0), (16, 22, -576));
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(build_model(Family::Real, 1).is_err());
        assert!(build_model(Family::Octonion, 1).is_err());
        assert!(build_model(Family::Octonion, 3).is_err());
        assert!(build_model(Family::Complex, 0).is_err());
    }

    #[test]
    fn list_models_enumeration() {
        // max_m = 5: Real 2..5 (4) + Complex 1..5 (5) + Quaternion 1..5 (5) + Octonion (1).
        let all = list_models(5).unwrap();
        assert_eq!(all.len(), 15);

        let small = list_models(2).unwrap();
        assert!(small.iter().any(|s| s.family == Family::Real && s.m == 2));
        assert!(small.iter().any(|s| s.family == Family::Octonion && s.m == 2));

        let tiny = list_models(1).unwrap();
        assert!(tiny.iter().any(|s| s.family == Family::Complex && s.m == 1));
        assert!(tiny.iter().any(|s| s.family == Family::Quaternion && s.m == 1));
        assert!(tiny.iter().all(|s| s.family != Family::Real));
        assert!(tiny.iter().all(|s| s.family != Family::Octonion));

        assert!(list_models(0).is_err());

        // Deterministic order: family-major, ascending m.
        let names: Vec<_> = all.iter().map(|s| (s.family.name(), s.m)).collect();
        let mut sorted = names.clone();
        sorted.sort_by_key(|(f, m)| {
            let fi = Family::ALL.iter().position(|g| g.name() == *f).unwrap();
            (fi, *m)
        });
        assert_eq!(names, sorted);
    }

    #[test]
    fn window_examples() {
        // (Real,3): tau0 = 2, gamma = 1, radicand 1 - 2 < 0 -> not admissible.
        let r3 = admissibility_windows(&build_model(Family::Real, 3).unwrap());
        assert!(r3.tau_window.is_none());
        assert!(!r3.admissible);

        // (Real,4): delta_window_r = (0, 1.5 + sqrt(8.25)) ∩ (3, 4) = (3, 4).
        let r4 = admissibility_windows(&build_model(Family::Real, 4).unwrap());
        let w = r4.delta_window_r.unwrap();
        assert_abs_diff_eq!(w.lo, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w.hi, 4.0, epsilon = 1e-14);
        assert!(r4.admissible);
        // tau window (0, 1.5 + sqrt(2.25 - 2)) = (0, 2).
        let t = r4.tau_window.unwrap();
        assert_abs_diff_eq!(t.lo, 0.0);
        assert_abs_diff_eq!(t.hi, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn admissible_iff_quarter_tau0_squared_exceeds_two_gamma() {
        for max in [50] {
            for spec in list_models(max).unwrap() {
                let report = admissibility_windows(&spec);
                let predicate = (spec.tau0 * spec.tau0) as f64 / 4.0 > 2.0 * spec.gamma as f64;
                assert_eq!(report.admissible, predicate, "spec {spec:?}");
            }
        }
    }

    #[test]
    fn dimension_thresholds_per_family() {
        assert_eq!(dimension_threshold(Family::Real), 4);
        assert_eq!(dimension_threshold(Family::Complex), 6);
        assert_eq!(dimension_threshold(Family::Quaternion), 4);
        assert_eq!(dimension_threshold(Family::Octonion), 16);
    }
}
