//! Fourth-order finite differences on uniform radial grids: centered
//! stencils inside, one-sided stencils of the same order at the first and
//! last two nodes.

/// First derivative of a multi-component field stored node-major with
/// `comps` values per node. `out` must have the same layout.
pub fn d1(data: &[f64], out: &mut [f64], count: usize, comps: usize, dr: f64) {
    assert!(count >= 5, "stencils need at least 5 nodes");
    assert_eq!(data.len(), count * comps);
    assert_eq!(out.len(), count * comps);
    let h12 = 1.0 / (12.0 * dr);
    let at = |node: usize, k: usize| data[node * comps + k];

    for k in 0..comps {
        out[k] = (-25.0 * at(0, k) + 48.0 * at(1, k) - 36.0 * at(2, k) + 16.0 * at(3, k)
            - 3.0 * at(4, k))
            * h12;
        out[comps + k] = (-3.0 * at(0, k) - 10.0 * at(1, k) + 18.0 * at(2, k) - 6.0 * at(3, k)
            + at(4, k))
            * h12;
        let l = count - 1;
        out[l * comps + k] = (25.0 * at(l, k) - 48.0 * at(l - 1, k) + 36.0 * at(l - 2, k)
            - 16.0 * at(l - 3, k)
            + 3.0 * at(l - 4, k))
            * h12;
        out[(l - 1) * comps + k] = (3.0 * at(l, k) + 10.0 * at(l - 1, k) - 18.0 * at(l - 2, k)
            + 6.0 * at(l - 3, k)
            - at(l - 4, k))
            * h12;
    }
    for node in 2..count - 2 {
        for k in 0..comps {
            out[node * comps + k] = (at(node - 2, k) - 8.0 * at(node - 1, k)
                + 8.0 * at(node + 1, k)
                - at(node + 2, k))
                * h12;
        }
    }
}

/// Convenience wrapper allocating the output.
pub fn d1_new(data: &[f64], count: usize, comps: usize, dr: f64) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    d1(data, &mut out, count, comps, dr);
    out
}

/// Centered five-point first derivative of a scalar function at a point,
/// used by closed-form oracle cross-checks.
pub fn d1_pointwise(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}
