//! Shared output formatting for the CSV emitters.

/// Formats a float with 17 significant digits so every value round-trips.
pub fn f64_17(x: f64) -> String {
    format!("{x:.16e}")
}
