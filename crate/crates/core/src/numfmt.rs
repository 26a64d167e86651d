/// Rounds `x` to `digits` significant decimal digits.
///
/// Output records go through this so that reruns diff cleanly.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 || digits == 0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}
