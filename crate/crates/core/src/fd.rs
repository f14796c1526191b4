//! Three-point finite-difference weights on arbitrary spacing.

/// Weights `(w_minus, w_center, w_plus)` for the first derivative at `r` given
/// neighbours at `r - h_minus` and `r + h_plus`. Second order for any spacing.
pub fn first_derivative_weights(h_minus: f64, h_plus: f64) -> [f64; 3] {
    let s = h_minus + h_plus;
    [-h_plus / (h_minus * s), (h_plus - h_minus) / (h_minus * h_plus), h_minus / (h_plus * s)]
}

/// Weights for the second derivative; second order on uniform or smoothly varying spacing.
pub fn second_derivative_weights(h_minus: f64, h_plus: f64) -> [f64; 3] {
    let s = h_minus + h_plus;
    [2.0 / (h_minus * s), -2.0 / (h_minus * h_plus), 2.0 / (h_plus * s)]
}

pub(crate) fn apply(w: [f64; 3], f: [f64; 3]) -> f64 {
    w[0] * f[0] + w[1] * f[1] + w[2] * f[2]
}

/// Per-node derivative estimates for interpolation: interior nodes use the centred
/// three-point rule, end nodes the one-sided three-point rule.
pub(crate) fn nodal_derivatives(r: &[f64], f: &[f64]) -> Vec<f64> {
    let n = r.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let w = first_derivative_weights(r[i] - r[i - 1], r[i + 1] - r[i]);
        d[i] = apply(w, [f[i - 1], f[i], f[i + 1]]);
    }
    d[0] = one_sided(r[0], r[1], r[2], f[0], f[1], f[2]);
    d[n - 1] = one_sided(r[n - 1], r[n - 2], r[n - 3], f[n - 1], f[n - 2], f[n - 3]);
    d
}

/// Derivative at `x0` of the parabola through three points.
fn one_sided(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    let (a, b) = (x1 - x0, x2 - x0);
    f0 * (-(a + b) / (a * b)) + f1 * (b / (a * (b - a))) + f2 * (-a / (b * (b - a)))
}
