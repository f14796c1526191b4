use serde::Serialize;

use super::DistributionalError;
use crate::fd::{apply, first_derivative_weights, second_derivative_weights};
use crate::grid::RadialGrid;

/// Largest pointwise disagreement between `(1/r²)(r² f')'` and `(1/r)(r f)''`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub max_abs_difference: f64,
    pub worst_radius: f64,
    pub interior_points: usize,
}

/// Evaluates `(1/r²) d/dr(r² df/dr)` (as `f'' + 2f'/r`) and `(1/r) d²/dr² (r f)` with
/// three-point differences on the interior of `grid` and compares them.
///
/// On a uniform grid the two stencils coincide, so the difference is rounding only.
/// On a non-uniform grid it equals `-(h₊ - h₋) D²f / r`, which is `O(h²)` for
/// smoothly graded meshes.
pub fn operator_identity_check(
    field: impl Fn(f64) -> f64,
    grid: &RadialGrid,
) -> Result<IdentityCheck, DistributionalError> {
    if grid.includes_origin() {
        return Err(DistributionalError::GridIncludesOrigin);
    }
    let r = grid.points();
    let interior = r.len() - 2;
    if interior < 5 {
        return Err(DistributionalError::GridTooCoarse { interior });
    }
    let f: Vec<f64> = r.iter().map(|&x| field(x)).collect();
    let rf: Vec<f64> = r.iter().zip(&f).map(|(x, y)| x * y).collect();
    let mut worst = (0.0f64, r[1]);
    for i in 1..r.len() - 1 {
        let (hm, hp) = (r[i] - r[i - 1], r[i + 1] - r[i]);
        let (d1, d2) = (first_derivative_weights(hm, hp), second_derivative_weights(hm, hp));
        let local = [f[i - 1], f[i], f[i + 1]];
        let radial_laplacian = apply(d2, local) + 2.0 / r[i] * apply(d1, local);
        let via_product = apply(d2, [rf[i - 1], rf[i], rf[i + 1]]) / r[i];
        let diff = (radial_laplacian - via_product).abs();
        if diff > worst.0 || diff.is_nan() {
            worst = (diff, r[i]);
        }
    }
    Ok(IdentityCheck { max_abs_difference: worst.0, worst_radius: worst.1, interior_points: interior })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridScheme};

    /// Closed form of the stencil difference, `-(h₊ - h₋) D²f / r`.
    fn predicted(field: impl Fn(f64) -> f64, grid: &RadialGrid) -> f64 {
        let r = grid.points();
        (1..r.len() - 1)
            .map(|i| {
                let (hm, hp) = (r[i] - r[i - 1], r[i + 1] - r[i]);
                let d2 = apply(second_derivative_weights(hm, hp), [field(r[i - 1]), field(r[i]), field(r[i + 1])]);
                ((hp - hm) * d2 / r[i]).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn quadratic_on_uniform_grid() {
        let g = make_grid(GridScheme::Uniform, 0.5, 5.0, 451).unwrap();
        let c = operator_identity_check(|r| r * r, &g).unwrap();
        assert!(c.max_abs_difference < 1e-8, "{}", c.max_abs_difference);
    }

    #[test]
    fn coulomb_field_vanishes_away_from_origin() {
        let g = make_grid(GridScheme::LogSpaced, 0.1, 10.0, 400).unwrap();
        let c = operator_identity_check(|r| 1.0 / r, &g).unwrap();
        let bound = predicted(|r| 1.0 / r, &g);
        assert!((c.max_abs_difference - bound).abs() < 1e-6 * bound.max(1.0));
        let fine = operator_identity_check(|r| 1.0 / r, &g.refined().unwrap()).unwrap();
        assert!(c.max_abs_difference / fine.max_abs_difference > 3.5);
    }

    #[test]
    fn gaussian_converges_at_second_order() {
        let mut g = make_grid(GridScheme::LogSpaced, 0.1, 10.0, 500).unwrap();
        let field = |r: f64| (-r * r).exp();
        let mut previous = operator_identity_check(field, &g).unwrap().max_abs_difference;
        for _ in 0..2 {
            g = g.refined().unwrap();
            let next = operator_identity_check(field, &g).unwrap().max_abs_difference;
            assert!(previous / next >= 3.5, "ratio {}", previous / next);
            previous = next;
        }
    }

    #[test]
    fn matches_closed_form_difference() {
        let g = make_grid(GridScheme::PowerStretched { exponent: 2.0 }, 0.2, 6.0, 300).unwrap();
        let field = |r: f64| r.cos() * (-0.1 * r).exp();
        let c = operator_identity_check(field, &g).unwrap();
        let p = predicted(field, &g);
        // Exact algebraically; the residual is cancellation in the fine cells.
        assert!((c.max_abs_difference - p).abs() < 1e-4 * p, "{} vs {p}", c.max_abs_difference);
    }

    #[test]
    fn rejects_bad_grids() {
        let g = make_grid(GridScheme::Uniform, 0.0, 1.0, 50).unwrap();
        assert_eq!(operator_identity_check(|r| r, &g), Err(DistributionalError::GridIncludesOrigin));
        let g = make_grid(GridScheme::Uniform, 0.1, 1.0, 6).unwrap();
        assert_eq!(operator_identity_check(|r| r, &g), Err(DistributionalError::GridTooCoarse { interior: 4 }));
    }
}
