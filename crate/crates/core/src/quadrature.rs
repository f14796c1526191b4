use crate::error::CoreError;
use crate::grid::RadialGrid;
use crate::solution::RadialSolution;

/// Composite trapezoid rule for `∫ f dr` over the grid, valid for any spacing.
pub fn quadrature(values: &[f64], grid: &RadialGrid) -> Result<f64, CoreError> {
    if values.len() != grid.len() {
        return Err(CoreError::LengthMismatch { values: values.len(), points: grid.len() });
    }
    Ok(trapezoid(values, grid.points()))
}

pub(crate) fn trapezoid(values: &[f64], points: &[f64]) -> f64 {
    values
        .windows(2)
        .zip(points.windows(2))
        .map(|(f, r)| 0.5 * (f[0] + f[1]) * (r[1] - r[0]))
        .sum()
}

/// `∫ |u|^2 dr` over the solution's grid.
pub fn norm_squared(sol: &RadialSolution) -> f64 {
    let sq: Vec<f64> = sol.u().iter().map(|u| u * u).collect();
    trapezoid(&sq, sol.grid().points())
}
