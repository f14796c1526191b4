use serde::{Deserialize, Serialize};

use super::{EigenError, LocalCoefficient, Sampled};
use crate::fd::second_derivative_weights;
use crate::grid::{GridScheme, RadialGrid};
use crate::solution::count_nodes;

/// Running values beyond this magnitude are divided down and the factor logged.
pub const RESCALE_THRESHOLD: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Outward,
    Inward,
}

/// Initial data at the first grid point in the direction of integration.
///
/// Outward integration starts at the first strictly positive radius, inward
/// integration at `r_max`. `Values` gives `u` there and at the next point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Slope { value: f64, slope: f64 },
    Values { first: f64, second: f64 },
}

/// Integrated `u` in grid order. Entry `i` represents `values[i] * exp(log_scale[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    values: Vec<f64>,
    log_scale: Vec<f64>,
    range: (usize, usize),
}

impl Trajectory {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_scale(&self) -> &[f64] {
        &self.log_scale
    }

    /// Inclusive index range that was integrated.
    pub fn range(&self) -> (usize, usize) {
        self.range
    }

    pub fn was_rescaled(&self) -> bool {
        self.log_scale.iter().any(|&s| s != 0.0)
    }

    /// `u_i / u_j`, robust to rescaling between the two points.
    pub fn relative(&self, i: usize, j: usize) -> f64 {
        self.values[i] / self.values[j] * (self.log_scale[i] - self.log_scale[j]).exp()
    }

    /// Whole trajectory divided by its value at `anchor`.
    pub fn scaled_to(&self, anchor: usize) -> Vec<f64> {
        (0..self.values.len())
            .map(|i| if self.values[i] == 0.0 { 0.0 } else { self.relative(i, anchor) })
            .collect()
    }

    /// Replaces leading values (in the unscaled first segment) with externally known ones.
    pub(crate) fn seed(&mut self, from: usize, values: impl Iterator<Item = f64>) {
        for (i, v) in values.enumerate() {
            self.values[from + i] = v;
            self.log_scale[from + i] = 0.0;
        }
        self.range.0 = self.range.0.min(from);
    }

    /// Sign changes over the integrated range; rescaling never changes signs.
    pub fn nodes(&self) -> usize {
        count_nodes(&self.values[self.range.0..=self.range.1])
    }
}

enum Method {
    /// Numerov in `x` with `w = u / sqrt(r)` when `log`, else in `r` with `w = u`.
    Numerov { c: f64, log: bool },
    ThreePoint,
}

fn method(grid: &RadialGrid) -> Method {
    match (grid.scheme(), grid.step()) {
        (GridScheme::LogSpaced, Some(h)) => Method::Numerov { c: h * h / 12.0, log: true },
        (GridScheme::Uniform, Some(h)) => Method::Numerov { c: h * h / 12.0, log: false },
        _ => Method::ThreePoint,
    }
}

/// Integrates `u'' + Q(r, E) u = 0` across the grid and returns `u` in grid order.
///
/// Fourth-order Numerov is used on uniform grids and, after `x = ln r`,
/// `u = sqrt(r) w`, on log-spaced grids; other grids use the second-order
/// three-point scheme. Points not reached (the origin) are left at zero.
pub fn numerov_integrate(
    coef: &LocalCoefficient,
    energy: f64,
    grid: &RadialGrid,
    start: Start,
    direction: Direction,
) -> Result<Trajectory, EigenError> {
    let sampled = coef.sample(grid)?;
    let k = grid.first_positive();
    let n = grid.len();
    if n < k + 3 {
        return Err(EigenError::InvalidConfig(format!("grid of {n} points is too short to integrate")));
    }
    let r = grid.points();
    let (i0, i1, stop) = match direction {
        Direction::Outward => (k, k + 1, n - 1),
        Direction::Inward => (n - 1, n - 2, k),
    };
    if direction == Direction::Inward {
        let q = sampled.q(n - 1, energy);
        if q >= 0.0 {
            return Err(EigenError::NotClassicallyBound { energy, q_at_r_max: q });
        }
    }
    let (u0, u1) = match start {
        Start::Values { first, second } => (first, second),
        Start::Slope { value, slope } => {
            let d = r[i1] - r[i0];
            let q0 = sampled.q(i0, energy);
            (value, value + d * slope - 0.5 * d * d * q0 * value - d * d * d * q0 * slope / 6.0)
        }
    };
    integrate(&sampled, grid, energy, (i0, u0, u1), direction, stop)
}

/// Core recursion from `(u[i0], u[i0 ± 1])` to index `stop` inclusive.
pub(crate) fn integrate(
    sampled: &Sampled,
    grid: &RadialGrid,
    energy: f64,
    (i0, u0, u1): (usize, f64, f64),
    direction: Direction,
    stop: usize,
) -> Result<Trajectory, EigenError> {
    let r = grid.points();
    let n = r.len();
    let mut values = vec![0.0; n];
    let mut log_scale = vec![0.0; n];
    let step: isize = if direction == Direction::Outward { 1 } else { -1 };
    let at = |i: usize, s: isize| (i as isize + s) as usize;
    let i1 = at(i0, step);
    values[i0] = u0;
    values[i1] = u1;
    let range = if step > 0 { (i0, stop) } else { (stop, i0) };
    if u0 == 0.0 && u1 == 0.0 {
        return Ok(Trajectory { values, log_scale, range });
    }

    let method = method(grid);
    let f = |i: usize| -> f64 {
        let q = sampled.q(i, energy);
        match method {
            Method::Numerov { log: true, .. } => r[i] * r[i] * q - 0.25,
            _ => q,
        }
    };
    let to_w = |i: usize, u: f64| match method {
        Method::Numerov { log: true, .. } => u / r[i].sqrt(),
        _ => u,
    };
    let to_u = |i: usize, w: f64| match method {
        Method::Numerov { log: true, .. } => w * r[i].sqrt(),
        _ => w,
    };

    let (mut w_prev, mut w_cur) = (to_w(i0, u0), to_w(i1, u1));
    let (mut f_prev, mut f_cur) = (f(i0), f(i1));
    let mut scale = 0.0;
    let mut i = i1;
    while i != stop {
        let next = at(i, step);
        let f_next = f(next);
        let w_next = match method {
            Method::Numerov { c, .. } => {
                (2.0 * (1.0 - 5.0 * c * f_cur) * w_cur - (1.0 + c * f_prev) * w_prev) / (1.0 + c * f_next)
            }
            Method::ThreePoint => {
                let [wm, w0, wp] = second_derivative_weights(r[i] - r[i - 1], r[i + 1] - r[i]);
                let (w_far, w_near) = if step > 0 { (wp, wm) } else { (wm, wp) };
                -((w0 + f_cur) * w_cur + w_near * w_prev) / w_far
            }
        };
        if !w_next.is_finite() {
            return Err(EigenError::Overflow { index: next });
        }
        w_prev = w_cur;
        w_cur = w_next;
        if w_cur.abs() > RESCALE_THRESHOLD {
            let s = w_cur.abs();
            w_cur /= s;
            w_prev /= s;
            scale += s.ln();
        }
        values[next] = to_u(next, w_cur);
        log_scale[next] = scale;
        f_prev = f_cur;
        f_cur = f_next;
        i = next;
    }
    Ok(Trajectory { values, log_scale, range })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::local_coefficient;
    use crate::grid::make_grid;
    use crate::potential::PotentialModel;
    use crate::solution::EquationKind;

    fn schrodinger() -> EquationKind {
        EquationKind::schrodinger(1.0).unwrap()
    }

    #[test]
    fn free_particle_below_threshold_is_sinh() {
        let coef = local_coefficient(&PotentialModel::zero(), 0, schrodinger()).unwrap();
        let grid = make_grid(GridScheme::Uniform, 0.0, 1.0, 10_001).unwrap();
        let h = grid.points()[1];
        let s2 = 2f64.sqrt();
        // u ≈ r at the first point, continued by its Taylor step.
        let t = numerov_integrate(&coef, -1.0, &grid, Start::Slope { value: h, slope: 1.0 }, Direction::Outward).unwrap();
        let exact = |r: f64| (s2 * r).sinh() / s2;
        let end = *t.values().last().unwrap();
        assert!(((end - exact(1.0)) / exact(1.0)).abs() < 1e-8, "{end}");
        assert_eq!(t.values()[0], 0.0);
    }

    #[test]
    fn harmonic_ground_state_shape() {
        let coef = local_coefficient(&PotentialModel::harmonic(1.0).unwrap(), 0, schrodinger()).unwrap();
        let grid = make_grid(GridScheme::Uniform, 0.0, 3.0, 6001).unwrap();
        let exact = |r: f64| r * (-0.5 * r * r).exp();
        let r = grid.points();
        let t = numerov_integrate(&coef, 1.5, &grid, Start::Values { first: exact(r[1]), second: exact(r[2]) }, Direction::Outward)
            .unwrap();
        for i in (1..r.len()).step_by(50) {
            assert!((t.values()[i] / exact(r[i]) - 1.0).abs() < 1e-6, "r = {}", r[i]);
        }
    }

    #[test]
    fn log_grid_matches_uniform() {
        let coef = local_coefficient(&PotentialModel::coulomb(1.0).unwrap(), 0, schrodinger()).unwrap();
        let grid = make_grid(GridScheme::LogSpaced, 1e-6, 10.0, 8000).unwrap();
        let r = grid.points();
        let exact = |r: f64| r * (-r).exp();
        let t = numerov_integrate(&coef, -0.5, &grid, Start::Values { first: exact(r[0]), second: exact(r[1]) }, Direction::Outward)
            .unwrap();
        let i = r.partition_point(|&x| x < 3.0);
        assert!((t.values()[i] / exact(r[i]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_start_gives_zero() {
        let coef = local_coefficient(&PotentialModel::coulomb(1.0).unwrap(), 2, schrodinger()).unwrap();
        let grid = make_grid(GridScheme::PowerStretched { exponent: 2.0 }, 0.01, 5.0, 300).unwrap();
        for dir in [Direction::Outward, Direction::Inward] {
            let t = numerov_integrate(&coef, -0.3, &grid, Start::Values { first: 0.0, second: 0.0 }, dir).unwrap();
            assert!(t.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn inward_needs_forbidden_tail() {
        let coef = local_coefficient(&PotentialModel::zero(), 0, schrodinger()).unwrap();
        let grid = make_grid(GridScheme::LogSpaced, 1e-3, 10.0, 100).unwrap();
        let r = numerov_integrate(&coef, 0.5, &grid, Start::Slope { value: 1.0, slope: 0.0 }, Direction::Inward);
        assert!(matches!(r, Err(EigenError::NotClassicallyBound { .. })));
    }

    #[test]
    fn deep_tails_are_rescaled() {
        let coef = local_coefficient(&PotentialModel::harmonic(1.0).unwrap(), 0, schrodinger()).unwrap();
        let grid = make_grid(GridScheme::LogSpaced, 1e-4, 30.0, 20_000).unwrap();
        let t = numerov_integrate(&coef, 1.7, &grid, Start::Slope { value: 1e-4, slope: 1.0 }, Direction::Outward).unwrap();
        assert!(t.was_rescaled());
        assert!(t.values().iter().all(|v| v.is_finite() && v.abs() <= RESCALE_THRESHOLD * 10.0));
        // Growth over the last decade of the tail is e^{r²/2}-like.
        let n = grid.len();
        let ln_ratio = t.relative(n - 1, n - 101).abs().ln();
        let (a, b) = (grid.points()[n - 101], grid.points()[n - 1]);
        assert!((ln_ratio / (0.5 * (b * b - a * a)) - 1.0).abs() < 0.05);
    }
}
