//! Numerical checks of the point source hidden in the reduced radial Laplacian.
//!
//! For `R = u/r` the divergence theorem gives the exact ball integral
//!
//! ```text
//! ∫_{|x|<a} Δ(u/r) d³x = 4π a² (u/r)'(a) = 4π (a u'(a) - u(a)),
//! ```
//!
//! whose `a -> 0` limit is `-4π u(0)`. Expanding `u` about the origin shows the
//! remainder has no linear term: `a u' - u = -u(0) + u''(0) a²/2 + O(a³)`.

mod identity;
pub mod library;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::error::CoreError;
use crate::fd;
use crate::grid::{make_grid, GridScheme};
use crate::quadrature::quadrature;
use crate::solution::RadialSolution;

pub use identity::{operator_identity_check, IdentityCheck};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionalError {
    #[error("radius {a} outside the test function domain (0, {r_max}]")]
    DomainError { a: f64, r_max: f64 },
    #[error("invalid radii schedule: {0}")]
    ScheduleError(String),
    #[error("invalid test function `{label}`: {reason}")]
    InvalidTestFunction { label: String, reason: String },
    #[error("grid too coarse: {interior} interior points, need at least 5")]
    GridTooCoarse { interior: usize },
    #[error("grid must exclude the origin")]
    GridIncludesOrigin,
    #[error("extrapolation system is singular")]
    SingularExtrapolation,
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl DistributionalError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::DomainError { .. } => "DomainError",
            Self::ScheduleError(_) => "ScheduleError",
            Self::InvalidTestFunction { .. } => "InvalidTestFunction",
            Self::GridTooCoarse { .. } => "GridTooCoarse",
            Self::GridIncludesOrigin => "GridIncludesOrigin",
            Self::SingularExtrapolation => "SingularExtrapolation",
            Self::Core(e) => e.name(),
        }
    }
}

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Exponents of the flux remainder for smooth `u`: `a², a³, a⁴`.
pub const SMOOTH_REMAINDER: [f64; 3] = [2.0, 3.0, 4.0];

const VALIDATION_POINTS: usize = 5;
const VALIDATION_TOLERANCE: f64 = 1e-6;
const VALIDATION_SEED: u64 = 0x5eed_0f_0419;

/// A radial profile `u(r)` on `[0, r_max]` with its analytic derivative and `u(0)`.
#[derive(Clone)]
pub struct TestFunction {
    label: String,
    value_at_zero: f64,
    r_max: f64,
    u: RadialFn,
    du: RadialFn,
    d2u: Option<RadialFn>,
    remainder_exponents: Vec<f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("value_at_zero", &self.value_at_zero)
            .field("r_max", &self.r_max)
            .finish_non_exhaustive()
    }
}

impl TestFunction {
    /// Validates the derivative against a central difference of `u` at a few
    /// pseudo-random radii before accepting the function.
    pub fn new(
        label: impl Into<String>,
        value_at_zero: f64,
        r_max: f64,
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        du: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, DistributionalError> {
        Self::from_arcs(label.into(), value_at_zero, r_max, Arc::new(u), Arc::new(du))
    }

    fn from_arcs(
        label: String,
        value_at_zero: f64,
        r_max: f64,
        u: RadialFn,
        du: RadialFn,
    ) -> Result<Self, DistributionalError> {
        let tf = Self { label, value_at_zero, r_max, u, du, d2u: None, remainder_exponents: SMOOTH_REMAINDER.to_vec() };
        tf.validate()?;
        Ok(tf)
    }

    fn invalid(&self, reason: String) -> DistributionalError {
        DistributionalError::InvalidTestFunction { label: self.label.clone(), reason }
    }

    fn validate(&self) -> Result<(), DistributionalError> {
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(self.invalid(format!("r_max must be positive, got {}", self.r_max)));
        }
        if !self.value_at_zero.is_finite() {
            return Err(self.invalid("u(0) must be finite".into()));
        }
        let u0 = (self.u)(0.0);
        if (u0 - self.value_at_zero).abs() > 1e-12 * self.value_at_zero.abs().max(1.0) {
            return Err(self.invalid(format!("evaluator gives u(0) = {u0}, declared {}", self.value_at_zero)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
        for _ in 0..VALIDATION_POINTS {
            let r = rng.gen_range(0.05..0.95) * self.r_max;
            let h = 1e-6 * r.max(1e-3);
            let fd = ((self.u)(r + h) - (self.u)(r - h)) / (2.0 * h);
            let d = (self.du)(r);
            if !(d.is_finite() && fd.is_finite()) {
                return Err(self.invalid(format!("non-finite value near r = {r}")));
            }
            if (d - fd).abs() > VALIDATION_TOLERANCE * d.abs().max(1.0) {
                return Err(self.invalid(format!("derivative {d} disagrees with finite difference {fd} at r = {r}")));
            }
        }
        Ok(())
    }

    pub fn with_second_derivative(mut self, d2u: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2u = Some(Arc::new(d2u));
        self
    }

    /// Exponents `e_k` in the flux remainder `sum c_k a^{e_k}` used for extrapolation.
    pub fn with_remainder_exponents(mut self, exponents: Vec<f64>) -> Self {
        self.remainder_exponents = exponents;
        self
    }

    /// `alpha f + beta g` on the common domain.
    pub fn linear_combination(alpha: f64, f: &Self, beta: f64, g: &Self) -> Result<Self, DistributionalError> {
        let (fu, gu, fd, gd) = (f.u.clone(), g.u.clone(), f.du.clone(), g.du.clone());
        let mut exps: Vec<f64> = f.remainder_exponents.iter().chain(&g.remainder_exponents).copied().collect();
        exps.sort_by(f64::total_cmp);
        exps.dedup();
        let mut tf = Self::from_arcs(
            format!("{alpha}*{}+{beta}*{}", f.label, g.label),
            alpha * f.value_at_zero + beta * g.value_at_zero,
            f.r_max.min(g.r_max),
            Arc::new(move |r| alpha * fu(r) + beta * gu(r)),
            Arc::new(move |r| alpha * fd(r) + beta * gd(r)),
        )?;
        if let (Some(f2), Some(g2)) = (f.d2u.clone(), g.d2u.clone()) {
            tf.d2u = Some(Arc::new(move |r| alpha * f2(r) + beta * g2(r)));
        }
        tf.remainder_exponents = exps;
        Ok(tf)
    }

    /// Wraps a solved eigenfunction: the Frobenius expansion covers the region next to
    /// the origin and cubic Hermite interpolation covers the rest of the grid.
    pub fn from_solution(sol: &RadialSolution) -> Result<Self, DistributionalError> {
        let label = format!("{} (E = {})", sol.potential_label(), sol.energy());
        let origin = sol.origin_expansion().cloned().ok_or_else(|| DistributionalError::InvalidTestFunction {
            label: label.clone(),
            reason: "solution carries no origin expansion".into(),
        })?;
        let grid = sol.grid();
        let start = grid.first_positive();
        let r: Arc<[f64]> = grid.points()[start..].into();
        let values: Arc<[f64]> = sol.u()[start..].into();
        let slopes: Arc<[f64]> = fd::nodal_derivatives(&r, &values).into();
        let switch = origin.radius.max(r[0]);
        let (u0, _) = origin.evaluate(0.0);
        // Remainder powers of the flux: the series powers, except r^1 whose term cancels
        // in a u' - u.
        let a = origin.exponent;
        let mut exps: Vec<f64> = origin
            .terms
            .iter()
            .map(|&(e, _)| a + e)
            .chain([a + 3.0, a + 4.0])
            .filter(|p| (p - 1.0).abs() > 1e-9)
            .collect();
        exps.sort_by(f64::total_cmp);
        exps.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
        exps.truncate(4);

        let hermite = {
            let (r, values, slopes, origin) = (r.clone(), values.clone(), slopes.clone(), origin.clone());
            move |x: f64, derivative: bool| -> f64 {
                if x <= switch {
                    let (u, du) = origin.evaluate(x);
                    return if derivative { du } else { u };
                }
                hermite_eval(&r, &values, &slopes, x, derivative)
            }
        };
        let h2 = hermite.clone();
        let tf = Self::from_arcs(
            label,
            u0,
            grid.r_max(),
            Arc::new(move |x| hermite(x, false)),
            Arc::new(move |x| h2(x, true)),
        )?;
        Ok(tf.with_remainder_exponents(exps))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.u)(r)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        (self.du)(r)
    }

    /// `u''(r)`, analytic when supplied, otherwise a difference of the derivative.
    pub fn second_derivative(&self, r: f64) -> f64 {
        if let Some(d2) = &self.d2u {
            return d2(r);
        }
        let h = 1e-5 * r.max(1e-2);
        if r < h {
            (-3.0 * (self.du)(r) + 4.0 * (self.du)(r + h) - (self.du)(r + 2.0 * h)) / (2.0 * h)
        } else {
            ((self.du)(r + h) - (self.du)(r - h)) / (2.0 * h)
        }
    }

    pub fn remainder_exponents(&self) -> &[f64] {
        &self.remainder_exponents
    }
}

fn hermite_eval(r: &[f64], f: &[f64], d: &[f64], x: f64, derivative: bool) -> f64 {
    let n = r.len();
    let j = r.partition_point(|&p| p <= x).clamp(1, n - 1);
    let (x0, x1) = (r[j - 1], r[j]);
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (f0, f1, d0, d1) = (f[j - 1], f[j], d[j - 1] * h, d[j] * h);
    if derivative {
        let h00 = 6.0 * t * t - 6.0 * t;
        let h10 = 3.0 * t * t - 4.0 * t + 1.0;
        let h01 = -h00;
        let h11 = 3.0 * t * t - 2.0 * t;
        (h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1) / h
    } else {
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1
    }
}

/// `∫_{|x|<a} Δ(u/r) d³x` in closed surface-flux form `4π (a u'(a) - u(a))`.
pub fn laplacian_ball_flux(f: &TestFunction, a: f64) -> Result<f64, DistributionalError> {
    if !(a > 0.0 && a <= f.r_max) {
        return Err(DistributionalError::DomainError { a, r_max: f.r_max });
    }
    Ok(4.0 * PI * (a * f.derivative(a) - f.value(a)))
}

/// Flux values on a shrinking schedule and their extrapolated `a -> 0` limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxReport {
    pub label: String,
    pub radii: Vec<f64>,
    pub flux_values: Vec<f64>,
    pub extrapolated_limit: f64,
    /// `-4π u(0)`.
    pub predicted: f64,
    pub abs_error: f64,
}

fn check_schedule(radii: &[f64]) -> Result<(), DistributionalError> {
    if radii.len() < 3 {
        return Err(DistributionalError::ScheduleError(format!("need at least 3 radii, got {}", radii.len())));
    }
    if let Some(a) = radii.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(DistributionalError::ScheduleError(format!("radius {a} is not positive")));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(DistributionalError::ScheduleError("radii must be strictly decreasing".into()));
    }
    Ok(())
}

/// Limit at `a = 0` of `L + sum_k c_k a^{e_k}` fitted exactly through the smallest
/// `exponents.len() + 1` radii (or all of them, if fewer).
pub fn richardson_limit(radii: &[f64], values: &[f64], exponents: &[f64]) -> Result<f64, DistributionalError> {
    let k = radii.len().min(exponents.len() + 1);
    let tail = radii.len() - k;
    let (a, f) = (&radii[tail..], &values[tail..]);
    let scale = a.iter().copied().fold(0.0, f64::max);
    let m = DMatrix::from_fn(k, k, |i, j| if j == 0 { 1.0 } else { (a[i] / scale).powf(exponents[j - 1]) });
    let rhs = DVector::from_column_slice(f);
    let sol = m.lu().solve(&rhs).ok_or(DistributionalError::SingularExtrapolation)?;
    Ok(sol[0])
}

/// Delta strength left by `Δ(u/r)` at the origin, predicted to be `-4π u(0)`.
pub fn delta_residual(f: &TestFunction, radii: &[f64]) -> Result<FluxReport, DistributionalError> {
    check_schedule(radii)?;
    let flux_values = radii.iter().map(|&a| laplacian_ball_flux(f, a)).collect::<Result<Vec<_>, _>>()?;
    let extrapolated_limit = richardson_limit(radii, &flux_values, &f.remainder_exponents)?;
    let predicted = -4.0 * PI * f.value_at_zero;
    Ok(FluxReport {
        label: f.label.clone(),
        radii: radii.to_vec(),
        flux_values,
        extrapolated_limit,
        predicted,
        abs_error: (extrapolated_limit - predicted).abs(),
    })
}

/// Both sides of `Δ(u/r) = (1/r) u'' - 4π δ³(x) u` integrated over shrinking balls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedIdentityReport {
    pub label: String,
    pub radii: Vec<f64>,
    /// Left side, `4π (a u'(a) - u(a))`.
    pub flux_values: Vec<f64>,
    /// Regular part, `4π ∫_0^a r u''(r) dr` by quadrature.
    pub smooth_values: Vec<f64>,
    pub gap_values: Vec<f64>,
    pub extrapolated_gap: f64,
    pub predicted: f64,
    pub abs_error: f64,
}

const SMOOTH_QUADRATURE_POINTS: usize = 4001;

pub fn modified_identity_check(f: &TestFunction, radii: &[f64]) -> Result<ModifiedIdentityReport, DistributionalError> {
    check_schedule(radii)?;
    let mut flux_values = Vec::with_capacity(radii.len());
    let mut smooth_values = Vec::with_capacity(radii.len());
    for &a in radii {
        flux_values.push(laplacian_ball_flux(f, a)?);
        let grid = make_grid(GridScheme::Uniform, 0.0, a, SMOOTH_QUADRATURE_POINTS)?;
        let integrand: Vec<f64> = grid.points().iter().map(|&r| r * f.second_derivative(r)).collect();
        smooth_values.push(4.0 * PI * quadrature(&integrand, &grid)?);
    }
    let gap_values: Vec<f64> = flux_values.iter().zip(&smooth_values).map(|(l, s)| l - s).collect();
    let extrapolated_gap = richardson_limit(radii, &gap_values, &f.remainder_exponents)?;
    let predicted = -4.0 * PI * f.value_at_zero;
    Ok(ModifiedIdentityReport {
        label: f.label.clone(),
        radii: radii.to_vec(),
        flux_values,
        smooth_values,
        gap_values,
        extrapolated_gap,
        predicted,
        abs_error: (extrapolated_gap - predicted).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const SCHEDULE: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

    fn exp_decay() -> TestFunction {
        TestFunction::new("exp", 1.0, 10.0, |r| (-r).exp(), |r| -(-r).exp()).unwrap()
    }

    #[test]
    fn flux_closed_form() {
        let a: f64 = 0.01;
        let expected = 4.0 * PI * (-a * (-a).exp() - (-a).exp());
        assert_abs_diff_eq!(laplacian_ball_flux(&exp_decay(), a).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(expected, -12.565746, epsilon = 1e-6);
        let linear = TestFunction::new("r", 0.0, 5.0, |r| r, |_| 1.0).unwrap();
        for a in [0.3, 1.0, 4.0] {
            assert_eq!(laplacian_ball_flux(&linear, a).unwrap(), 0.0);
        }
        assert!(matches!(laplacian_ball_flux(&linear, 6.0), Err(DistributionalError::DomainError { .. })));
        assert!(laplacian_ball_flux(&linear, 0.0).is_err());
    }

    #[test]
    fn residual_examples() {
        let r = delta_residual(&exp_decay(), &SCHEDULE).unwrap();
        assert_abs_diff_eq!(r.extrapolated_limit, -4.0 * PI, epsilon = 1e-6);
        let sine = TestFunction::new("sin", 0.0, 10.0, f64::sin, f64::cos).unwrap();
        assert_abs_diff_eq!(delta_residual(&sine, &SCHEDULE).unwrap().extrapolated_limit, 0.0, epsilon = 1e-8);
        let quad = TestFunction::new("2+r^2", 2.0, 10.0, |r| 2.0 + r * r, |r| 2.0 * r).unwrap();
        assert_abs_diff_eq!(delta_residual(&quad, &SCHEDULE).unwrap().extrapolated_limit, -8.0 * PI, epsilon = 1e-6);
    }

    #[test]
    fn schedule_validation() {
        let f = exp_decay();
        assert!(matches!(delta_residual(&f, &[0.1, 0.05]), Err(DistributionalError::ScheduleError(_))));
        assert!(matches!(delta_residual(&f, &[0.1, 0.2, 0.05]), Err(DistributionalError::ScheduleError(_))));
        assert!(matches!(delta_residual(&f, &[0.1, 0.05, 0.0]), Err(DistributionalError::ScheduleError(_))));
    }

    #[test]
    fn bad_derivative_is_rejected() {
        let r = TestFunction::new("wrong", 1.0, 10.0, |r| (-r).exp(), |r| (-r).exp());
        assert!(matches!(r, Err(DistributionalError::InvalidTestFunction { .. })));
        let r = TestFunction::new("wrong u0", 2.0, 10.0, |r| (-r).exp(), |r| -(-r).exp());
        assert!(r.is_err());
    }

    #[test]
    fn modified_identity_examples() {
        let f = exp_decay().with_second_derivative(|r| (-r).exp());
        let rep = modified_identity_check(&f, &SCHEDULE).unwrap();
        assert_abs_diff_eq!(rep.extrapolated_gap, -4.0 * PI, epsilon = 1e-4);
        // Independent route: ∫_0^a r e^{-r} dr = 1 - (1 + a) e^{-a}.
        for (a, s) in rep.radii.iter().zip(&rep.smooth_values) {
            assert_abs_diff_eq!(*s, 4.0 * PI * (1.0 - (1.0 + a) * (-a).exp()), epsilon = 1e-9);
        }
        let g = TestFunction::new("r e^-r", 0.0, 10.0, |r| r * (-r).exp(), |r| (1.0 - r) * (-r).exp()).unwrap();
        assert_abs_diff_eq!(modified_identity_check(&g, &SCHEDULE).unwrap().extrapolated_gap, 0.0, epsilon = 1e-6);
        let one = TestFunction::new("1", 1.0, 10.0, |_| 1.0, |_| 0.0).unwrap();
        let rep = modified_identity_check(&one, &SCHEDULE).unwrap();
        assert!(rep.smooth_values.iter().all(|&s| s == 0.0));
        assert!(rep.flux_values.iter().all(|&v| (v + 4.0 * PI).abs() < 1e-14));
    }

    #[test]
    fn richardson_recovers_polynomial_limits() {
        let radii = [0.4, 0.2, 0.1, 0.05];
        let vals: Vec<f64> = radii.iter().map(|a: &f64| 3.0 - a * a + 0.5 * a.powi(3) + a.powi(4)).collect();
        assert_abs_diff_eq!(richardson_limit(&radii, &vals, &SMOOTH_REMAINDER).unwrap(), 3.0, epsilon = 1e-13);
    }
}
