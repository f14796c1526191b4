//! Bound state of the repulsive inverse-square potential produced by mixing in the
//! singular branch at the origin, in units `2m = 1`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::function::gamma::gamma;

use super::numerov::{numerov_integrate, Direction, Start};
use super::{local_coefficient, EigenError};
use crate::grid::{make_grid, GridScheme};
use crate::indicial::{admissible_branches, Branch, IndicialData};
use crate::potential::PotentialModel;
use crate::solution::{BoundaryPolicy, EquationKind};

const FIT_WINDOW: (f64, f64) = (1e-4, 1e-3);
const FIT_TERMS: usize = 4;
const GRID_POINTS: usize = 20_000;
/// Outer radius in units of the decay length `1/κ`.
const TAIL_LENGTHS: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaeDemoResult {
    pub p: f64,
    /// `c₋ / c₊` at the origin.
    pub beta: f64,
    pub energy: f64,
    pub closed_form_kappa: f64,
    pub numeric_kappa: f64,
    pub relative_difference: f64,
    /// Whether the singular branch this state needs survives each boundary policy.
    pub minus_branch_dirichlet: bool,
    pub minus_branch_square_integrable: bool,
}

fn check_p(p: f64) -> Result<(), EigenError> {
    if !(p > 0.5 && p < 1.0) {
        return Err(EigenError::OutOfRange { p });
    }
    Ok(())
}

/// `β(κ) = Γ(P)/Γ(-P) (κ/2)^{-2P}`, the mixing of `sqrt(r) K_P(κ r)` near the origin.
pub fn beta_for_kappa(p: f64, kappa: f64) -> Result<f64, EigenError> {
    check_p(p)?;
    Ok(gamma(p) / gamma(-p) * (0.5 * kappa).powf(-2.0 * p))
}

/// `κ = 2 [(Γ(P)/Γ(-P)) / β]^{1/(2P)}`.
pub fn sae_closed_form_kappa(p: f64, beta: f64) -> Result<f64, EigenError> {
    check_p(p)?;
    let ratio = gamma(p) / gamma(-p) / beta;
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(EigenError::NoRealSolution { p, beta });
    }
    Ok(2.0 * ratio.powf(0.5 / p))
}

/// `r^{1/2 ± P} sum_k c_k r^{2k}` with `c_k = κ² c_{k-1} / (4k(k ± P))`.
fn branch_basis(p: f64, sign: f64, kappa: f64, r: f64) -> f64 {
    let (mut c, mut sum) = (1.0, 1.0);
    for k in 1..FIT_TERMS {
        let k = k as f64;
        c *= kappa * kappa * r * r / (4.0 * k * (k + sign * p));
        sum += c;
    }
    r.powf(0.5 + sign * p) * sum
}

/// Mixing ratio of the decaying solution at energy `-κ²`, from inward integration and a
/// least-squares fit of both branches over the small-`r` window.
fn numeric_beta(p: f64, kappa: f64) -> Result<f64, EigenError> {
    let g = p * p - 0.25;
    let model = PotentialModel::inverse_square(g)?;
    let coef = local_coefficient(&model, 0, EquationKind::schrodinger(0.5)?)?;
    let r_max = (TAIL_LENGTHS / kappa).max(1.0);
    let grid = make_grid(GridScheme::LogSpaced, 0.1 * FIT_WINDOW.0, r_max, GRID_POINTS)?;
    let r = grid.points();
    let n = r.len();
    let tail = (-kappa * (r[n - 1] - r[n - 2])).exp();
    let t = numerov_integrate(&coef, -kappa * kappa, &grid, Start::Values { first: tail, second: 1.0 }, Direction::Inward)?;
    let rows: Vec<usize> = (0..n).filter(|&i| r[i] >= FIT_WINDOW.0 && r[i] <= FIT_WINDOW.1).collect();
    let anchor = rows[rows.len() / 2];
    let (s_plus, s_minus) = (branch_basis(p, 1.0, kappa, r[anchor]), branch_basis(p, -1.0, kappa, r[anchor]));
    let a = DMatrix::from_fn(rows.len(), 2, |i, j| {
        let x = r[rows[i]];
        if j == 0 {
            branch_basis(p, 1.0, kappa, x) / s_plus
        } else {
            branch_basis(p, -1.0, kappa, x) / s_minus
        }
    });
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|&i| t.relative(i, anchor)));
    let coeffs = a
        .svd(true, true)
        .solve(&b, 1e-15)
        .map_err(|e| EigenError::InvalidConfig(format!("branch fit failed: {e}")))?;
    Ok((coeffs[1] / s_minus) / (coeffs[0] / s_plus))
}

pub fn sae_bound_state(p: f64, beta: f64) -> Result<SaeDemoResult, EigenError> {
    let closed_form_kappa = sae_closed_form_kappa(p, beta)?;

    // Secant on ln κ; ln(β_num/β) is close to linear with slope -2P.
    let residual = |x: f64| -> Result<f64, EigenError> { Ok((numeric_beta(p, x.exp())? / beta).ln()) };
    let (mut x0, mut x1) = (0.0, 0.5);
    let (mut f0, mut f1) = (residual(x0)?, residual(x1)?);
    for _ in 0..50 {
        if !f1.is_finite() {
            return Err(EigenError::NoRealSolution { p, beta });
        }
        if f1 == f0 || (x1 - x0).abs() < 1e-13 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        (x0, f0) = (x1, f1);
        x1 = x2;
        f1 = residual(x1)?;
    }
    let numeric_kappa = x1.exp();

    let ind = IndicialData::from_p(p, 0)?;
    let dirichlet = admissible_branches(&ind, BoundaryPolicy::DirichletOrigin)?;
    let square = admissible_branches(&ind, BoundaryPolicy::SquareIntegrableOnly)?;
    Ok(SaeDemoResult {
        p,
        beta,
        energy: -closed_form_kappa * closed_form_kappa,
        closed_form_kappa,
        numeric_kappa,
        relative_difference: (numeric_kappa - closed_form_kappa).abs() / closed_form_kappa,
        minus_branch_dirichlet: dirichlet.admits(Branch::Minus),
        minus_branch_square_integrable: square.admits(Branch::Minus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_ratio_sign() {
        for p in [0.55, 0.75, 0.95] {
            assert!(gamma(p) / gamma(-p) < 0.0);
        }
        assert_relative_eq!(gamma(-0.75), -4.834146544295877, max_relative = 1e-12);
    }

    #[test]
    fn unit_kappa_example() {
        let beta = beta_for_kappa(0.75, 1.0).unwrap();
        let r = sae_bound_state(0.75, beta).unwrap();
        assert_relative_eq!(r.closed_form_kappa, 1.0, max_relative = 1e-13);
        assert_relative_eq!(r.energy, -1.0, max_relative = 1e-12);
        assert!((r.numeric_kappa - 1.0).abs() < 1e-4, "{}", r.numeric_kappa);
        assert!(!r.minus_branch_dirichlet);
        assert!(r.minus_branch_square_integrable);
    }

    #[test]
    fn scaling_law() {
        for p in [0.55, 0.8] {
            let beta = -3.0;
            let k = sae_closed_form_kappa(p, beta).unwrap();
            for s in [2.0, 10.0] {
                let ks = sae_closed_form_kappa(p, beta * f64::powf(s, 2.0 * p)).unwrap();
                assert_relative_eq!(ks, k / s, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(sae_bound_state(0.75, 1.0), Err(EigenError::NoRealSolution { .. })));
        assert!(matches!(sae_bound_state(0.75, 0.0), Err(EigenError::NoRealSolution { .. })));
        assert!(matches!(sae_bound_state(0.5, -1.0), Err(EigenError::OutOfRange { .. })));
        assert!(matches!(sae_bound_state(1.0, -1.0), Err(EigenError::OutOfRange { .. })));
    }
}
