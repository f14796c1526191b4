use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::grid::RadialGrid;
use crate::quadrature::trapezoid;

/// Which wave equation the reduced radial function obeys. Units have ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EquationKind {
    /// `u'' + [2m(E - V) - l(l+1)/r^2] u = 0`
    Schrodinger { mass: f64 },
    /// `u'' + [(E - V)^2 - m^2 - l(l+1)/r^2] u = 0`
    KleinGordon { mass: f64 },
}

impl EquationKind {
    pub fn schrodinger(mass: f64) -> Result<Self, CoreError> {
        Self::Schrodinger { mass }.validated()
    }

    pub fn klein_gordon(mass: f64) -> Result<Self, CoreError> {
        Self::KleinGordon { mass }.validated()
    }

    pub fn validated(self) -> Result<Self, CoreError> {
        let m = self.mass();
        if m.is_finite() && m > 0.0 {
            Ok(self)
        } else {
            Err(CoreError::InvalidEquation(format!("mass must be positive and finite, got {m}")))
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Self::Schrodinger { mass } | Self::KleinGordon { mass } => mass,
        }
    }

    pub fn is_klein_gordon(&self) -> bool {
        matches!(self, Self::KleinGordon { .. })
    }
}

/// What is demanded of `u` at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    /// `u(0) = 0`, required for the reduced equation to agree with the 3-D one.
    DirichletOrigin,
    /// Only `∫ |u|^2 dr < ∞` near the origin.
    SquareIntegrableOnly,
}

/// Number of strict sign changes, skipping exact zeros.
pub fn count_nodes(u: &[f64]) -> usize {
    let mut nodes = 0;
    let mut previous = 0.0f64;
    for &x in u {
        if x == 0.0 || x.is_nan() {
            continue;
        }
        if previous != 0.0 && previous.signum() != x.signum() {
            nodes += 1;
        }
        previous = x;
    }
    nodes
}

/// Near-origin Frobenius form `amplitude * r^exponent * sum_k c_k r^{e_k}` of a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginExpansion {
    pub exponent: f64,
    /// `(e_k, c_k)` with `e_0 = 0`, `c_0 = 1`.
    pub terms: Vec<(f64, f64)>,
    pub amplitude: f64,
    /// Radius below which the truncated expansion is trusted.
    pub radius: f64,
}

impl OriginExpansion {
    /// `(u(r), u'(r))` from the truncated series.
    pub fn evaluate(&self, r: f64) -> (f64, f64) {
        if r == 0.0 {
            let u0 = if self.exponent == 0.0 { self.amplitude } else { 0.0 };
            let du0 = if self.exponent == 1.0 { self.amplitude } else { 0.0 };
            return (u0, du0);
        }
        let (mut u, mut du) = (0.0, 0.0);
        for &(e, c) in &self.terms {
            let p = self.exponent + e;
            let rp = r.powf(p);
            u += c * rp;
            du += c * p * rp / r;
        }
        (self.amplitude * u, self.amplitude * du)
    }
}

/// Reduced radial function `u = r R(r)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    grid: RadialGrid,
    u: Vec<f64>,
    energy: f64,
    l: u32,
    node_count: usize,
    norm: f64,
    policy: BoundaryPolicy,
    potential_label: String,
    origin: Option<OriginExpansion>,
}

impl RadialSolution {
    pub fn new(
        grid: RadialGrid,
        u: Vec<f64>,
        energy: f64,
        l: u32,
        policy: BoundaryPolicy,
        potential_label: impl Into<String>,
    ) -> Result<Self, CoreError> {
        if u.len() != grid.len() {
            return Err(CoreError::LengthMismatch { values: u.len(), points: grid.len() });
        }
        if policy == BoundaryPolicy::DirichletOrigin && grid.includes_origin() && u[0] != 0.0 {
            return Err(CoreError::InvalidSolution(format!(
                "Dirichlet policy requires u(0) = 0, got {}",
                u[0]
            )));
        }
        let node_count = count_nodes(interior(&u));
        let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
        let norm = trapezoid(&sq, grid.points()).sqrt();
        Ok(Self {
            grid,
            u,
            energy,
            l,
            node_count,
            norm,
            policy,
            potential_label: potential_label.into(),
            origin: None,
        })
    }

    pub fn with_origin_expansion(mut self, origin: OriginExpansion) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `sqrt(∫ u^2 dr)`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn policy(&self) -> BoundaryPolicy {
        self.policy
    }

    pub fn potential_label(&self) -> &str {
        &self.potential_label
    }

    pub fn origin_expansion(&self) -> Option<&OriginExpansion> {
        self.origin.as_ref()
    }
}

fn interior(u: &[f64]) -> &[f64] {
    if u.len() <= 2 {
        &[]
    } else {
        &u[1..u.len() - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridScheme};
    use std::f64::consts::PI;

    #[test]
    fn node_counting() {
        assert_eq!(count_nodes(&[1.0, -1.0, 1.0]), 2);
        assert_eq!(count_nodes(&[0.0, 1.0, 0.0, -2.0, 0.0]), 1);
        assert_eq!(count_nodes(&[0.0, 0.0]), 0);
        let ground: Vec<f64> = (0..100).map(|i| i as f64 * 0.1 * (-(i as f64) * 0.1).exp()).collect();
        assert_eq!(count_nodes(&ground), 0);
        let third: Vec<f64> = (0..301).map(|i| (3.0 * PI * i as f64 / 300.0).sin()).collect();
        assert_eq!(count_nodes(&third[1..300]), 2);
    }

    #[test]
    fn mass_must_be_positive() {
        assert!(EquationKind::schrodinger(0.0).is_err());
        assert!(EquationKind::klein_gordon(-1.0).is_err());
        assert_eq!(EquationKind::klein_gordon(2.0).unwrap().mass(), 2.0);
    }

    #[test]
    fn dirichlet_solutions_store_exact_zero() {
        let g = make_grid(GridScheme::Uniform, 0.0, 1.0, 5).unwrap();
        let bad = RadialSolution::new(g.clone(), vec![1e-300, 1.0, 1.0, 1.0, 0.0], -1.0, 0, BoundaryPolicy::DirichletOrigin, "x");
        assert!(bad.is_err());
        let ok = RadialSolution::new(g, vec![0.0, 1.0, -1.0, 1.0, 0.0], -1.0, 0, BoundaryPolicy::DirichletOrigin, "x").unwrap();
        assert_eq!(ok.node_count(), 2);
    }

    #[test]
    fn origin_expansion_at_zero() {
        let e = OriginExpansion { exponent: 1.0, terms: vec![(0.0, 1.0), (1.0, -1.0)], amplitude: 2.0, radius: 1e-3 };
        assert_eq!(e.evaluate(0.0), (0.0, 2.0));
        let (u, du) = e.evaluate(0.5);
        assert!((u - 2.0 * (0.5 - 0.25)).abs() < 1e-15);
        assert!((du - 2.0 * (1.0 - 1.0)).abs() < 1e-15);
    }
}
