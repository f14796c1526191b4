//! Bound states of `u'' + Q(r, E) u = 0` with the regular branch at the origin.

mod numerov;
mod sae;
mod shooting;
mod spectrum;

use thiserror::Error;

use crate::error::CoreError;
use crate::grid::RadialGrid;
use crate::indicial::IndicialError;
use crate::potential::PotentialModel;
use crate::solution::EquationKind;

pub use numerov::{numerov_integrate, Direction, Start, Trajectory, RESCALE_THRESHOLD};
pub use sae::{beta_for_kappa, sae_bound_state, sae_closed_form_kappa, SaeDemoResult};
pub use shooting::{default_bracket, find_eigenvalue, shoot_mismatch, Mismatch, ShootingConfig};
pub use spectrum::{spectrum, Level, MissingLevel, Spectrum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("no decaying tail at E = {energy}: Q(r_max) = {q_at_r_max} >= 0")]
    NotClassicallyBound { energy: f64, q_at_r_max: f64 },
    #[error("integration overflowed at grid index {index}")]
    Overflow { index: usize },
    #[error("bracket [{lo}, {hi}] holds node counts {nodes_lo}..{nodes_hi}, which do not straddle n_r = {n_r}")]
    BracketError { n_r: usize, lo: f64, hi: f64, nodes_lo: usize, nodes_hi: usize },
    #[error("no convergence after {iterations} bisections (bracket [{lo}, {hi}])")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },
    #[error("invalid shooting configuration: {0}")]
    InvalidConfig(String),
    #[error("P = {p} outside (1/2, 1)")]
    OutOfRange { p: f64 },
    #[error("no real solution for P = {p}, beta = {beta}: Γ(P)/Γ(-P)/β must be positive")]
    NoRealSolution { p: f64, beta: f64 },
    #[error(transparent)]
    Indicial(#[from] IndicialError),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl EigenError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NotClassicallyBound { .. } => "NotClassicallyBound",
            Self::Overflow { .. } => "Overflow",
            Self::BracketError { .. } => "BracketError",
            Self::NoConvergence { .. } => "NoConvergence",
            Self::InvalidConfig(_) => "InvalidConfig",
            Self::OutOfRange { .. } => "OutOfRange",
            Self::NoRealSolution { .. } => "NoRealSolution",
            Self::Indicial(e) => e.name(),
            Self::Core(e) => e.name(),
        }
    }
}

/// `Q(r, E)` of the reduced radial equation for one potential, partial wave and kind.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCoefficient {
    model: PotentialModel,
    l: u32,
    kind: EquationKind,
}

pub fn local_coefficient(model: &PotentialModel, l: u32, kind: EquationKind) -> Result<LocalCoefficient, EigenError> {
    Ok(LocalCoefficient { model: model.clone(), l, kind: kind.validated()? })
}

fn q_from(kind: EquationKind, v: f64, centrifugal: f64, energy: f64) -> f64 {
    match kind {
        EquationKind::Schrodinger { mass } => 2.0 * mass * (energy - v) - centrifugal,
        EquationKind::KleinGordon { mass } => (energy - v).powi(2) - mass * mass - centrifugal,
    }
}

impl LocalCoefficient {
    pub fn q(&self, r: f64, energy: f64) -> Result<f64, CoreError> {
        let v = self.model.evaluate(r)?;
        Ok(q_from(self.kind, v, self.centrifugal(r), energy))
    }

    fn centrifugal(&self, r: f64) -> f64 {
        let l = f64::from(self.l);
        l * (l + 1.0) / (r * r)
    }

    pub fn model(&self) -> &PotentialModel {
        &self.model
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn kind(&self) -> EquationKind {
        self.kind
    }

    /// Potential and centrifugal term tabulated once per grid; the origin is skipped.
    pub(crate) fn sample(&self, grid: &RadialGrid) -> Result<Sampled, CoreError> {
        let mut v = Vec::with_capacity(grid.len());
        let mut centrifugal = Vec::with_capacity(grid.len());
        for &r in grid.points() {
            if r == 0.0 {
                v.push(f64::NAN);
                centrifugal.push(f64::NAN);
            } else {
                v.push(self.model.evaluate(r)?);
                centrifugal.push(self.centrifugal(r));
            }
        }
        Ok(Sampled { kind: self.kind, v, centrifugal })
    }
}

pub(crate) struct Sampled {
    kind: EquationKind,
    v: Vec<f64>,
    centrifugal: Vec<f64>,
}

impl Sampled {
    pub(crate) fn q(&self, i: usize, energy: f64) -> f64 {
        q_from(self.kind, self.v[i], self.centrifugal[i], energy)
    }

    pub(crate) fn v(&self) -> &[f64] {
        &self.v
    }

    pub(crate) fn centrifugal(&self) -> &[f64] {
        &self.centrifugal
    }
}
