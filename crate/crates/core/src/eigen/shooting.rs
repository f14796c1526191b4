use std::cmp::Ordering;

use serde::Serialize;

use super::numerov::{integrate, Direction, Trajectory};
use super::{EigenError, LocalCoefficient, Sampled};
use crate::fd::first_derivative_weights;
use crate::grid::{make_grid, GridScheme, RadialGrid};
use crate::indicial::{Branch, FrobeniusSeries, IndicialData, IndicialError};
use crate::quadrature::trapezoid;
use crate::solution::{count_nodes, BoundaryPolicy, EquationKind, RadialSolution};

/// Relative accuracy asked of the origin expansion attached to solutions.
const ORIGIN_EXPANSION_TOLERANCE: f64 = 1e-10;
/// Decay `∫ κ dr` past the matching point after which the tail is negligible.
const TAIL_DECAY: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingConfig {
    pub grid: RadialGrid,
    /// Fixed matching index; by default the outermost classical turning point.
    pub match_index: Option<usize>,
    /// Radius up to which grid values are taken from the series; by default the
    /// first two positive grid points.
    pub series_radius: Option<f64>,
    /// Energy search interval; by default derived from the effective potential.
    pub e_bracket: Option<(f64, f64)>,
    pub tol_energy: f64,
    pub max_bisections: usize,
}

impl ShootingConfig {
    pub const DEFAULT_TOL_ENERGY: f64 = 1e-10;
    pub const DEFAULT_MAX_BISECTIONS: usize = 200;

    pub fn new(grid: RadialGrid) -> Self {
        Self {
            grid,
            match_index: None,
            series_radius: None,
            e_bracket: None,
            tol_energy: Self::DEFAULT_TOL_ENERGY,
            max_bisections: Self::DEFAULT_MAX_BISECTIONS,
        }
    }

    /// Log-spaced, `1e-6 ..= 200`, 20000 points.
    pub fn default_grid() -> RadialGrid {
        make_grid(GridScheme::LogSpaced, 1e-6, 200.0, 20_000).expect("default grid is valid")
    }

    pub fn with_bracket(mut self, lo: f64, hi: f64) -> Self {
        self.e_bracket = Some((lo, hi));
        self
    }

    pub fn with_tolerance(mut self, tol_energy: f64) -> Self {
        self.tol_energy = tol_energy;
        self
    }

    pub fn validate(&self) -> Result<(), EigenError> {
        let k = self.grid.first_positive();
        let n = self.grid.len();
        if n < k + 5 {
            return Err(EigenError::InvalidConfig(format!("grid has only {n} points")));
        }
        if let Some(m) = self.match_index {
            if m < k + 1 || m > n - 2 {
                return Err(EigenError::InvalidConfig(format!("match index {m} is not interior")));
            }
        }
        if let Some((lo, hi)) = self.e_bracket {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(EigenError::InvalidConfig(format!("energy bracket ({lo}, {hi}) is not ordered")));
            }
        }
        if let Some(r0) = self.series_radius {
            if !(r0 > 0.0 && r0 < self.grid.r_max()) {
                return Err(EigenError::InvalidConfig(format!("series radius {r0} outside the grid")));
            }
        }
        if !(self.tol_energy > 0.0) {
            return Err(EigenError::InvalidConfig("tol_energy must be positive".into()));
        }
        if self.max_bisections == 0 {
            return Err(EigenError::InvalidConfig("max_bisections must be positive".into()));
        }
        Ok(())
    }
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self::new(Self::default_grid())
    }
}

/// Log-derivative mismatch at the matching point and nodes of the outward solution inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mismatch {
    pub mismatch: f64,
    pub nodes: usize,
    pub match_index: usize,
}

struct Shooter<'a> {
    coef: &'a LocalCoefficient,
    cfg: &'a ShootingConfig,
    ind: &'a IndicialData,
    sampled: Sampled,
    first: usize,
}

impl<'a> Shooter<'a> {
    fn new(coef: &'a LocalCoefficient, cfg: &'a ShootingConfig, ind: &'a IndicialData) -> Result<Self, EigenError> {
        cfg.validate()?;
        if ind.p().is_none() {
            return Err(IndicialError::FallToCenter { p_squared: ind.p_squared() }.into());
        }
        let sampled = coef.sample(&cfg.grid)?;
        Ok(Self { coef, cfg, ind, sampled, first: cfg.grid.first_positive() })
    }

    fn r(&self) -> &[f64] {
        self.cfg.grid.points()
    }

    fn series(&self, energy: f64) -> Result<FrobeniusSeries, EigenError> {
        Ok(FrobeniusSeries::new(self.ind, self.coef.model(), self.coef.kind(), energy, Branch::Plus)?)
    }

    /// Regular solution from the series start out to index `stop`.
    fn outward(&self, energy: f64, stop: usize) -> Result<Trajectory, EigenError> {
        let series = self.series(energy)?;
        let r = self.r();
        let k = self.first;
        let last_seeded = match self.cfg.series_radius {
            Some(r0) => r.partition_point(|&x| x <= r0).saturating_sub(1).clamp(k + 1, stop - 1),
            None => k + 1,
        };
        let seeds: Vec<f64> = (k..=last_seeded).map(|i| series.evaluate(r[i]).0).collect();
        let norm = seeds[seeds.len() - 1].abs();
        let (u0, u1) = (seeds[seeds.len() - 2] / norm, seeds[seeds.len() - 1] / norm);
        let mut t = integrate(&self.sampled, &self.cfg.grid, energy, (last_seeded - 1, u0, u1), Direction::Outward, stop)?;
        t.seed(k, seeds.iter().map(|s| s / norm));
        Ok(t)
    }

    /// Decaying solution in to index `stop`, started where the tail beyond `m` has
    /// fallen by `e^{-TAIL_DECAY}` (or at `r_max`).
    fn inward(&self, energy: f64, m: usize, stop: usize) -> Result<Trajectory, EigenError> {
        let r = self.r();
        let n = r.len();
        let q_end = self.sampled.q(n - 1, energy);
        if q_end >= 0.0 {
            return Err(EigenError::NotClassicallyBound { energy, q_at_r_max: q_end });
        }
        let mut start = n - 1;
        let mut decay = 0.0;
        for i in m + 1..n {
            decay += (-self.sampled.q(i, energy)).max(0.0).sqrt() * (r[i] - r[i - 1]);
            if decay > TAIL_DECAY {
                start = i.max(m + 3).min(n - 1);
                break;
            }
        }
        let kappa = (-self.sampled.q(start, energy)).max(0.0).sqrt();
        let tail = (-kappa * (r[start] - r[start - 1])).exp();
        integrate(&self.sampled, &self.cfg.grid, energy, (start, tail, 1.0), Direction::Inward, stop)
    }

    fn match_index(&self, energy: f64) -> usize {
        if let Some(m) = self.cfg.match_index {
            return m;
        }
        let n = self.r().len();
        let (lo, hi) = (self.first + 2, n - 3);
        let q: Vec<f64> = (self.first..n).map(|i| self.sampled.q(i, energy)).collect();
        let m = match q.iter().rposition(|&x| x >= 0.0) {
            Some(j) => j + self.first,
            None => {
                q.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map_or(lo, |(j, _)| j + self.first)
            }
        };
        m.clamp(lo, hi)
    }

    fn log_derivative(&self, t: &Trajectory, m: usize) -> f64 {
        let r = self.r();
        let w = first_derivative_weights(r[m] - r[m - 1], r[m + 1] - r[m]);
        w[0] * t.relative(m - 1, m) + w[1] + w[2] * t.relative(m + 1, m)
    }

    /// Mismatch and node count (up to the matching point) at `energy`.
    fn sample(&self, energy: f64) -> Result<(Mismatch, Trajectory, Trajectory), EigenError> {
        let m = self.match_index(energy);
        let out = self.outward(energy, m + 1)?;
        let inn = self.inward(energy, m, m - 1)?;
        let mismatch = self.log_derivative(&out, m) - self.log_derivative(&inn, m);
        let nodes = count_nodes(&out.values()[self.first..=m]);
        Ok((Mismatch { mismatch, nodes, match_index: m }, out, inn))
    }

    /// Where the `n_r`-th level lies relative to `energy`.
    fn side(&self, energy: f64, n_r: usize) -> Result<(Ordering, Mismatch), EigenError> {
        let (s, ..) = self.sample(energy)?;
        let side = match s.nodes.cmp(&n_r) {
            Ordering::Equal => 0.0.partial_cmp(&s.mismatch).unwrap_or(Ordering::Equal),
            other => other,
        };
        Ok((side, s))
    }
}

/// Smallest `V_eff` on the grid up to just below the threshold at `r_max`.
pub fn default_bracket(coef: &LocalCoefficient, grid: &RadialGrid) -> Result<(f64, f64), EigenError> {
    let sampled = coef.sample(grid)?;
    let k = grid.first_positive();
    let n = grid.len();
    let (lo, hi) = match coef.kind() {
        EquationKind::Schrodinger { mass } => {
            let veff: Vec<f64> =
                (k..n).map(|i| sampled.v()[i] + sampled.centrifugal()[i] / (2.0 * mass)).collect();
            let lo = veff.iter().copied().fold(f64::INFINITY, f64::min);
            let top = veff[veff.len() - 1];
            (lo, top - 1e-12 * top.abs().max(1.0))
        }
        EquationKind::KleinGordon { mass } => {
            let threshold = sampled.v()[n - 1] + (mass * mass + sampled.centrifugal()[n - 1]).sqrt();
            let top = threshold.min(mass);
            (0.0, top - 1e-12 * top.abs().max(1.0))
        }
    };
    if !(lo < hi) {
        let energy = hi;
        return Err(EigenError::NotClassicallyBound { energy, q_at_r_max: sampled.q(n - 1, energy) });
    }
    Ok((lo, hi))
}

/// Mismatch of log-derivatives at the matching point, outward minus inward.
pub fn shoot_mismatch(
    coef: &LocalCoefficient,
    energy: f64,
    cfg: &ShootingConfig,
    ind: &IndicialData,
) -> Result<Mismatch, EigenError> {
    let s = Shooter::new(coef, cfg, ind)?;
    Ok(s.sample(energy)?.0)
}

/// The `n_r`-th bound state by bisection: the node count up to the matching point decides
/// which side of the level a trial energy is on, and the mismatch sign breaks ties.
pub fn find_eigenvalue(
    coef: &LocalCoefficient,
    n_r: usize,
    cfg: &ShootingConfig,
    ind: &IndicialData,
) -> Result<RadialSolution, EigenError> {
    let s = Shooter::new(coef, cfg, ind)?;
    let (mut lo, mut hi) = match cfg.e_bracket {
        Some(b) => b,
        None => default_bracket(coef, &cfg.grid)?,
    };
    // Below the level: fewer nodes, or as many with a positive mismatch. Above: the reverse.
    let (side_lo, at_lo) = s.side(lo, n_r)?;
    let (side_hi, at_hi) = s.side(hi, n_r)?;
    if side_lo != Ordering::Less || side_hi != Ordering::Greater {
        return Err(EigenError::BracketError { n_r, lo, hi, nodes_lo: at_lo.nodes, nodes_hi: at_hi.nodes });
    }
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= cfg.tol_energy || mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if iterations > cfg.max_bisections {
            return Err(EigenError::NoConvergence { iterations: cfg.max_bisections, lo, hi });
        }
        match s.side(mid, n_r)?.0 {
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
            Ordering::Equal => (lo, hi) = (mid, mid),
        }
    }

    let energy = 0.5 * (lo + hi);
    let (at, out, inn) = s.sample(energy)?;
    let m = at.match_index;
    let r = cfg.grid.points();
    let out = out.scaled_to(m);
    let inn = inn.scaled_to(m);
    let mut u: Vec<f64> = (0..r.len()).map(|i| if i < s.first { 0.0 } else if i <= m { out[i] } else { inn[i] }).collect();
    let sign = u[s.first].signum();
    let norm = trapezoid(&u.iter().map(|x| x * x).collect::<Vec<_>>(), r).sqrt();
    for x in &mut u {
        *x *= sign / norm;
    }
    let series = s.series(energy)?;
    let k = s.first;
    let amplitude = u[k] / series.evaluate(r[k]).0;
    let radius = series.radius_for(ORIGIN_EXPANSION_TOLERANCE).min(cfg.grid.r_max());
    let solution = RadialSolution::new(
        cfg.grid.clone(),
        u,
        energy,
        coef.l(),
        BoundaryPolicy::DirichletOrigin,
        coef.model().label(),
    )?;
    Ok(solution.with_origin_expansion(series.origin_expansion(amplitude, radius)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::local_coefficient;
    use crate::indicial::{classify_origin, indicial_exponents};
    use crate::potential::PotentialModel;
    use approx::assert_abs_diff_eq;

    fn setup(model: PotentialModel, l: u32, kind: EquationKind) -> (LocalCoefficient, IndicialData) {
        let ind = indicial_exponents(classify_origin(&model).unwrap(), l, kind).unwrap();
        (local_coefficient(&model, l, kind).unwrap(), ind)
    }

    fn hydrogen(l: u32) -> (LocalCoefficient, IndicialData) {
        setup(PotentialModel::coulomb(1.0).unwrap(), l, EquationKind::schrodinger(1.0).unwrap())
    }

    #[test]
    fn hydrogen_mismatch_examples() {
        let (c, ind) = hydrogen(0);
        let cfg = ShootingConfig::default();
        let at = shoot_mismatch(&c, -0.5, &cfg, &ind).unwrap();
        assert!(at.mismatch.abs() < 1e-6, "{}", at.mismatch);
        assert_eq!(at.nodes, 0);
        assert_eq!(shoot_mismatch(&c, -0.3, &cfg, &ind).unwrap().nodes, 1);
        let below = shoot_mismatch(&c, -0.51, &cfg, &ind).unwrap();
        let above = shoot_mismatch(&c, -0.49, &cfg, &ind).unwrap();
        assert!(below.mismatch > 0.0 && above.mismatch < 0.0);
    }

    #[test]
    fn hydrogen_levels() {
        let cfg = ShootingConfig::default();
        let (c, ind) = hydrogen(0);
        let s = find_eigenvalue(&c, 0, &cfg, &ind).unwrap();
        assert_abs_diff_eq!(s.energy(), -0.5, epsilon = 1e-6);
        assert_eq!(s.node_count(), 0);
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
        let (c, ind) = hydrogen(1);
        let s = find_eigenvalue(&c, 0, &cfg, &ind).unwrap();
        assert_abs_diff_eq!(s.energy(), -0.125, epsilon = 1e-6);
    }

    #[test]
    fn hydrogen_eigenfunction_shape() {
        let cfg = ShootingConfig::default();
        let (c, ind) = hydrogen(0);
        let s = find_eigenvalue(&c, 0, &cfg, &ind).unwrap();
        let r = cfg.grid.points();
        for i in (0..r.len()).step_by(997).filter(|&i| r[i] < 15.0) {
            let exact = 2.0 * r[i] * (-r[i]).exp();
            assert!((s.u()[i] - exact).abs() < 1e-6, "r = {}", r[i]);
        }
        let origin = s.origin_expansion().unwrap();
        assert_abs_diff_eq!(origin.amplitude, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn harmonic_excited_state() {
        let grid = make_grid(GridScheme::LogSpaced, 1e-6, 20.0, 20_000).unwrap();
        let cfg = ShootingConfig::new(grid);
        let (c, ind) = setup(PotentialModel::harmonic(1.0).unwrap(), 0, EquationKind::schrodinger(1.0).unwrap());
        let s = find_eigenvalue(&c, 1, &cfg, &ind).unwrap();
        assert_abs_diff_eq!(s.energy(), 3.5, epsilon = 1e-6);
        assert_eq!(s.node_count(), 1);
    }

    #[test]
    fn klein_gordon_coulomb() {
        let alpha: f64 = 0.2;
        let (c, ind) = setup(PotentialModel::coulomb(alpha).unwrap(), 0, EquationKind::klein_gordon(1.0).unwrap());
        let s = find_eigenvalue(&c, 0, &ShootingConfig::default(), &ind).unwrap();
        let n_eff = 0.5 + (0.25 - alpha * alpha).sqrt();
        let exact = (1.0 + alpha * alpha / (n_eff * n_eff)).powf(-0.5);
        assert_abs_diff_eq!(exact, 0.978907, epsilon = 1e-6);
        assert_abs_diff_eq!(s.energy(), exact, epsilon = 1e-6);
    }

    #[test]
    fn uniform_grid_from_origin_stores_exact_zero() {
        let grid = make_grid(GridScheme::Uniform, 0.0, 12.0, 4001).unwrap();
        let cfg = ShootingConfig::new(grid);
        let (c, ind) = setup(PotentialModel::harmonic(1.0).unwrap(), 1, EquationKind::schrodinger(1.0).unwrap());
        let s = find_eigenvalue(&c, 0, &cfg, &ind).unwrap();
        assert_eq!(s.u()[0], 0.0);
        assert_abs_diff_eq!(s.energy(), 2.5, epsilon = 1e-6);
    }

    #[test]
    fn bracket_and_config_errors() {
        let (c, ind) = hydrogen(0);
        let cfg = ShootingConfig::default().with_bracket(-0.4, -0.2);
        assert!(matches!(find_eigenvalue(&c, 0, &cfg, &ind), Err(EigenError::BracketError { .. })));
        let cfg = ShootingConfig::default().with_bracket(-0.2, -0.4);
        assert!(matches!(find_eigenvalue(&c, 0, &cfg, &ind), Err(EigenError::InvalidConfig(_))));
        let (free, ind) = setup(PotentialModel::zero(), 0, EquationKind::schrodinger(1.0).unwrap());
        assert!(matches!(
            find_eigenvalue(&free, 0, &ShootingConfig::default(), &ind),
            Err(EigenError::NotClassicallyBound { .. })
        ));
    }

    #[test]
    fn fall_to_center_is_refused() {
        let kind = EquationKind::schrodinger(1.0).unwrap();
        let model = PotentialModel::inverse_square(-0.2).unwrap();
        let err = indicial_exponents(classify_origin(&model).unwrap(), 0, kind).unwrap_err();
        assert!(matches!(err, IndicialError::FallToCenter { .. }));
    }
}
