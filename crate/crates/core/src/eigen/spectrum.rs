#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use super::shooting::{find_eigenvalue, ShootingConfig};
use super::{local_coefficient, EigenError};
use crate::indicial::{classify_origin, indicial_exponents};
use crate::potential::PotentialModel;
use crate::solution::{EquationKind, RadialSolution};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub n_r: usize,
    pub l: u32,
    pub energy: f64,
    #[serde(skip)]
    pub solution: RadialSolution,
}

/// A requested level that could not be produced, with the error name preserved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissingLevel {
    pub n_r: usize,
    pub l: u32,
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub levels: Vec<Level>,
    pub missing: Vec<MissingLevel>,
}

fn solve_level(model: &PotentialModel, kind: EquationKind, l: u32, n_r: usize, cfg: &ShootingConfig) -> Result<Level, EigenError> {
    let ind = indicial_exponents(classify_origin(model)?, l, kind)?;
    let coef = local_coefficient(model, l, kind)?;
    let solution = find_eigenvalue(&coef, n_r, cfg, &ind)?;
    Ok(Level { n_r, l, energy: solution.energy(), solution })
}

/// All levels with `n_r <= n_max`, `l <= l_max`, sorted by energy. Levels are solved
/// independently (in parallel with the `parallel` feature); failures are collected.
pub fn spectrum(
    model: &PotentialModel,
    kind: EquationKind,
    l_max: u32,
    n_max: usize,
    cfg: &ShootingConfig,
) -> Result<Spectrum, EigenError> {
    let kind = kind.validated()?;
    cfg.validate()?;
    let jobs: Vec<(u32, usize)> = (0..=l_max).flat_map(|l| (0..=n_max).map(move |n| (l, n))).collect();
    let run = |&(l, n_r): &(u32, usize)| (l, n_r, solve_level(model, kind, l, n_r, cfg));
    #[cfg(feature = "parallel")]
    let results: Vec<_> = jobs.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = jobs.iter().map(run).collect();

    let mut levels = Vec::new();
    let mut missing = Vec::new();
    for (l, n_r, r) in results {
        match r {
            Ok(level) => levels.push(level),
            Err(e) => missing.push(MissingLevel { n_r, l, error: e.name().to_owned(), message: e.to_string() }),
        }
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.l.cmp(&b.l)).then(a.n_r.cmp(&b.n_r)));
    Ok(Spectrum { levels, missing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridScheme};

    #[test]
    fn hydrogen_small_spectrum() {
        let s = spectrum(
            &PotentialModel::coulomb(1.0).unwrap(),
            EquationKind::schrodinger(1.0).unwrap(),
            1,
            1,
            &ShootingConfig::default(),
        )
        .unwrap();
        assert!(s.missing.is_empty());
        let got: Vec<(usize, u32)> = s.levels.iter().map(|l| (l.n_r, l.l)).collect();
        assert_eq!(got[0], (0, 0));
        assert_eq!(s.levels.len(), 4);
        let expected = |l: &Level| -0.5 / ((l.n_r + l.l as usize + 1) as f64).powi(2);
        for l in &s.levels {
            assert!((l.energy - expected(l)).abs() < 1e-6, "{l:?}");
        }
    }

    #[test]
    fn harmonic_degeneracy_pattern() {
        let grid = make_grid(GridScheme::LogSpaced, 1e-6, 20.0, 20_000).unwrap();
        let s = spectrum(&PotentialModel::harmonic(1.0).unwrap(), EquationKind::schrodinger(1.0).unwrap(), 2, 1, &ShootingConfig::new(grid))
            .unwrap();
        let e: Vec<f64> = s.levels.iter().map(|l| l.energy).collect();
        let expected = [1.5, 2.5, 3.5, 3.5, 4.5, 5.5];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-6, "{e:?}");
        }
    }

    #[test]
    fn free_particle_has_no_levels() {
        let s = spectrum(&PotentialModel::zero(), EquationKind::schrodinger(1.0).unwrap(), 1, 1, &ShootingConfig::default()).unwrap();
        assert!(s.levels.is_empty());
        assert_eq!(s.missing.len(), 4);
        assert!(s.missing.iter().all(|m| m.error == "NotClassicallyBound"));
    }
}
