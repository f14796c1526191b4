use serde::Serialize;

use super::{Branch, IndicialData, IndicialError};
use crate::potential::{merge_terms, PotentialModel, PowerTerm, EXPONENT_MATCH};
use crate::solution::{EquationKind, OriginExpansion};

/// Largest relative size allowed for the first omitted series terms at the start radius.
pub const SERIES_TOLERANCE: f64 = 1e-6;

/// Highest shift kept in the truncated expansion; `e <= 2` is the two-term start.
const KEPT_SHIFT: f64 = 2.0;
const MAX_EXPONENTS: usize = 256;

/// Frobenius expansion `u = r^a (1 + sum_k c_k r^{e_k})` of a solution of
/// `u'' + Q(r, E) u = 0` about the origin.
///
/// `Q` is expanded as `sum_s q_s r^s` using the potential's exact power terms, and the
/// coefficients follow from `[(a+e)(a+e-1) + q_{-2}] c_e = -sum_s q_s c_{e-(s+2)}`.
/// Shifts need not be integers, so power laws with fractional exponents are handled.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSeries {
    exponent: f64,
    kept: Vec<(f64, f64)>,
    omitted: Vec<(f64, f64)>,
    downgraded: bool,
}

/// Value and slope of the truncated series at a start radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesStart {
    pub r0: f64,
    pub value: f64,
    pub derivative: f64,
    pub exponent: f64,
    /// `(e_k, c_k)` for the kept terms, `e_0 = 0`.
    pub coefficients: Vec<(f64, f64)>,
    /// Relative size of the first omitted terms at `r0`.
    pub truncation: f64,
    /// True when only the leading power is available (tabulated potentials).
    pub downgraded: bool,
}

fn local_coefficient_terms(model_terms: &[PowerTerm], l: u32, kind: EquationKind, energy: f64) -> Vec<PowerTerm> {
    let ll = f64::from(l) * (f64::from(l) + 1.0);
    let mut q = vec![PowerTerm { exponent: -2.0, coeff: -ll }];
    match kind {
        EquationKind::Schrodinger { mass } => {
            q.push(PowerTerm { exponent: 0.0, coeff: 2.0 * mass * energy });
            q.extend(model_terms.iter().map(|t| PowerTerm { exponent: t.exponent, coeff: -2.0 * mass * t.coeff }));
        }
        EquationKind::KleinGordon { mass } => {
            q.push(PowerTerm { exponent: 0.0, coeff: energy * energy - mass * mass });
            q.extend(model_terms.iter().map(|t| PowerTerm { exponent: t.exponent, coeff: -2.0 * energy * t.coeff }));
            for s in model_terms {
                for t in model_terms {
                    q.push(PowerTerm { exponent: s.exponent + t.exponent, coeff: s.coeff * t.coeff });
                }
            }
        }
    }
    merge_terms(q)
}

fn find(list: &[(f64, f64)], e: f64) -> Option<f64> {
    list.iter().find(|(x, _)| (x - e).abs() < 1e-9).map(|&(_, c)| c)
}

impl FrobeniusSeries {
    pub fn new(
        ind: &IndicialData,
        model: &PotentialModel,
        kind: EquationKind,
        energy: f64,
        branch: Branch,
    ) -> Result<Self, IndicialError> {
        if ind.p().is_none() {
            return Err(IndicialError::NotApplicable);
        }
        let a = ind.exponent(branch);
        let Some(model_terms) = model.origin_terms() else {
            return Ok(Self { exponent: a, kept: vec![(0.0, 1.0)], omitted: Vec::new(), downgraded: true });
        };
        let q = local_coefficient_terms(&model_terms, ind.l(), kind, energy);
        if let Some(t) = q.first().filter(|t| t.exponent < -2.0 - EXPONENT_MATCH) {
            return Err(IndicialError::Unsupported(format!(
                "local coefficient has an r^{} term; no Frobenius expansion",
                t.exponent
            )));
        }
        let q_m2 = q.iter().find(|t| (t.exponent + 2.0).abs() < EXPONENT_MATCH).map_or(0.0, |t| t.coeff);
        let residual = a * (a - 1.0) + q_m2;
        if residual.abs() > 1e-9 * (1.0 + q_m2.abs() + a * a) {
            return Err(IndicialError::Inconsistent(format!(
                "exponent {a} does not solve a(a-1) = {}",
                -q_m2
            )));
        }
        let shifts: Vec<(f64, f64)> = q
            .iter()
            .filter(|t| t.exponent > -2.0 + EXPONENT_MATCH)
            .map(|t| (t.exponent + 2.0, t.coeff))
            .collect();

        // Exponents reachable as sums of shifts: everything up to 2, then far enough
        // past 2 to estimate the truncation error.
        let min_shift = shifts.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let cap = if min_shift.is_finite() { (KEPT_SHIFT + min_shift).max(2.0 * KEPT_SHIFT) } else { 0.0 };
        let mut exps = vec![0.0];
        let mut frontier = vec![0.0];
        while let Some(e) = frontier.pop() {
            for &(t, _) in &shifts {
                let next = e + t;
                if next <= cap + 1e-9 && !exps.iter().any(|x: &f64| (x - next).abs() < 1e-9) {
                    if exps.len() >= MAX_EXPONENTS {
                        break;
                    }
                    exps.push(next);
                    frontier.push(next);
                }
            }
        }
        exps.sort_by(f64::total_cmp);

        let mut coeffs: Vec<(f64, f64)> = vec![(0.0, 1.0)];
        for &e in &exps[1..] {
            let rhs: f64 = shifts.iter().filter_map(|&(t, qs)| find(&coeffs, e - t).map(|c| -qs * c)).sum();
            let denom = (a + e) * (a + e - 1.0) + q_m2;
            let c = if denom.abs() <= 1e-12 * (1.0 + (a + e).powi(2)) {
                if rhs != 0.0 {
                    return Err(IndicialError::ResonantSeries { shift: e });
                }
                0.0
            } else {
                rhs / denom
            };
            coeffs.push((e, c));
        }
        let (kept, omitted): (Vec<_>, Vec<_>) = coeffs.into_iter().partition(|&(e, _)| e <= KEPT_SHIFT + 1e-9);
        Ok(Self { exponent: a, kept, omitted, downgraded: false })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn coefficients(&self) -> &[(f64, f64)] {
        &self.kept
    }

    pub fn is_downgraded(&self) -> bool {
        self.downgraded
    }

    /// `(u(r), u'(r))` with unit leading coefficient.
    pub fn evaluate(&self, r: f64) -> (f64, f64) {
        let (mut u, mut du) = (0.0, 0.0);
        for &(e, c) in &self.kept {
            let p = self.exponent + e;
            let rp = r.powf(p);
            u += c * rp;
            du += c * p * rp / r;
        }
        (u, du)
    }

    /// Relative size `sum |c_k| r^{e_k}` of the omitted terms.
    pub fn truncation(&self, r: f64) -> f64 {
        self.omitted.iter().map(|&(e, c)| c.abs() * r.powf(e)).sum()
    }

    /// Largest radius at which the truncation estimate stays below `tol`.
    pub fn radius_for(&self, tol: f64) -> f64 {
        if self.omitted.iter().all(|&(_, c)| c == 0.0) {
            return f64::INFINITY;
        }
        let (mut lo, mut hi) = (-40.0f64, 10.0f64);
        if self.truncation(hi.exp()) <= tol {
            return hi.exp();
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.truncation(mid.exp()) <= tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo.exp()
    }

    pub fn start_at(&self, r0: f64) -> SeriesStart {
        let (value, derivative) = self.evaluate(r0);
        SeriesStart {
            r0,
            value,
            derivative,
            exponent: self.exponent,
            coefficients: self.kept.clone(),
            truncation: self.truncation(r0),
            downgraded: self.downgraded,
        }
    }

    pub fn origin_expansion(&self, amplitude: f64, radius: f64) -> OriginExpansion {
        OriginExpansion { exponent: self.exponent, terms: self.kept.clone(), amplitude, radius }
    }
}

/// Truncated Frobenius start `(u(r0), u'(r0))` for outward integration.
pub fn series_start(
    ind: &IndicialData,
    model: &PotentialModel,
    kind: EquationKind,
    energy: f64,
    r0: f64,
    branch: Branch,
) -> Result<SeriesStart, IndicialError> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(crate::error::CoreError::DomainError(r0).into());
    }
    let series = FrobeniusSeries::new(ind, model, kind, energy, branch)?;
    let start = series.start_at(r0);
    if !start.downgraded && start.truncation >= SERIES_TOLERANCE {
        return Err(IndicialError::SeriesRadiusTooLarge { r0, estimate: start.truncation, tolerance: SERIES_TOLERANCE });
    }
    Ok(start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridScheme};
    use crate::indicial::{classify_origin, indicial_exponents};
    use approx::assert_relative_eq;

    fn setup(model: &PotentialModel, l: u32, kind: EquationKind) -> IndicialData {
        indicial_exponents(classify_origin(model).unwrap(), l, kind).unwrap()
    }

    #[test]
    fn hydrogen_first_coefficient() {
        let kind = EquationKind::schrodinger(1.0).unwrap();
        let v = PotentialModel::coulomb(1.0).unwrap();
        for l in 0..4 {
            let s = FrobeniusSeries::new(&setup(&v, l, kind), &v, kind, -0.3, Branch::Plus).unwrap();
            let b1 = find(s.coefficients(), 1.0).unwrap();
            assert_relative_eq!(b1, -1.0 / (f64::from(l) + 1.0), max_relative = 1e-14);
        }
        let s = series_start(&setup(&v, 0, kind), &v, kind, -0.5, 1e-3, Branch::Plus).unwrap();
        // Exact ground state u = r e^{-r}: b2 = 1/2.
        assert_relative_eq!(find(&s.coefficients, 2.0).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn free_particle_at_zero_energy_is_exact() {
        let kind = EquationKind::schrodinger(1.0).unwrap();
        let v = PotentialModel::zero();
        let s = series_start(&setup(&v, 1, kind), &v, kind, 0.0, 0.3, Branch::Plus).unwrap();
        assert_relative_eq!(s.value, 0.09, max_relative = 1e-14);
        assert_relative_eq!(s.derivative, 0.6, max_relative = 1e-14);
        assert_eq!(s.truncation, 0.0);
    }

    #[test]
    fn inverse_square_at_zero_energy_is_pure_power() {
        let kind = EquationKind::schrodinger(1.0).unwrap();
        // P = 0.3 at l = 0: 2 m L = 0.09 - 0.25.
        let v = PotentialModel::inverse_square(-0.08).unwrap();
        let ind = setup(&v, 0, kind);
        assert_relative_eq!(ind.p().unwrap(), 0.3, max_relative = 1e-12);
        let s = series_start(&ind, &v, kind, 0.0, 0.5, Branch::Plus).unwrap();
        assert_eq!(s.coefficients, vec![(0.0, 1.0)]);
        assert_relative_eq!(s.value, 0.5f64.powf(0.8), max_relative = 1e-12);
    }

    #[test]
    fn radius_check() {
        let kind = EquationKind::schrodinger(1.0).unwrap();
        let v = PotentialModel::coulomb(1.0).unwrap();
        let ind = setup(&v, 0, kind);
        assert!(matches!(
            series_start(&ind, &v, kind, -0.5, 0.5, Branch::Plus),
            Err(IndicialError::SeriesRadiusTooLarge { .. })
        ));
        assert!(series_start(&ind, &v, kind, -0.5, 0.0, Branch::Plus).is_err());
    }

    #[test]
    fn tabulated_is_downgraded() {
        let kind = EquationKind::schrodinger(1.0).unwrap();
        let g = make_grid(GridScheme::LogSpaced, 1e-4, 10.0, 100).unwrap();
        let vals = g.points().iter().map(|r| -1.0 / r).collect();
        let v = PotentialModel::tabulated(g, vals).unwrap();
        let ind = setup(&v, 0, kind);
        let s = series_start(&ind, &v, kind, -0.5, 1e-3, Branch::Plus).unwrap();
        assert!(s.downgraded);
        assert_eq!(s.value, 1e-3);
    }

    #[test]
    fn klein_gordon_coulomb_series_solves_equation() {
        let kind = EquationKind::klein_gordon(1.0).unwrap();
        let v = PotentialModel::coulomb(0.2).unwrap();
        let ind = setup(&v, 0, kind);
        let energy = 0.97;
        let s = FrobeniusSeries::new(&ind, &v, kind, energy, Branch::Plus).unwrap();
        // Residual of u'' + Q u with Q = (E + 0.2/r)^2 - 1 is O(r^{a+1}) relative to r^{a-2}.
        let r: f64 = 1e-3;
        let h = 1e-7;
        let u = |x: f64| s.evaluate(x).0;
        let upp = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
        let q = (energy + 0.2 / r).powi(2) - 1.0;
        let scale = u(r) / (r * r);
        assert!(((upp + q * u(r)) / scale).abs() < 1e-5);
    }

    #[test]
    fn minus_branch_resonance() {
        // Regular potential, l = 0: exponents 1 and 0 differ by an integer.
        let kind = EquationKind::schrodinger(1.0).unwrap();
        let v = PotentialModel::coulomb(1.0).unwrap();
        let r = FrobeniusSeries::new(&setup(&v, 0, kind), &v, kind, -0.5, Branch::Minus);
        assert!(matches!(r, Err(IndicialError::ResonantSeries { .. })));
    }

    #[test]
    fn fractional_power_law() {
        let kind = EquationKind::schrodinger(1.0).unwrap();
        let v = PotentialModel::power_law(-1.0, -1.5).unwrap();
        let s = FrobeniusSeries::new(&setup(&v, 0, kind), &v, kind, -1.0, Branch::Plus).unwrap();
        let exps: Vec<f64> = s.coefficients().iter().map(|c| c.0).collect();
        assert_eq!(exps, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
