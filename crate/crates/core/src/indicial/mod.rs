//! Near-origin analysis of the reduced radial equation.
//!
//! Substituting `u ~ r^a` gives the indicial equation `a(a - 1) = c`, where `c` is
//! the coefficient of `r^{-2}` left over from the centrifugal term and any
//! inverse-square part of the potential. Its roots are `1/2 ± P` with
//! `P = sqrt(1/4 + c)`; for a Schrödinger particle of mass `m` in a potential with
//! `r^2 V(r) -> L`, that is `P^2 = (l + 1/2)^2 + 2 m L`.

mod series;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::CoreError;
use crate::potential::{PotentialModel, EXPONENT_MATCH};
use crate::solution::{BoundaryPolicy, EquationKind};

pub use series::{series_start, FrobeniusSeries, SeriesStart, SERIES_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndicialError {
    #[error("numerical limit of r^2 V(r) is not monotone-consistent: {0}")]
    AmbiguousTabulation(String),
    #[error("fall to the center: P^2 = {p_squared} < 0")]
    FallToCenter { p_squared: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("branch admissibility is not defined in the fall-to-center regime")]
    NotApplicable,
    #[error("series radius {r0} too large: truncation estimate {estimate:e} exceeds {tolerance:e}")]
    SeriesRadiusTooLarge { r0: f64, estimate: f64, tolerance: f64 },
    #[error("Frobenius recursion is resonant at shift {shift} (logarithmic solution)")]
    ResonantSeries { shift: f64 },
    #[error("indicial data inconsistent with the equation: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl IndicialError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AmbiguousTabulation(_) => "AmbiguousTabulation",
            Self::FallToCenter { .. } => "FallToCenter",
            Self::Unsupported(_) => "Unsupported",
            Self::NotApplicable => "NotApplicable",
            Self::SeriesRadiusTooLarge { .. } => "SeriesRadiusTooLarge",
            Self::ResonantSeries { .. } => "ResonantSeries",
            Self::Inconsistent(_) => "Inconsistent",
            Self::Core(e) => e.name(),
        }
    }
}

/// Classification of `lim_{r->0} r^2 V(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum OriginClass {
    /// The limit is zero. `coulomb_limit` is `lim r V(r)` when it is finite and known;
    /// it feeds the Klein–Gordon indicial shift.
    Regular { coulomb_limit: Option<f64> },
    /// The limit is a finite nonzero `limit` (negative means attractive).
    TransitiveSingular { limit: f64 },
    SuperSingular,
}

pub fn classify_origin(model: &PotentialModel) -> Result<OriginClass, IndicialError> {
    match model.origin_terms() {
        Some(terms) => {
            let Some(lead) = terms.first() else {
                return Ok(OriginClass::Regular { coulomb_limit: Some(0.0) });
            };
            if lead.exponent < -2.0 - EXPONENT_MATCH {
                Ok(OriginClass::SuperSingular)
            } else if lead.exponent <= -2.0 + EXPONENT_MATCH {
                Ok(OriginClass::TransitiveSingular { limit: lead.coeff })
            } else if lead.exponent < -1.0 - EXPONENT_MATCH {
                Ok(OriginClass::Regular { coulomb_limit: None })
            } else if lead.exponent <= -1.0 + EXPONENT_MATCH {
                Ok(OriginClass::Regular { coulomb_limit: Some(lead.coeff) })
            } else {
                Ok(OriginClass::Regular { coulomb_limit: Some(0.0) })
            }
        }
        None => classify_tabulated(model),
    }
}

/// Local power-law exponent thresholds for the numerical limit estimate: `r^2 V`
/// behaving like `r^q` with `q >= 1/4` tends to zero, `q <= -1/4` diverges.
const TREND_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Trend {
    Vanishing,
    Constant,
    Diverging,
}

/// Estimates `lim r^2 V(r)` from the three smallest tabulated radii.
fn classify_tabulated(model: &PotentialModel) -> Result<OriginClass, IndicialError> {
    let radii = model
        .innermost_tabulated_radii()
        .ok_or_else(|| IndicialError::Unsupported("potential has no origin data".into()))?;
    if radii.len() < 3 {
        return Err(IndicialError::AmbiguousTabulation("fewer than three samples".into()));
    }
    let r = [radii[0], radii[1], radii[2]];
    let mut s = [0.0; 3];
    for (si, &ri) in s.iter_mut().zip(&r) {
        *si = ri * ri * model.evaluate(ri)?;
    }
    let (d1, d2) = (s[1] - s[0], s[2] - s[1]);
    if d1 * d2 < 0.0 {
        return Err(IndicialError::AmbiguousTabulation(format!(
            "r^2 V = {:?} at r = {:?} is not monotone",
            s, r
        )));
    }
    let extrapolated = s[0] - r[0] * d1 / (r[1] - r[0]);
    if s.iter().all(|&x| x == 0.0) {
        return Ok(OriginClass::Regular { coulomb_limit: None });
    }
    let trend = |a: usize, b: usize| -> Option<Trend> {
        if s[a] * s[b] <= 0.0 {
            return None;
        }
        let q = (s[b].abs() / s[a].abs()).ln() / (r[b] / r[a]).ln();
        Some(if q >= TREND_THRESHOLD {
            Trend::Vanishing
        } else if q <= -TREND_THRESHOLD {
            Trend::Diverging
        } else {
            Trend::Constant
        })
    };
    let trends = (trend(0, 1), trend(1, 2));
    match trends {
        (Some(a), Some(b)) if a == b => Ok(match a {
            Trend::Vanishing => OriginClass::Regular { coulomb_limit: None },
            Trend::Diverging => OriginClass::SuperSingular,
            Trend::Constant => OriginClass::TransitiveSingular { limit: extrapolated },
        }),
        // A sign change in a monotone sequence means the limit straddles zero.
        (None, _) | (_, None) if extrapolated.abs() <= 1e-12 * s[2].abs().max(s[0].abs()) => {
            Ok(OriginClass::Regular { coulomb_limit: None })
        }
        _ => Err(IndicialError::AmbiguousTabulation(format!(
            "inconsistent trends {:?} for r^2 V = {:?} at r = {:?}",
            trends, s, r
        ))),
    }
}

/// Where `P` sits relative to the thresholds `0`, `1/2` and `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `P = 0`: the exponents coincide and the second solution carries a logarithm.
    Degenerate,
    /// `0 < P < 1/2`: both branches vanish at the origin.
    TwoBranchBothVanish,
    /// `1/2 <= P < 1`: the minus branch is square integrable but does not vanish.
    BorderlineOrDivergentMinor,
    /// `P >= 1`: only the plus branch is square integrable.
    SingleL2Branch,
    /// `P^2 < 0`.
    FallToCenter,
}

impl Regime {
    pub fn for_p(p: f64) -> Self {
        if p == 0.0 {
            Self::Degenerate
        } else if p < 0.5 {
            Self::TwoBranchBothVanish
        } else if p < 1.0 {
            Self::BorderlineOrDivergentMinor
        } else {
            Self::SingleL2Branch
        }
    }
}

/// Indicial exponents `a± = 1/2 ± P` and the regime of `P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicialData {
    p_squared: f64,
    p: f64,
    l: u32,
    regime: Regime,
}

impl IndicialData {
    /// Builds the data for a real `P >= 0`.
    pub fn from_p(p: f64, l: u32) -> Result<Self, IndicialError> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(IndicialError::Inconsistent(format!("P must be real and non-negative, got {p}")));
        }
        Ok(Self { p_squared: p * p, p, l, regime: Regime::for_p(p) })
    }

    /// Builds the data from `P^2`, keeping the fall-to-center case representable.
    pub fn from_p_squared(p_squared: f64, l: u32) -> Self {
        if p_squared < 0.0 {
            Self { p_squared, p: (-p_squared).sqrt(), l, regime: Regime::FallToCenter }
        } else {
            let p = p_squared.sqrt();
            Self { p_squared, p, l, regime: Regime::for_p(p) }
        }
    }

    /// Real `P`, or `None` in the fall-to-center regime.
    pub fn p(&self) -> Option<f64> {
        (self.regime != Regime::FallToCenter).then_some(self.p)
    }

    pub fn p_squared(&self) -> f64 {
        self.p_squared
    }

    /// Real part of the plus exponent, `1/2 + P` when `P` is real.
    pub fn a_plus(&self) -> f64 {
        match self.regime {
            Regime::FallToCenter => 0.5,
            _ => 0.5 + self.p,
        }
    }

    /// Real part of the minus exponent, `1/2 - P` when `P` is real.
    pub fn a_minus(&self) -> f64 {
        match self.regime {
            Regime::FallToCenter => 0.5,
            _ => 0.5 - self.p,
        }
    }

    pub fn exponent(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.a_plus(),
            Branch::Minus => self.a_minus(),
        }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}

fn centrifugal_p(l: u32) -> f64 {
    f64::from(l) + 0.5
}

pub fn indicial_exponents(oc: OriginClass, l: u32, kind: EquationKind) -> Result<IndicialData, IndicialError> {
    let half = centrifugal_p(l);
    let p_squared = match (oc, kind) {
        (OriginClass::SuperSingular, _) => {
            return Err(IndicialError::Unsupported("super-singular potentials have no indicial equation".into()))
        }
        (OriginClass::Regular { .. }, EquationKind::Schrodinger { .. })
        | (OriginClass::Regular { coulomb_limit: Some(0.0) }, EquationKind::KleinGordon { .. }) => {
            return IndicialData::from_p(half, l);
        }
        (OriginClass::Regular { coulomb_limit: Some(c) }, EquationKind::KleinGordon { .. }) => half * half - c * c,
        (OriginClass::Regular { coulomb_limit: None }, EquationKind::KleinGordon { .. }) => {
            return Err(IndicialError::Unsupported(
                "Klein-Gordon indicial shift needs a Coulomb-type (r V -> const) potential".into(),
            ))
        }
        (OriginClass::TransitiveSingular { limit }, EquationKind::Schrodinger { mass }) => {
            half * half + 2.0 * mass * limit
        }
        (OriginClass::TransitiveSingular { .. }, EquationKind::KleinGordon { .. }) => {
            return Err(IndicialError::Unsupported(
                "inverse-square potentials are super-singular in the Klein-Gordon equation".into(),
            ))
        }
    };
    if p_squared < 0.0 {
        return Err(IndicialError::FallToCenter { p_squared });
    }
    IndicialData::from_p(p_squared.sqrt(), l)
}

/// The two near-origin solutions `r^{1/2+P}` and `r^{1/2-P}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSet {
    pub plus: bool,
    pub minus: bool,
    pub policy: BoundaryPolicy,
}

impl BranchSet {
    pub fn admits(&self, branch: Branch) -> bool {
        match branch {
            Branch::Plus => self.plus,
            Branch::Minus => self.minus,
        }
    }

    pub fn admitted(&self) -> Vec<Branch> {
        [Branch::Plus, Branch::Minus].into_iter().filter(|&b| self.admits(b)).collect()
    }

    /// True when every branch admitted here is also admitted by `other`.
    pub fn is_subset_of(&self, other: &BranchSet) -> bool {
        (!self.plus || other.plus) && (!self.minus || other.minus)
    }
}

/// Square integrability of `r^{1/2-P}` needs `P < 1`; vanishing at the origin needs `P < 1/2`.
pub fn admissible_branches(ind: &IndicialData, policy: BoundaryPolicy) -> Result<BranchSet, IndicialError> {
    let p = ind.p().ok_or(IndicialError::NotApplicable)?;
    let minus = match policy {
        BoundaryPolicy::SquareIntegrableOnly => p < 1.0,
        BoundaryPolicy::DirichletOrigin => p < 0.5,
    };
    Ok(BranchSet { plus: true, minus, policy })
}

/// Coefficient `P^2 - 1/4` of the `1/r^2` term once the centrifugal and
/// inverse-square parts are combined.
pub fn effective_coupling(p: f64) -> f64 {
    (p - 0.5) * (p + 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSign {
    /// `P < 1/2`: the net `1/r^2` term pulls inward.
    Attractive,
    Borderline,
    /// `P > 1/2`: the net `1/r^2` term pushes outward.
    Repulsive,
}

pub fn coupling_sign(p: f64) -> CouplingSign {
    let c = effective_coupling(p);
    if c < 0.0 {
        CouplingSign::Attractive
    } else if c > 0.0 {
        CouplingSign::Repulsive
    } else {
        CouplingSign::Borderline
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridScheme};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn schrodinger() -> EquationKind {
        EquationKind::schrodinger(1.0).unwrap()
    }

    #[test]
    fn closed_family_classes() {
        let cases = [
            (PotentialModel::coulomb(1.0).unwrap(), OriginClass::Regular { coulomb_limit: Some(-1.0) }),
            (PotentialModel::harmonic(1.0).unwrap(), OriginClass::Regular { coulomb_limit: Some(0.0) }),
            (PotentialModel::zero(), OriginClass::Regular { coulomb_limit: Some(0.0) }),
            (PotentialModel::inverse_square(-0.21).unwrap(), OriginClass::TransitiveSingular { limit: -0.21 }),
            (PotentialModel::power_law(1.0, -3.0).unwrap(), OriginClass::SuperSingular),
            (PotentialModel::power_law(2.0, -2.0).unwrap(), OriginClass::TransitiveSingular { limit: 2.0 }),
            (PotentialModel::power_law(2.0, -1.5).unwrap(), OriginClass::Regular { coulomb_limit: None }),
            (PotentialModel::power_law(2.0, 0.5).unwrap(), OriginClass::Regular { coulomb_limit: Some(0.0) }),
        ];
        for (model, expected) in cases {
            assert_eq!(classify_origin(&model).unwrap(), expected, "{}", model.label());
        }
    }

    #[test]
    fn sum_takes_most_singular_part() {
        let v = PotentialModel::sum(vec![
            PotentialModel::coulomb(1.0).unwrap(),
            PotentialModel::inverse_square(0.4).unwrap(),
        ])
        .unwrap();
        assert_eq!(classify_origin(&v).unwrap(), OriginClass::TransitiveSingular { limit: 0.4 });
        let v = PotentialModel::sum(vec![v, PotentialModel::power_law(-1.0, -2.5).unwrap()]).unwrap();
        assert_eq!(classify_origin(&v).unwrap(), OriginClass::SuperSingular);
    }

    fn tabulate(f: impl Fn(f64) -> f64) -> PotentialModel {
        let g = make_grid(GridScheme::LogSpaced, 1e-4, 10.0, 200).unwrap();
        let v = g.points().iter().map(|&r| f(r)).collect();
        PotentialModel::tabulated(g, v).unwrap()
    }

    #[test]
    fn tabulated_limits() {
        assert_eq!(
            classify_origin(&tabulate(|r| -1.0 / r)).unwrap(),
            OriginClass::Regular { coulomb_limit: None }
        );
        match classify_origin(&tabulate(|r| -0.21 / (r * r) - 1.0 / r)).unwrap() {
            OriginClass::TransitiveSingular { limit } => assert!((limit + 0.21).abs() < 1e-8, "{limit}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(classify_origin(&tabulate(|r| r.powi(-3))).unwrap(), OriginClass::SuperSingular);
    }

    #[test]
    fn tabulated_non_monotone_is_ambiguous() {
        let g = make_grid(GridScheme::Uniform, 0.1, 0.3, 3).unwrap();
        let v = PotentialModel::tabulated(g, vec![100.0, -50.0, 40.0]).unwrap();
        assert!(matches!(classify_origin(&v), Err(IndicialError::AmbiguousTabulation(_))));
    }

    #[test]
    fn regular_exponents_are_l_plus_one_and_minus_l() {
        let oc = OriginClass::Regular { coulomb_limit: Some(-1.0) };
        for l in 0..=10 {
            let ind = indicial_exponents(oc, l, schrodinger()).unwrap();
            assert_eq!(ind.a_plus(), f64::from(l) + 1.0);
            assert_eq!(ind.a_minus(), -f64::from(l));
            assert_eq!(ind.p(), Some(f64::from(l) + 0.5));
        }
    }

    #[test]
    fn transitive_exponents() {
        // 2 m V0 = 0.21 with m = 1, i.e. L = -0.105.
        let ind = indicial_exponents(OriginClass::TransitiveSingular { limit: -0.105 }, 0, schrodinger()).unwrap();
        assert_relative_eq!(ind.p().unwrap(), 0.2, max_relative = 1e-12);
        assert_relative_eq!(ind.a_plus(), 0.7, max_relative = 1e-12);
        assert_relative_eq!(ind.a_minus(), 0.3, max_relative = 1e-12);
        assert_eq!(ind.regime(), Regime::TwoBranchBothVanish);
    }

    #[test]
    fn fall_to_center_is_an_error() {
        let r = indicial_exponents(OriginClass::TransitiveSingular { limit: -0.25 }, 0, schrodinger());
        assert!(matches!(r, Err(IndicialError::FallToCenter { .. })));
        let ftc = IndicialData::from_p_squared(-0.1, 0);
        assert_eq!(ftc.regime(), Regime::FallToCenter);
        assert_eq!(ftc.p(), None);
        assert_eq!(admissible_branches(&ftc, BoundaryPolicy::DirichletOrigin), Err(IndicialError::NotApplicable));
    }

    #[test]
    fn klein_gordon_coulomb_shift() {
        let kg = EquationKind::klein_gordon(1.0).unwrap();
        let ind = indicial_exponents(OriginClass::Regular { coulomb_limit: Some(-0.2) }, 0, kg).unwrap();
        assert_relative_eq!(ind.p().unwrap(), 0.21f64.sqrt(), max_relative = 1e-14);
        assert!(indicial_exponents(OriginClass::TransitiveSingular { limit: -0.1 }, 0, kg).is_err());
        assert!(indicial_exponents(OriginClass::Regular { coulomb_limit: None }, 0, kg).is_err());
        assert!(indicial_exponents(OriginClass::SuperSingular, 0, schrodinger()).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let set = |p: f64, policy| admissible_branches(&IndicialData::from_p(p, 0).unwrap(), policy).unwrap();
        use BoundaryPolicy::*;
        assert_eq!(set(0.7, SquareIntegrableOnly).admitted(), vec![Branch::Plus, Branch::Minus]);
        assert_eq!(set(0.7, DirichletOrigin).admitted(), vec![Branch::Plus]);
        assert_eq!(set(1.2, SquareIntegrableOnly).admitted(), vec![Branch::Plus]);
        assert_eq!(set(0.3, DirichletOrigin).admitted(), vec![Branch::Plus, Branch::Minus]);
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(effective_coupling(0.5), 0.0);
        assert_relative_eq!(effective_coupling(0.3), -0.16, max_relative = 1e-14);
        assert_relative_eq!(effective_coupling(0.8), 0.39, max_relative = 1e-14);
        assert_eq!(coupling_sign(0.5), CouplingSign::Borderline);
        assert_eq!(coupling_sign(0.1), CouplingSign::Attractive);
        assert_eq!(coupling_sign(1.1), CouplingSign::Repulsive);
    }

    proptest! {
        #[test]
        fn exponents_sum_to_one(p2 in 0.0f64..50.0, l in 0u32..6) {
            let ind = IndicialData::from_p_squared(p2, l);
            prop_assert!((ind.a_plus() + ind.a_minus() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn dirichlet_is_more_restrictive(p in 0.0f64..3.0) {
            let ind = IndicialData::from_p(p, 0).unwrap();
            let d = admissible_branches(&ind, BoundaryPolicy::DirichletOrigin).unwrap();
            let s = admissible_branches(&ind, BoundaryPolicy::SquareIntegrableOnly).unwrap();
            prop_assert!(d.is_subset_of(&s));
            prop_assert!(d.plus && s.plus);
            prop_assert_eq!(d != BranchSet { policy: d.policy, ..s }, (0.5..1.0).contains(&p));
        }

        #[test]
        fn coupling_increases_with_p(p in 0.0f64..5.0, dp in 1e-6f64..1.0) {
            prop_assert!(effective_coupling(p + dp) > effective_coupling(p));
            prop_assert_eq!(effective_coupling(p) < 0.0, p < 0.5);
        }
    }
}
