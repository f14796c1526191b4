use crate::error::CoreError;
use crate::grid::RadialGrid;

/// Maximum nesting of [`Family::Sum`] models.
pub const MAX_SUM_DEPTH: usize = 4;

/// Closed set of central potentials `V(r)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Zero,
    /// `V = -strength / r` when attractive, `+strength / r` otherwise.
    Coulomb { strength: f64, attractive: bool },
    /// `V = omega^2 r^2 / 2`.
    Harmonic { omega: f64 },
    /// `V = g / r^2`; `g < 0` is attractive.
    InverseSquare { g: f64 },
    /// `V = c r^p`.
    PowerLaw { c: f64, p: f64 },
    Sum(Vec<PotentialModel>),
    /// Linear interpolation of samples on a grid with `r_min > 0`.
    Tabulated { grid: RadialGrid, values: Vec<f64> },
}

/// A single term `coeff * r^exponent` of a near-origin power expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub exponent: f64,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel {
    family: Family,
    label: String,
}

fn finite(name: &str, x: f64) -> Result<f64, CoreError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CoreError::InvalidPotential(format!("{name} must be finite, got {x}")))
    }
}

impl PotentialModel {
    pub fn zero() -> Self {
        Self { family: Family::Zero, label: "zero".into() }
    }

    /// Attractive Coulomb potential `-alpha / r`.
    pub fn coulomb(alpha: f64) -> Result<Self, CoreError> {
        Self::coulomb_signed(alpha, true)
    }

    pub fn coulomb_signed(strength: f64, attractive: bool) -> Result<Self, CoreError> {
        finite("Coulomb strength", strength)?;
        if strength < 0.0 {
            return Err(CoreError::InvalidPotential(format!(
                "Coulomb strength must be non-negative (sign is explicit), got {strength}"
            )));
        }
        let sign = if attractive { "-" } else { "+" };
        Ok(Self {
            family: Family::Coulomb { strength, attractive },
            label: format!("coulomb({sign}{strength})"),
        })
    }

    pub fn harmonic(omega: f64) -> Result<Self, CoreError> {
        finite("omega", omega)?;
        Ok(Self { family: Family::Harmonic { omega }, label: format!("harmonic({omega})") })
    }

    pub fn inverse_square(g: f64) -> Result<Self, CoreError> {
        finite("g", g)?;
        Ok(Self { family: Family::InverseSquare { g }, label: format!("inverse_square({g})") })
    }

    pub fn power_law(c: f64, p: f64) -> Result<Self, CoreError> {
        finite("c", c)?;
        finite("p", p)?;
        Ok(Self { family: Family::PowerLaw { c, p }, label: format!("power_law({c},{p})") })
    }

    pub fn sum(parts: Vec<PotentialModel>) -> Result<Self, CoreError> {
        if parts.is_empty() {
            return Err(CoreError::InvalidPotential("empty sum".into()));
        }
        let label = format!(
            "sum({})",
            parts.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join("+")
        );
        let model = Self { family: Family::Sum(parts), label };
        let depth = model.sum_depth();
        if depth > MAX_SUM_DEPTH {
            return Err(CoreError::InvalidPotential(format!(
                "sum nesting depth {depth} exceeds {MAX_SUM_DEPTH}"
            )));
        }
        Ok(model)
    }

    pub fn tabulated(grid: RadialGrid, values: Vec<f64>) -> Result<Self, CoreError> {
        if values.len() != grid.len() {
            return Err(CoreError::LengthMismatch { values: values.len(), points: grid.len() });
        }
        if grid.r_min() <= 0.0 {
            return Err(CoreError::InvalidPotential("tabulated potentials need r_min > 0".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(CoreError::InvalidPotential(format!("non-finite tabulated value {v}")));
        }
        let label = format!("tabulated({} points)", values.len());
        Ok(Self { family: Family::Tabulated { grid, values }, label })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn sum_depth(&self) -> usize {
        match &self.family {
            Family::Sum(parts) => 1 + parts.iter().map(Self::sum_depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// `V(r)` for `r > 0`.
    pub fn evaluate(&self, r: f64) -> Result<f64, CoreError> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(CoreError::DomainError(r));
        }
        Ok(match &self.family {
            Family::Zero => 0.0,
            Family::Coulomb { strength, attractive } => {
                let v = strength / r;
                if *attractive {
                    -v
                } else {
                    v
                }
            }
            Family::Harmonic { omega } => 0.5 * omega * omega * r * r,
            Family::InverseSquare { g } => g / (r * r),
            Family::PowerLaw { c, p } => c * r.powf(*p),
            Family::Sum(parts) => {
                let mut total = 0.0;
                for part in parts {
                    total += part.evaluate(r)?;
                }
                total
            }
            Family::Tabulated { grid, values } => interpolate(grid, values, r)?,
        })
    }

    /// Exact expansion `V(r) = sum coeff * r^exponent`, merged by exponent and sorted
    /// ascending. `None` for tabulated data, which has no analytic origin behaviour.
    pub fn origin_terms(&self) -> Option<Vec<PowerTerm>> {
        let mut raw = Vec::new();
        self.collect_terms(&mut raw)?;
        Some(merge_terms(raw))
    }

    fn collect_terms(&self, out: &mut Vec<PowerTerm>) -> Option<()> {
        match &self.family {
            Family::Zero => {}
            Family::Coulomb { strength, attractive } => out.push(PowerTerm {
                exponent: -1.0,
                coeff: if *attractive { -strength } else { *strength },
            }),
            Family::Harmonic { omega } => out.push(PowerTerm { exponent: 2.0, coeff: 0.5 * omega * omega }),
            Family::InverseSquare { g } => out.push(PowerTerm { exponent: -2.0, coeff: *g }),
            Family::PowerLaw { c, p } => out.push(PowerTerm { exponent: *p, coeff: *c }),
            Family::Sum(parts) => {
                for part in parts {
                    part.collect_terms(out)?;
                }
            }
            Family::Tabulated { .. } => return None,
        }
        Some(())
    }

    /// The tabulated samples closest to the origin, when this model is (or contains) a table.
    pub(crate) fn innermost_tabulated_radii(&self) -> Option<Vec<f64>> {
        match &self.family {
            Family::Tabulated { grid, .. } => Some(grid.points().to_vec()),
            Family::Sum(parts) => {
                let mut radii: Vec<f64> = parts.iter().filter_map(Self::innermost_tabulated_radii).flatten().collect();
                if radii.is_empty() {
                    return None;
                }
                radii.sort_by(f64::total_cmp);
                radii.dedup();
                Some(radii)
            }
            _ => None,
        }
    }
}

/// Exponents closer than this are merged into a single term.
pub(crate) const EXPONENT_MATCH: f64 = 1e-12;

pub(crate) fn merge_terms(mut raw: Vec<PowerTerm>) -> Vec<PowerTerm> {
    raw.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
    let mut merged: Vec<PowerTerm> = Vec::with_capacity(raw.len());
    for t in raw {
        match merged.last_mut() {
            Some(last) if (last.exponent - t.exponent).abs() < EXPONENT_MATCH => last.coeff += t.coeff,
            _ => merged.push(t),
        }
    }
    merged.retain(|t| t.coeff != 0.0);
    merged
}

fn interpolate(grid: &RadialGrid, values: &[f64], r: f64) -> Result<f64, CoreError> {
    let pts = grid.points();
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    if r < lo || r > hi {
        return Err(CoreError::TabulationRange { r, lo, hi });
    }
    let j = pts.partition_point(|&x| x <= r).clamp(1, pts.len() - 1);
    let (r0, r1) = (pts[j - 1], pts[j]);
    let t = (r - r0) / (r1 - r0);
    Ok(values[j - 1] + t * (values[j] - values[j - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridScheme};
    use approx::assert_relative_eq;

    #[test]
    fn closed_families() {
        assert_eq!(PotentialModel::coulomb(1.0).unwrap().evaluate(2.0).unwrap(), -0.5);
        assert_relative_eq!(
            PotentialModel::inverse_square(-0.21).unwrap().evaluate(0.1).unwrap(),
            -21.0,
            max_relative = 1e-14
        );
        assert_eq!(PotentialModel::harmonic(1.0).unwrap().evaluate(3.0).unwrap(), 4.5);
        assert_eq!(PotentialModel::coulomb_signed(2.0, false).unwrap().evaluate(4.0).unwrap(), 0.5);
        assert_eq!(PotentialModel::power_law(3.0, 2.0).unwrap().evaluate(2.0).unwrap(), 12.0);
        assert_eq!(PotentialModel::zero().evaluate(1e-9).unwrap(), 0.0);
    }

    #[test]
    fn sum_adds_parts() {
        let v = PotentialModel::sum(vec![
            PotentialModel::coulomb(1.0).unwrap(),
            PotentialModel::harmonic(2.0).unwrap(),
        ])
        .unwrap();
        assert_relative_eq!(v.evaluate(0.5).unwrap(), -2.0 + 0.5, max_relative = 1e-15);
    }

    #[test]
    fn sum_depth_is_bounded() {
        let mut v = PotentialModel::zero();
        for _ in 0..MAX_SUM_DEPTH {
            v = PotentialModel::sum(vec![v]).unwrap();
        }
        assert!(PotentialModel::sum(vec![v]).is_err());
    }

    #[test]
    fn rejects_non_positive_radius() {
        let v = PotentialModel::coulomb(1.0).unwrap();
        assert_eq!(v.evaluate(0.0), Err(CoreError::DomainError(0.0)));
        assert!(v.evaluate(-1.0).is_err());
        assert!(v.evaluate(f64::NAN).is_err());
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let g = make_grid(GridScheme::Uniform, 1.0, 3.0, 3).unwrap();
        let v = PotentialModel::tabulated(g, vec![1.0, 3.0, 7.0]).unwrap();
        assert_eq!(v.evaluate(1.0).unwrap(), 1.0);
        assert_eq!(v.evaluate(1.5).unwrap(), 2.0);
        assert_eq!(v.evaluate(2.5).unwrap(), 5.0);
        assert_eq!(v.evaluate(3.0).unwrap(), 7.0);
        assert!(matches!(v.evaluate(0.5), Err(CoreError::TabulationRange { .. })));
        assert!(matches!(v.evaluate(3.5), Err(CoreError::TabulationRange { .. })));
    }

    #[test]
    fn origin_terms_merge_and_cancel() {
        let v = PotentialModel::sum(vec![
            PotentialModel::coulomb(1.0).unwrap(),
            PotentialModel::power_law(0.5, -1.0).unwrap(),
            PotentialModel::inverse_square(0.3).unwrap(),
            PotentialModel::inverse_square(-0.3).unwrap(),
        ])
        .unwrap();
        let terms = v.origin_terms().unwrap();
        assert_eq!(terms, vec![PowerTerm { exponent: -1.0, coeff: -0.5 }]);
    }
}
