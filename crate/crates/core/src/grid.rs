use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Spacing rule used to lay out a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum GridScheme {
    /// Constant step `(r_max - r_min) / (n - 1)`. May start at the origin.
    Uniform,
    /// Geometric progression between `r_min > 0` and `r_max`.
    LogSpaced,
    /// `r_min + (r_max - r_min) * t^exponent` for `t` uniform in `[0, 1]`.
    PowerStretched { exponent: f64 },
}

/// Strictly increasing mesh of radii together with the rule that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    points: Vec<f64>,
    scheme: GridScheme,
    r_min: f64,
    r_max: f64,
}

const SPACING_TOLERANCE: f64 = 1e-12;

pub fn make_grid(scheme: GridScheme, r_min: f64, r_max: f64, n: usize) -> Result<RadialGrid, CoreError> {
    RadialGrid::new(scheme, r_min, r_max, n)
}

impl RadialGrid {
    pub fn new(scheme: GridScheme, r_min: f64, r_max: f64, n: usize) -> Result<Self, CoreError> {
        let invalid = |reason: String| Err(CoreError::InvalidGrid(reason));
        if !r_min.is_finite() || !r_max.is_finite() {
            return invalid(format!("bounds must be finite (r_min={r_min}, r_max={r_max})"));
        }
        if r_min < 0.0 {
            return invalid(format!("r_min must be non-negative, got {r_min}"));
        }
        if r_max <= r_min {
            return invalid(format!("r_max ({r_max}) must exceed r_min ({r_min})"));
        }
        if n < 3 {
            return invalid(format!("at least 3 points required, got {n}"));
        }
        let last = (n - 1) as f64;
        let points: Vec<f64> = match scheme {
            GridScheme::Uniform => {
                let h = (r_max - r_min) / last;
                (0..n).map(|i| if i == n - 1 { r_max } else { r_min + i as f64 * h }).collect()
            }
            GridScheme::LogSpaced => {
                if r_min <= 0.0 {
                    return invalid("log-spaced grids need r_min > 0".into());
                }
                let (lo, hi) = (r_min.ln(), r_max.ln());
                let step = (hi - lo) / last;
                (0..n)
                    .map(|i| match i {
                        0 => r_min,
                        i if i == n - 1 => r_max,
                        i => (lo + i as f64 * step).exp(),
                    })
                    .collect()
            }
            GridScheme::PowerStretched { exponent } => {
                if r_min <= 0.0 {
                    return invalid("power-stretched grids need r_min > 0".into());
                }
                if !(exponent.is_finite() && exponent > 0.0) {
                    return invalid(format!("stretch exponent must be positive, got {exponent}"));
                }
                (0..n)
                    .map(|i| match i {
                        0 => r_min,
                        i if i == n - 1 => r_max,
                        i => r_min + (r_max - r_min) * (i as f64 / last).powf(exponent),
                    })
                    .collect()
            }
        };
        let grid = Self { points, scheme, r_min, r_max };
        grid.check_invariants()?;
        Ok(grid)
    }

    fn check_invariants(&self) -> Result<(), CoreError> {
        if let Some(w) = self.points.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(CoreError::InvalidGrid(format!(
                "points not strictly increasing near r={} (spacing too fine for f64)",
                w[0]
            )));
        }
        let n = self.points.len();
        for (i, &r) in self.points.iter().enumerate() {
            let expected = self.nominal_point(i, n);
            if (r - expected).abs() > SPACING_TOLERANCE * expected.abs().max(1e-300) {
                return Err(CoreError::InvalidGrid(format!(
                    "point {i} ({r}) deviates from its spacing rule ({expected})"
                )));
            }
        }
        Ok(())
    }

    /// Closed-form position of point `i`, evaluated without the endpoint pinning.
    fn nominal_point(&self, i: usize, n: usize) -> f64 {
        let t = i as f64 / (n - 1) as f64;
        match self.scheme {
            GridScheme::Uniform => self.r_min + t * (self.r_max - self.r_min),
            GridScheme::LogSpaced => (self.r_min.ln() * (1.0 - t) + self.r_max.ln() * t).exp(),
            GridScheme::PowerStretched { exponent } => self.r_min + (self.r_max - self.r_min) * t.powf(exponent),
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn includes_origin(&self) -> bool {
        self.points[0] == 0.0
    }

    /// Index of the first strictly positive radius.
    pub fn first_positive(&self) -> usize {
        usize::from(self.includes_origin())
    }

    /// Constant step for uniform grids, log-step for log-spaced grids.
    pub fn step(&self) -> Option<f64> {
        let last = (self.points.len() - 1) as f64;
        match self.scheme {
            GridScheme::Uniform => Some((self.r_max - self.r_min) / last),
            GridScheme::LogSpaced => Some((self.r_max / self.r_min).ln() / last),
            GridScheme::PowerStretched { .. } => None,
        }
    }

    /// Returns the same layout with `2(n - 1) + 1` points, i.e. every step halved.
    pub fn refined(&self) -> Result<Self, CoreError> {
        Self::new(self.scheme, self.r_min, self.r_max, 2 * (self.points.len() - 1) + 1)
    }
}
