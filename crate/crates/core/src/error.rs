use thiserror::Error;

/// Failures of the shared grid, potential and quadrature layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("radius {0} outside the domain r > 0")]
    DomainError(f64),
    #[error("radius {r} outside tabulated range [{lo}, {hi}]")]
    TabulationRange { r: f64, lo: f64, hi: f64 },
    #[error("length mismatch: {values} values for {points} grid points")]
    LengthMismatch { values: usize, points: usize },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid equation kind: {0}")]
    InvalidEquation(String),
    #[error("invalid radial solution: {0}")]
    InvalidSolution(String),
}

impl CoreError {
    /// Stable variant name, used in machine-readable error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Self::InvalidGrid(_) => "InvalidGrid",
            Self::DomainError(_) => "DomainError",
            Self::TabulationRange { .. } => "TabulationRange",
            Self::LengthMismatch { .. } => "LengthMismatch",
            Self::InvalidPotential(_) => "InvalidPotential",
            Self::InvalidEquation(_) => "InvalidEquation",
            Self::InvalidSolution(_) => "InvalidSolution",
        }
    }
}
