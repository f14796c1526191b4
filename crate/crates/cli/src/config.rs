//! Run configuration: a strict JSON document, one task per file.

use std::fmt;
use std::path::{Path, PathBuf};

use radial_origin::distributional::{library, TestFunction};
use radial_origin::eigen::ShootingConfig;
use radial_origin::{make_grid, EquationKind, GridScheme, PotentialModel, RadialGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_RADII: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
const DEFAULT_REFINEMENTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Classify,
    Indicial,
    Admissibility,
    VerifyDelta,
    VerifyIdentity,
    Solve,
    Spectrum,
    SaeDemo,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Classify => "classify",
            Self::Indicial => "indicial",
            Self::Admissibility => "admissibility",
            Self::VerifyDelta => "verify-delta",
            Self::VerifyIdentity => "verify-identity",
            Self::Solve => "solve",
            Self::Spectrum => "spectrum",
            Self::SaeDemo => "sae-demo",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn yes() -> bool {
    true
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Coulomb {
        alpha: f64,
        #[serde(default = "yes")]
        attractive: bool,
    },
    Harmonic {
        omega: f64,
    },
    InverseSquare {
        g: f64,
    },
    PowerLaw {
        c: f64,
        p: f64,
    },
    Sum {
        parts: Vec<PotentialSpec>,
    },
    Tabulated {
        grid: GridSpec,
        values: Vec<f64>,
    },
}

impl PotentialSpec {
    pub fn build(&self) -> Result<PotentialModel, CliError> {
        let bad = |e: radial_origin::CoreError| CliError::schema("potential", e.to_string());
        match self {
            Self::Zero => Ok(PotentialModel::zero()),
            Self::Coulomb { alpha, attractive } => PotentialModel::coulomb_signed(*alpha, *attractive).map_err(bad),
            Self::Harmonic { omega } => PotentialModel::harmonic(*omega).map_err(bad),
            Self::InverseSquare { g } => PotentialModel::inverse_square(*g).map_err(bad),
            Self::PowerLaw { c, p } => PotentialModel::power_law(*c, *p).map_err(bad),
            Self::Sum { parts } => {
                let parts = parts.iter().map(Self::build).collect::<Result<Vec<_>, _>>()?;
                PotentialModel::sum(parts).map_err(bad)
            }
            Self::Tabulated { grid, values } => {
                PotentialModel::tabulated(grid.build("potential.grid")?, values.clone()).map_err(bad)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Schrodinger,
    KleinGordon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    #[serde(default = "schrodinger")]
    pub kind: KindName,
    #[serde(default = "one")]
    pub mass: f64,
}

fn schrodinger() -> KindName {
    KindName::Schrodinger
}

impl Default for EquationSpec {
    fn default() -> Self {
        Self { kind: KindName::Schrodinger, mass: 1.0 }
    }
}

impl EquationSpec {
    pub fn build(&self) -> Result<EquationKind, CliError> {
        let kind = match self.kind {
            KindName::Schrodinger => EquationKind::schrodinger(self.mass),
            KindName::KleinGordon => EquationKind::klein_gordon(self.mass),
        };
        kind.map_err(|e| CliError::schema("equation.mass", e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Uniform,
    LogSpaced,
    PowerStretched,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub scheme: SchemeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
}

impl Default for GridSpec {
    /// Log-spaced, `1e-6 ..= 200`, 20000 points.
    fn default() -> Self {
        Self { scheme: SchemeName::LogSpaced, exponent: None, r_min: 1e-6, r_max: 200.0, n: 20_000 }
    }
}

impl GridSpec {
    pub fn build(&self, field: &str) -> Result<RadialGrid, CliError> {
        let scheme = match (self.scheme, self.exponent) {
            (SchemeName::Uniform, None) => GridScheme::Uniform,
            (SchemeName::LogSpaced, None) => GridScheme::LogSpaced,
            (SchemeName::PowerStretched, Some(exponent)) => GridScheme::PowerStretched { exponent },
            (SchemeName::PowerStretched, None) => {
                return Err(CliError::schema(format!("{field}.exponent"), "power_stretched grids need an exponent"))
            }
            (_, Some(_)) => {
                return Err(CliError::schema(format!("{field}.exponent"), "only power_stretched grids take an exponent"))
            }
        };
        make_grid(scheme, self.r_min, self.r_max, self.n).map_err(|e| CliError::schema(field, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_energy_tol")]
    pub energy: f64,
    #[serde(default = "default_bisections")]
    pub max_bisections: usize,
}

fn default_energy_tol() -> f64 {
    ShootingConfig::DEFAULT_TOL_ENERGY
}

fn default_bisections() -> usize {
    ShootingConfig::DEFAULT_MAX_BISECTIONS
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { energy: default_energy_tol(), max_bisections: default_bisections() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_bracket: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_radius: Option<f64>,
}

/// Smooth fields for the operator identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldName {
    /// `exp(-r^2)`
    Gaussian,
    /// `r^2 exp(-r)`
    R2Exp,
    /// `cos r`
    Cosine,
    /// `1/r`
    Coulomb,
}

impl FieldName {
    pub fn label(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::R2Exp => "r2_exp",
            Self::Cosine => "cosine",
            Self::Coulomb => "coulomb",
        }
    }

    pub fn eval(self, r: f64) -> f64 {
        match self {
            Self::Gaussian => (-r * r).exp(),
            Self::R2Exp => r * r * (-r).exp(),
            Self::Cosine => r.cos(),
            Self::Coulomb => 1.0 / r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PSweep {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl PSweep {
    /// Values rounded to 12 decimals so that e.g. `0.0 + 5 * 0.1` is exactly `0.5`.
    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaeCase {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

fn all_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, formats: all_formats() }
    }
}

impl OutputSpec {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub equation: EquationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_functions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub modified_identity: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<FieldName>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_sweep: Option<PSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sae: Option<Vec<SaeCase>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a config. Syntax errors carry line and column; schema
/// errors carry the dotted path of the offending field.
pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    if !value.is_object() {
        let (line, column) = line_column(text, text.len() - text.trim_start().len());
        return Err(CliError::Parse { line, column, message: "top level must be a JSON object".into() });
    }
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().to_string();
        let field = match message.split('`').nth(1) {
            Some(key) if message.starts_with("unknown field") => {
                if path == "." {
                    key.to_owned()
                } else if path == key || path.ends_with(&format!(".{key}")) {
                    path
                } else {
                    format!("{path}.{key}")
                }
            }
            _ => path,
        };
        CliError::schema(field, message)
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_str(&text)
}

fn require<T>(x: &Option<T>, field: &str, task: Task) -> Result<(), CliError> {
    match x {
        Some(_) => Ok(()),
        None => Err(CliError::schema(field, format!("`{field}` is required for task {task}"))),
    }
}

fn positive(x: f64, field: impl Into<String>) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::schema(field, format!("must be positive and finite, got {x}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::schema(
                "schema_version",
                format!("unsupported schema version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        positive(self.equation.mass, "equation.mass")?;
        positive(self.tolerances.energy, "tolerances.energy")?;
        if self.tolerances.max_bisections == 0 {
            return Err(CliError::schema("tolerances.max_bisections", "must be positive"));
        }
        if let Some(radii) = &self.radii {
            for (i, a) in radii.iter().enumerate() {
                positive(*a, format!("radii[{i}]"))?;
            }
        }
        if self.output.formats.is_empty() {
            return Err(CliError::schema("output.formats", "at least one format is required"));
        }
        let task = self.task;
        match task {
            Task::Classify => require(&self.potential, "potential", task)?,
            Task::Indicial => {
                require(&self.potential, "potential", task)?;
                if self.l.is_none() && self.l_max.is_none() {
                    return Err(CliError::schema("l", "`l` or `l_max` is required for task indicial"));
                }
            }
            Task::Admissibility => match (&self.p_values, &self.p_sweep) {
                (Some(_), Some(_)) => return Err(CliError::schema("p_sweep", "give either `p_values` or `p_sweep`")),
                (None, None) => return Err(CliError::schema("p_values", "`p_values` or `p_sweep` is required")),
                (Some(ps), None) => {
                    for (i, p) in ps.iter().enumerate() {
                        if !(p.is_finite() && *p >= 0.0) {
                            return Err(CliError::schema(format!("p_values[{i}]"), "P must be finite and >= 0"));
                        }
                    }
                }
                (None, Some(s)) => {
                    if !(s.start >= 0.0 && s.step > 0.0 && s.count > 0) {
                        return Err(CliError::schema("p_sweep", "need start >= 0, step > 0, count > 0"));
                    }
                }
            },
            Task::VerifyDelta => {
                require(&self.test_functions, "test_functions", task)?;
                self.test_suite()?;
            }
            Task::VerifyIdentity => {
                require(&self.fields, "fields", task)?;
            }
            Task::Solve => {
                require(&self.potential, "potential", task)?;
                require(&self.l, "l", task)?;
                require(&self.n_r, "n_r", task)?;
            }
            Task::Spectrum => {
                require(&self.potential, "potential", task)?;
                require(&self.l_max, "l_max", task)?;
                require(&self.n_max, "n_max", task)?;
            }
            Task::SaeDemo => {
                require(&self.sae, "sae", task)?;
                for (i, c) in self.sae.iter().flatten().enumerate() {
                    if c.beta.is_some() == c.kappa.is_some() {
                        return Err(CliError::schema(format!("sae[{i}]"), "give exactly one of `beta` and `kappa`"));
                    }
                }
                for (i, s) in self.scales.iter().flatten().enumerate() {
                    positive(*s, format!("scales[{i}]"))?;
                }
            }
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        self.radii.clone().unwrap_or_else(|| DEFAULT_RADII.to_vec())
    }

    pub fn refinements(&self) -> usize {
        self.refinements.unwrap_or(DEFAULT_REFINEMENTS)
    }

    pub fn p_list(&self) -> Vec<f64> {
        match (&self.p_values, &self.p_sweep) {
            (Some(ps), _) => ps.clone(),
            (None, Some(s)) => s.values(),
            (None, None) => Vec::new(),
        }
    }

    /// Library test functions by name; `suite`, `nonvanishing` and `vanishing` expand to groups.
    pub fn test_suite(&self) -> Result<Vec<TestFunction>, CliError> {
        let mut out = Vec::new();
        for (i, name) in self.test_functions.iter().flatten().enumerate() {
            match name.as_str() {
                "suite" => out.extend(library::suite()),
                "nonvanishing" => out.extend(library::nonvanishing()),
                "vanishing" => out.extend(library::vanishing()),
                other => match library::by_name(other) {
                    Some(f) => out.push(f),
                    None => {
                        return Err(CliError::schema(
                            format!("test_functions[{i}]"),
                            format!("unknown test function `{other}`; known: {}", library::names().join(", ")),
                        ))
                    }
                },
            }
        }
        Ok(out)
    }

    pub fn model(&self) -> Result<PotentialModel, CliError> {
        match &self.potential {
            Some(p) => p.build(),
            None => Err(CliError::schema("potential", "`potential` is required")),
        }
    }

    pub fn shooting(&self) -> Result<ShootingConfig, CliError> {
        let mut cfg = ShootingConfig::new(self.grid.build("grid")?);
        cfg.tol_energy = self.tolerances.energy;
        cfg.max_bisections = self.tolerances.max_bisections;
        cfg.match_index = self.solver.match_index;
        cfg.series_radius = self.solver.series_radius;
        cfg.e_bracket = self.solver.energy_bracket.map(|[lo, hi]| (lo, hi));
        cfg.validate().map_err(|e| CliError::schema("solver", e.to_string()))?;
        Ok(cfg)
    }
}
