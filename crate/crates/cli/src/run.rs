//! Task dispatch. Each task turns a validated config into an in-memory [`Bundle`].

use std::path::{Path, PathBuf};

use radial_origin::distributional::{
    delta_residual, modified_identity_check, operator_identity_check, FluxReport, ModifiedIdentityReport, TestFunction,
};
use radial_origin::eigen::{
    beta_for_kappa, find_eigenvalue, local_coefficient, sae_bound_state, sae_closed_form_kappa, spectrum, MissingLevel,
    SaeDemoResult,
};
use radial_origin::indicial::{
    admissible_branches, classify_origin, coupling_sign, effective_coupling, indicial_exponents, Branch, IndicialData,
    OriginClass,
};
use radial_origin::{make_grid, BoundaryPolicy, RadialSolution};
use serde::Serialize;

use crate::config::{parse_config, RunConfig, Task};
use crate::emit::{now, write_bundle, write_error, Bundle, FileEntry, Table};
use crate::error::CliError;

pub const OUT_ENV: &str = "RADIAL_ORIGIN_OUT";
pub const DEFAULT_OUT: &str = "radial-origin-out";

/// Snake-case name of a unit enum variant as serde writes it.
fn tag<T: Serialize>(x: &T) -> String {
    match serde_json::to_value(x) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Bundle, CliError> {
    let mut b = Bundle::default();
    match cfg.task {
        Task::Classify => classify(cfg, &mut b)?,
        Task::Indicial => indicial(cfg, &mut b)?,
        Task::Admissibility => admissibility(cfg, &mut b)?,
        Task::VerifyDelta => verify_delta(cfg, &mut b)?,
        Task::VerifyIdentity => verify_identity(cfg, &mut b)?,
        Task::Solve => solve(cfg, &mut b)?,
        Task::Spectrum => spectrum_task(cfg, &mut b)?,
        Task::SaeDemo => sae_demo(cfg, &mut b)?,
    }
    Ok(b)
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    potential: &'a str,
    origin_class: OriginClass,
}

fn classify(cfg: &RunConfig, b: &mut Bundle) -> Result<(), CliError> {
    let model = cfg.model()?;
    let oc = classify_origin(&model)?;
    let limit = match oc {
        OriginClass::Regular { coulomb_limit } => coulomb_limit,
        OriginClass::TransitiveSingular { limit } => Some(limit),
        OriginClass::SuperSingular => None,
    };
    let mut t = Table::new(&["class", "limit"]);
    t.push(vec![class_name(&oc).into(), limit.into()]);
    b.csv(cfg, "classify.csv", &t);
    b.json(cfg, "classify.json", &ClassifyReport { potential: model.label(), origin_class: oc });
    Ok(())
}

fn class_name(oc: &OriginClass) -> &'static str {
    match oc {
        OriginClass::Regular { .. } => "regular",
        OriginClass::TransitiveSingular { .. } => "transitive_singular",
        OriginClass::SuperSingular => "super_singular",
    }
}

fn indicial(cfg: &RunConfig, b: &mut Bundle) -> Result<(), CliError> {
    let model = cfg.model()?;
    let kind = cfg.equation.build()?;
    let oc = classify_origin(&model)?;
    let ls: Vec<u32> = match (cfg.l, cfg.l_max) {
        (Some(l), _) => vec![l],
        (None, Some(l_max)) => (0..=l_max).collect(),
        (None, None) => vec![0],
    };
    let mut t = Table::new(&["l", "p_squared", "p", "a_plus", "a_minus", "regime"]);
    let mut rows = Vec::new();
    for l in ls {
        let ind = indicial_exponents(oc, l, kind)?;
        t.push(vec![
            l.into(),
            ind.p_squared().into(),
            ind.p().into(),
            ind.a_plus().into(),
            ind.a_minus().into(),
            tag(&ind.regime()).into(),
        ]);
        rows.push(ind);
    }
    b.csv(cfg, "indicial.csv", &t);
    b.json(cfg, "indicial.json", &serde_json::json!({ "potential": model.label(), "origin_class": oc, "rows": rows }));
    Ok(())
}

#[derive(Serialize)]
struct AdmissibilityRow {
    p: f64,
    regime: String,
    effective_coupling: f64,
    coupling_sign: String,
    dirichlet: Vec<Branch>,
    square_integrable: Vec<Branch>,
}

fn admissibility(cfg: &RunConfig, b: &mut Bundle) -> Result<(), CliError> {
    let mut t = Table::new(&[
        "p",
        "regime",
        "effective_coupling",
        "coupling_sign",
        "dirichlet_plus",
        "dirichlet_minus",
        "square_integrable_plus",
        "square_integrable_minus",
    ]);
    let mut rows = Vec::new();
    for p in cfg.p_list() {
        let ind = IndicialData::from_p(p, cfg.l.unwrap_or(0))?;
        let d = admissible_branches(&ind, BoundaryPolicy::DirichletOrigin)?;
        let s = admissible_branches(&ind, BoundaryPolicy::SquareIntegrableOnly)?;
        let row = AdmissibilityRow {
            p,
            regime: tag(&ind.regime()),
            effective_coupling: effective_coupling(p),
            coupling_sign: tag(&coupling_sign(p)),
            dirichlet: d.admitted(),
            square_integrable: s.admitted(),
        };
        t.push(vec![
            p.into(),
            row.regime.clone().into(),
            row.effective_coupling.into(),
            row.coupling_sign.clone().into(),
            d.plus.into(),
            d.minus.into(),
            s.plus.into(),
            s.minus.into(),
        ]);
        rows.push(row);
    }
    b.csv(cfg, "admissibility.csv", &t);
    b.json(cfg, "admissibility.json", &serde_json::json!({ "rows": rows }));
    Ok(())
}

fn flux_table(rep: &FluxReport) -> Table {
    let mut t = Table::new(&["a", "flux", "predicted", "abs_error"]);
    for (&a, &flux) in rep.radii.iter().zip(&rep.flux_values) {
        t.push(vec![a.into(), flux.into(), rep.predicted.into(), (flux - rep.predicted).abs().into()]);
    }
    t
}

fn modified_table(rep: &ModifiedIdentityReport) -> Table {
    let mut t = Table::new(&["a", "flux", "smooth", "gap", "predicted"]);
    for i in 0..rep.radii.len() {
        t.push(vec![
            rep.radii[i].into(),
            rep.flux_values[i].into(),
            rep.smooth_values[i].into(),
            rep.gap_values[i].into(),
            rep.predicted.into(),
        ]);
    }
    t
}

#[derive(Serialize)]
struct DeltaSummary {
    radii: Vec<f64>,
    functions: usize,
    max_abs_error: f64,
    reports: Vec<FluxReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modified: Option<Vec<ModifiedIdentityReport>>,
}

fn verify_delta(cfg: &RunConfig, b: &mut Bundle) -> Result<(), CliError> {
    let radii = cfg.radii();
    let suite = cfg.test_suite()?;
    let mut reports = Vec::with_capacity(suite.len());
    let mut modified = Vec::new();
    for f in &suite {
        let rep = delta_residual(f, &radii)?;
        b.csv(cfg, format!("flux_{}.csv", f.label()), &flux_table(&rep));
        reports.push(rep);
        if cfg.modified_identity {
            let m = modified_identity_check(f, &radii)?;
            b.csv(cfg, format!("modified_{}.csv", f.label()), &modified_table(&m));
            modified.push(m);
        }
    }
    let summary = DeltaSummary {
        radii,
        functions: reports.len(),
        max_abs_error: reports.iter().map(|r| r.abs_error).fold(0.0, f64::max),
        reports,
        modified: cfg.modified_identity.then_some(modified),
    };
    b.json(cfg, "verify_delta.json", &summary);
    Ok(())
}

#[derive(Serialize)]
struct IdentityRow {
    field: &'static str,
    n: usize,
    max_abs_difference: f64,
    worst_radius: f64,
    ratio: Option<f64>,
}

fn verify_identity(cfg: &RunConfig, b: &mut Bundle) -> Result<(), CliError> {
    let base = cfg.grid.build("grid")?;
    let mut t = Table::new(&["field", "n", "max_abs_difference", "worst_radius", "ratio"]);
    let mut rows = Vec::new();
    let mut reference = Vec::new();
    for &field in cfg.fields.iter().flatten() {
        let mut grid = base.clone();
        let mut previous: Option<f64> = None;
        for k in 0..=cfg.refinements() {
            if k > 0 {
                grid = grid.refined()?;
            }
            let c = operator_identity_check(|r| field.eval(r), &grid)?;
            let ratio = previous.map(|p| p / c.max_abs_difference);
            previous = Some(c.max_abs_difference);
            t.push(vec![
                field.label().into(),
                grid.len().into(),
                c.max_abs_difference.into(),
                c.worst_radius.into(),
                ratio.into(),
            ]);
            rows.push(IdentityRow {
                field: field.label(),
                n: grid.len(),
                max_abs_difference: c.max_abs_difference,
                worst_radius: c.worst_radius,
                ratio,
            });
        }
        if let Some(n) = cfg.reference_points {
            let g = make_grid(base.scheme(), base.r_min(), base.r_max(), n)
                .map_err(|e| CliError::schema("reference_points", e.to_string()))?;
            let c = operator_identity_check(|r| field.eval(r), &g)?;
            reference.push(IdentityRow {
                field: field.label(),
                n,
                max_abs_difference: c.max_abs_difference,
                worst_radius: c.worst_radius,
                ratio: None,
            });
        }
    }
    b.csv(cfg, "identity.csv", &t);
    b.json(cfg, "identity.json", &serde_json::json!({ "rows": rows, "reference": reference }));
    Ok(())
}

/// Node count, norm and delta residual of an eigenfunction.
#[derive(Debug, Clone, Serialize)]
struct LevelCheck {
    n_r: usize,
    l: u32,
    energy: f64,
    nodes: usize,
    norm: f64,
    delta_limit: f64,
}

fn level_check(sol: &RadialSolution, n_r: usize, radii: &[f64]) -> Result<(LevelCheck, FluxReport), CliError> {
    let tf = TestFunction::from_solution(sol)?;
    let rep = delta_residual(&tf, radii)?;
    let check = LevelCheck {
        n_r,
        l: sol.l(),
        energy: sol.energy(),
        nodes: sol.node_count(),
        norm: sol.norm(),
        delta_limit: rep.extrapolated_limit,
    };
    Ok((check, rep))
}

fn solve(cfg: &RunConfig, b: &mut Bundle) -> Result<(), CliError> {
    let model = cfg.model()?;
    let kind = cfg.equation.build()?;
    let shooting = cfg.shooting()?;
    let (l, n_r) = (cfg.l.unwrap_or(0), cfg.n_r.unwrap_or(0));
    let ind = indicial_exponents(classify_origin(&model)?, l, kind)?;
    let coef = local_coefficient(&model, l, kind)?;
    let sol = find_eigenvalue(&coef, n_r, &shooting, &ind)?;
    let (check, delta) = level_check(&sol, n_r, &cfg.radii())?;

    let mut t = Table::new(&["r", "u"]);
    for (&r, &u) in sol.grid().points().iter().zip(sol.u()) {
        t.push(vec![r.into(), u.into()]);
    }
    b.csv(cfg, "solution.csv", &t);
    b.json(
        cfg,
        "solve.json",
        &serde_json::json!({
            "potential": model.label(),
            "equation": kind,
            "a_plus": ind.a_plus(),
            "level": check,
            "delta_check": delta,
            "curve": "solution.csv",
        }),
    );
    Ok(())
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    potential: &'a str,
    equation: radial_origin::EquationKind,
    levels: Vec<LevelCheck>,
    missing: Vec<MissingLevel>,
}

fn spectrum_task(cfg: &RunConfig, b: &mut Bundle) -> Result<(), CliError> {
    let model = cfg.model()?;
    let kind = cfg.equation.build()?;
    let shooting = cfg.shooting()?;
    let s = spectrum(&model, kind, cfg.l_max.unwrap_or(0), cfg.n_max.unwrap_or(0), &shooting)?;
    let radii = cfg.radii();
    let mut t = Table::new(&["n_r", "l", "energy"]);
    let mut levels = Vec::with_capacity(s.levels.len());
    for level in &s.levels {
        t.push(vec![level.n_r.into(), level.l.into(), level.energy.into()]);
        levels.push(level_check(&level.solution, level.n_r, &radii)?.0);
    }
    b.csv(cfg, "spectrum.csv", &t);
    b.json(cfg, "spectrum.json", &SpectrumReport { potential: model.label(), equation: kind, levels, missing: s.missing });
    Ok(())
}

#[derive(Serialize)]
struct ScalingRow {
    p: f64,
    beta: f64,
    scale: f64,
    energy: f64,
    scaled_energy: f64,
    relative_error: f64,
    numeric_relative_error: f64,
}

fn sae_demo(cfg: &RunConfig, b: &mut Bundle) -> Result<(), CliError> {
    let mut results: Vec<SaeDemoResult> = Vec::new();
    let mut t = Table::new(&[
        "p",
        "beta",
        "energy",
        "closed_form_kappa",
        "numeric_kappa",
        "relative_difference",
        "minus_branch_dirichlet",
        "minus_branch_square_integrable",
    ]);
    let mut st = Table::new(&["p", "beta", "scale", "energy", "scaled_energy", "relative_error", "numeric_relative_error"]);
    let mut scaling = Vec::new();
    for case in cfg.sae.iter().flatten() {
        let beta = match (case.beta, case.kappa) {
            (Some(beta), _) => beta,
            (None, Some(kappa)) => beta_for_kappa(case.p, kappa)?,
            (None, None) => unreachable!("validated"),
        };
        let r = sae_bound_state(case.p, beta)?;
        t.push(vec![
            r.p.into(),
            r.beta.into(),
            r.energy.into(),
            r.closed_form_kappa.into(),
            r.numeric_kappa.into(),
            r.relative_difference.into(),
            r.minus_branch_dirichlet.into(),
            r.minus_branch_square_integrable.into(),
        ]);
        for &s in cfg.scales.iter().flatten() {
            let scaled_beta = beta * s.powf(2.0 * case.p);
            let k = sae_closed_form_kappa(case.p, scaled_beta)?;
            let scaled_energy = -k * k;
            let numeric = sae_bound_state(case.p, scaled_beta)?;
            let row = ScalingRow {
                p: case.p,
                beta,
                scale: s,
                energy: r.energy,
                scaled_energy,
                relative_error: (scaled_energy * s * s / r.energy - 1.0).abs(),
                numeric_relative_error: (numeric.numeric_kappa * s / r.numeric_kappa - 1.0).abs(),
            };
            st.push(vec![
                row.p.into(),
                row.beta.into(),
                row.scale.into(),
                row.energy.into(),
                row.scaled_energy.into(),
                row.relative_error.into(),
                row.numeric_relative_error.into(),
            ]);
            scaling.push(row);
        }
        results.push(r);
    }
    b.csv(cfg, "sae.csv", &t);
    if !scaling.is_empty() {
        b.csv(cfg, "sae_scaling.csv", &st);
    }
    b.json(cfg, "sae.json", &serde_json::json!({ "states": results, "scaling": scaling }));
    Ok(())
}

/// `--out`, then `output.dir`, then the environment variable, then the default.
pub fn output_dir(cli_out: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    if let Some(p) = cli_out {
        return p.to_owned();
    }
    if let Some(p) = cfg.and_then(|c| c.output.dir.clone()) {
        return p;
    }
    match std::env::var_os(OUT_ENV) {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from(DEFAULT_OUT),
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub dir: PathBuf,
    pub files: Vec<FileEntry>,
}

#[derive(Debug)]
pub struct Failure {
    pub error: CliError,
    pub dir: PathBuf,
    /// Where `error.json` went, if it could be written.
    pub report_path: Option<PathBuf>,
}

/// Parses `config`, checks it is for `task`, runs it and writes the bundle. Failures
/// leave an `error.json` in the output directory when possible.
pub fn execute(task: Task, config: &Path, out: Option<&Path>) -> Result<Outcome, Failure> {
    let started_at = now();
    let parsed = parse_config(config);
    let dir = output_dir(out, parsed.as_ref().ok());
    let result = parsed.and_then(|cfg| {
        if cfg.task != task {
            return Err(CliError::schema(
                "task",
                format!("config is for task `{}` but `{task}` was requested", cfg.task),
            ));
        }
        let bundle = run(&cfg)?;
        write_bundle(&dir, &cfg, &bundle, started_at)
    });
    match result {
        Ok(files) => Ok(Outcome { dir, files }),
        Err(error) => {
            let report_path = write_error(&dir, &error.report()).ok();
            Err(Failure { error, dir, report_path })
        }
    }
}
