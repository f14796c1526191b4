//! Browser front end. Every export takes plain numbers and returns a JSON string, so
//! the same functions are exercised natively by the tests.

use radial_origin::distributional::{delta_residual, laplacian_ball_flux, library, TestFunction, SMOOTH_REMAINDER};
use radial_origin::eigen::{find_eigenvalue, local_coefficient, sae_closed_form_kappa, ShootingConfig};
use radial_origin::indicial::{
    admissible_branches, classify_origin, coupling_sign, effective_coupling, indicial_exponents, Branch, IndicialData,
};
use radial_origin::{make_grid, BoundaryPolicy, EquationKind, GridScheme, PotentialModel};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Points sent back for plotting.
const PLOT_POINTS: usize = 400;
/// Smaller than the CLI default so a solve stays interactive.
const GRID_POINTS: usize = 6000;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn potential(family: &str, strength: f64) -> Result<PotentialModel, String> {
    match family {
        "coulomb" => PotentialModel::coulomb(strength),
        "harmonic" => PotentialModel::harmonic(strength),
        "coulomb_plus_harmonic" => PotentialModel::harmonic(strength)
            .and_then(|h| PotentialModel::sum(vec![PotentialModel::coulomb(1.0)?, h])),
        other => return Err(format!("unknown potential `{other}`")),
    }
    .map_err(err)
}

/// Rough outer radius: far enough for the tail to decay for the families offered.
fn outer_radius(family: &str, strength: f64, n: f64) -> f64 {
    match family {
        "coulomb" => ((2.0 * n * n + 30.0 * n) / strength.max(1e-3)).clamp(20.0, 400.0),
        _ => ((4.0 * n + 73.0) / strength.max(1e-3)).sqrt().clamp(6.0, 80.0),
    }
}

#[derive(Serialize)]
struct Curve {
    energy: f64,
    nodes: usize,
    a_plus: f64,
    delta_limit: f64,
    r: Vec<f64>,
    u: Vec<f64>,
}

/// Bound state `n_r` of partial wave `l`, thinned to a few hundred points.
pub fn eigenfunction_json(family: &str, strength: f64, l: u32, n_r: u32, klein_gordon: bool) -> Result<String, String> {
    let model = potential(family, strength)?;
    let kind = if klein_gordon { EquationKind::klein_gordon(1.0) } else { EquationKind::schrodinger(1.0) }.map_err(err)?;
    let ind = indicial_exponents(classify_origin(&model).map_err(err)?, l, kind).map_err(err)?;
    let n = f64::from(n_r + l + 1);
    let grid = make_grid(GridScheme::LogSpaced, 1e-5, outer_radius(family, strength, n), GRID_POINTS).map_err(err)?;
    let coef = local_coefficient(&model, l, kind).map_err(err)?;
    let sol = find_eigenvalue(&coef, n_r as usize, &ShootingConfig::new(grid), &ind).map_err(err)?;
    let tf = TestFunction::from_solution(&sol).map_err(err)?;
    let delta = delta_residual(&tf, &[0.02, 0.01, 0.005, 0.0025]).map_err(err)?;
    let stride = (sol.u().len() / PLOT_POINTS).max(1);
    let pick = |v: &[f64]| v.iter().step_by(stride).copied().collect::<Vec<_>>();
    let curve = Curve {
        energy: sol.energy(),
        nodes: sol.node_count(),
        a_plus: ind.a_plus(),
        delta_limit: delta.extrapolated_limit,
        r: pick(sol.grid().points()),
        u: pick(sol.u()),
    };
    serde_json::to_string(&curve).map_err(err)
}

/// Ball flux `4π(a u'(a) - u(a))` on a log scale of radii, with its extrapolated limit.
pub fn flux_curve_json(name: &str, a_min: f64, a_max: f64, points: usize) -> Result<String, String> {
    let f = library::by_name(name).ok_or_else(|| format!("unknown test function `{name}`"))?;
    if !(a_min > 0.0 && a_max > a_min && a_max <= f.r_max() && points >= 2) {
        return Err(format!("need 0 < a_min < a_max <= {} and at least 2 points", f.r_max()));
    }
    let step = (a_max / a_min).ln() / (points - 1) as f64;
    let a: Vec<f64> = (0..points).map(|i| a_min * (step * i as f64).exp()).collect();
    let flux = a.iter().map(|&x| laplacian_ball_flux(&f, x)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let rep = delta_residual(&f, &[0.02, 0.01, 0.005, 0.0025]).map_err(err)?;
    serde_json::to_string(&json!({
        "name": name,
        "u0": f.value_at_zero(),
        "a": a,
        "flux": flux,
        "predicted": rep.predicted,
        "limit": rep.extrapolated_limit,
        "remainder_exponents": SMOOTH_REMAINDER,
    }))
    .map_err(err)
}

/// Branch table for one `P`, plus the repulsive-core binding energy for `β = -1` when it exists.
pub fn admissibility_json(p: f64) -> Result<String, String> {
    let ind = IndicialData::from_p(p, 0).map_err(err)?;
    let d = admissible_branches(&ind, BoundaryPolicy::DirichletOrigin).map_err(err)?;
    let s = admissible_branches(&ind, BoundaryPolicy::SquareIntegrableOnly).map_err(err)?;
    let sae_energy = if p > 0.5 && p < 1.0 { sae_closed_form_kappa(p, -1.0).ok().map(|k| -k * k) } else { None };
    serde_json::to_string(&json!({
        "p": p,
        "a_plus": ind.a_plus(),
        "a_minus": ind.a_minus(),
        "regime": ind.regime(),
        "effective_coupling": effective_coupling(p),
        "coupling_sign": coupling_sign(p),
        "dirichlet_minus": d.admits(Branch::Minus),
        "square_integrable_minus": s.admits(Branch::Minus),
        "sae_energy": sae_energy,
    }))
    .map_err(err)
}

pub fn test_function_names() -> Vec<String> {
    library::names()
}

#[wasm_bindgen]
pub fn eigenfunction(family: &str, strength: f64, l: u32, n_r: u32, klein_gordon: bool) -> Result<String, JsValue> {
    eigenfunction_json(family, strength, l, n_r, klein_gordon).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn flux_curve(name: &str, a_min: f64, a_max: f64, points: usize) -> Result<String, JsValue> {
    flux_curve_json(name, a_min, a_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn admissibility(p: f64) -> Result<String, JsValue> {
    admissibility_json(p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn test_functions() -> String {
    serde_json::to_string(&test_function_names()).unwrap_or_default()
}
