use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use radial_origin_cli::{execute, Task};

const COMMON: &str = "\
Config files are strict JSON (unknown keys are errors). Keys shared by every task:
  schema_version  1 (required)
  task            must match the subcommand (required)
  output          {\"dir\": path, \"formats\": [\"csv\", \"json\"]}
Potentials use {\"family\": ...}: zero; coulomb {alpha, attractive = true};
harmonic {omega}; inverse_square {g}; power_law {c, p}; sum {parts: [...]};
tabulated {grid, values}.
Output directory: --out, else output.dir, else $RADIAL_ORIGIN_OUT, else ./radial-origin-out.
Every run writes manifest.json (config echo, timestamps, sha256 of each file).
Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 I/O error.";

const CLASSIFY: &str = "\
Classifies lim r^2 V(r) at the origin.
  potential  (required)
Writes classify.csv (class,limit) and classify.json.";

const INDICIAL: &str = "\
Indicial exponents a± = 1/2 ± P for each partial wave.
  potential  (required)
  equation   {\"kind\": \"schrodinger\" | \"klein_gordon\", \"mass\": 1.0}
  l | l_max  one partial wave, or 0..=l_max
Writes indicial.csv (l,p_squared,p,a_plus,a_minus,regime) and indicial.json.
Attractive inverse-square cores with P^2 < 0 fail with FallToCenter.";

const ADMISSIBILITY: &str = "\
Which near-origin branches survive DirichletOrigin and SquareIntegrableOnly.
  p_values  [P, ...]  or  p_sweep {start, step, count}
Writes admissibility.csv (p,regime,effective_coupling,coupling_sign,dirichlet_plus,
dirichlet_minus,square_integrable_plus,square_integrable_minus) and admissibility.json.";

const VERIFY_DELTA: &str = "\
Shrinking-ball flux of the Laplacian of u(r)/r and its a -> 0 limit.
  test_functions     names from the bundled library, or suite | nonvanishing | vanishing
  radii              decreasing schedule, default [0.1, 0.05, 0.025, 0.0125]
  modified_identity  also check the corrected identity (default false)
Writes flux_<name>.csv (a,flux,predicted,abs_error), modified_<name>.csv
(a,flux,smooth,gap,predicted) and verify_delta.json.";

const VERIFY_IDENTITY: &str = "\
Finite-difference comparison of (1/r^2)(r^2 f')' with (1/r)(r f)'' away from the origin.
  fields            [gaussian | r2_exp | cosine | coulomb]
  grid              {scheme, exponent?, r_min > 0, r_max, n}
  refinements       number of step halvings, default 3
  reference_points  optional extra grid size to report
Writes identity.csv (field,n,max_abs_difference,worst_radius,ratio) and identity.json.";

const SOLVE: &str = "\
One bound state with u(0) = 0.
  potential, equation, l, n_r  (required except equation)
  grid        default {\"scheme\": \"log_spaced\", \"r_min\": 1e-6, \"r_max\": 200, \"n\": 20000}
  tolerances  {\"energy\": 1e-10, \"max_bisections\": 200}
  solver      {energy_bracket: [lo, hi], match_index, series_radius}, all optional
  radii       schedule for the delta check of the eigenfunction
Writes solution.csv (r,u) and solve.json.";

const SPECTRUM: &str = "\
All levels with n_r <= n_max and l <= l_max, sorted by energy.
  potential, l_max, n_max  (required); equation, grid, tolerances, solver, radii as for solve
Writes spectrum.csv (n_r,l,energy) and spectrum.json with per-level node counts,
norms, delta limits and any levels that could not be found.";

const SAE_DEMO: &str = "\
Bound state of the repulsive inverse-square potential built from the singular branch.
  sae     [{\"p\": 0.75, \"beta\": -2.0} | {\"p\": 0.75, \"kappa\": 1.0}, ...], 1/2 < p < 1
  scales  optional [s, ...] for the check E(beta s^(2P)) = E(beta)/s^2
Writes sae.csv (p,beta,energy,closed_form_kappa,numeric_kappa,relative_difference,
minus_branch_dirichlet,minus_branch_square_integrable), sae_scaling.csv and sae.json.";

#[derive(Parser)]
#[command(name = "radial-origin", version, about = "Origin behaviour of the reduced radial equation", after_long_help = COMMON)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// JSON config file
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the origin behaviour of a potential
    #[command(long_about = CLASSIFY, after_long_help = COMMON)]
    Classify(Io),
    /// Indicial exponents per partial wave
    #[command(long_about = INDICIAL, after_long_help = COMMON)]
    Indicial(Io),
    /// Branch admissibility table over P
    #[command(long_about = ADMISSIBILITY, after_long_help = COMMON)]
    Admissibility(Io),
    /// Delta-function residual of test functions
    #[command(long_about = VERIFY_DELTA, after_long_help = COMMON)]
    VerifyDelta(Io),
    /// Operator identity away from the origin
    #[command(long_about = VERIFY_IDENTITY, after_long_help = COMMON)]
    VerifyIdentity(Io),
    /// One bound state
    #[command(long_about = SOLVE, after_long_help = COMMON)]
    Solve(Io),
    /// Bound-state spectrum
    #[command(long_about = SPECTRUM, after_long_help = COMMON)]
    Spectrum(Io),
    /// Spurious bound state of a repulsive core
    #[command(long_about = SAE_DEMO, after_long_help = COMMON)]
    SaeDemo(Io),
}

fn main() -> ExitCode {
    let (task, io) = match Cli::parse().command {
        Command::Classify(io) => (Task::Classify, io),
        Command::Indicial(io) => (Task::Indicial, io),
        Command::Admissibility(io) => (Task::Admissibility, io),
        Command::VerifyDelta(io) => (Task::VerifyDelta, io),
        Command::VerifyIdentity(io) => (Task::VerifyIdentity, io),
        Command::Solve(io) => (Task::Solve, io),
        Command::Spectrum(io) => (Task::Spectrum, io),
        Command::SaeDemo(io) => (Task::SaeDemo, io),
    };
    match execute(task, &io.config, io.out.as_deref()) {
        Ok(outcome) => {
            println!("{}: wrote {} files to {}", task, outcome.files.len() + 1, outcome.dir.display());
            ExitCode::SUCCESS
        }
        Err(f) => {
            let report = serde_json::to_string(&f.error.report()).unwrap_or_default();
            eprintln!("{report}");
            ExitCode::from(f.error.exit_code() as u8)
        }
    }
}
