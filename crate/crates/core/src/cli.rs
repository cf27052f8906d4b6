//! The `evasion` command line.
//!
//! Exit codes: 0 success, 2 usage or invalid parameters, 3 I/O failure,
//! 4 solver or quadrature non-convergence, 5 internal error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::closed_form::ClosedFormDensity;
use crate::density::EvasionDensity;
use crate::error::{EvasionError, Result};
use crate::geometry::{Point2, WedgeDomain};
use crate::io::{self, Extent, Heatmap, RunManifest};
use crate::metrics::metrics;
use crate::potential::{EnergyPotential, TabulatedPotential};
use crate::pursuit::{
    distance_histogram, run_with_policy, tradeoff_sweep, DensitySource, DistanceVariable, PursuitConfig,
    PursuitPolicy, PursuitStatistics,
};
use crate::solver::{closed_form_gap, SolverSettings, SparseOperator, WedgeMesh};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

/// Environment variable that takes precedence over `--seed`.
pub const SEED_ENV: &str = "EVASION_SEED";

#[derive(Debug, Parser)]
#[command(name = "evasion", version, about = "Optimal stochastic evasion densities and pursuit simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form density: grid CSV, PGM heatmap, normalization and Fisher trace.
    Density,
    /// Finite-difference ground state on the wedge mesh.
    Solve {
        /// Tabulated potential CSV (r,theta,value) on the --mesh nodes.
        #[arg(long)]
        potential: Option<PathBuf>,
        /// Declare the tabulated potential radially symmetric.
        #[arg(long, requires = "potential")]
        potential_radial: bool,
    },
    /// Fisher trace, its reciprocal bound and the expected energy.
    Bound,
    /// Monte Carlo pursuit: traces, per-step histograms and tail fraction.
    Simulate {
        /// Histogram bins per step.
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Sample waypoints from the solver density on --mesh instead of the closed form.
        #[arg(long)]
        solver_density: bool,
    },
    /// Fisher trace and expected energy across trade-off weights.
    Tradeoff {
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,4")]
        rhos: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RmaxPolicy {
    /// Radius beyond which the radial law has tail mass below 1e-10.
    Auto,
    /// Use --rmax.
    Value,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, global = true, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub theta_max: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub horizon: f64,
    /// Prey position `x,y`.
    #[arg(long, global = true, default_value = "0,0", value_parser = parse_point, allow_hyphen_values = true)]
    pub prey: Point2,
    /// Predator position `x,y`.
    #[arg(long, global = true, default_value = "-2,0", value_parser = parse_point, allow_hyphen_values = true)]
    pub predator: Point2,
    /// Radial × angular resolution `NxM`.
    #[arg(long, global = true, default_value = "256x256", value_parser = parse_dims)]
    pub mesh: (usize, usize),
    #[arg(long, global = true, value_enum, default_value_t = RmaxPolicy::Auto)]
    pub rmax_policy: RmaxPolicy,
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    /// Heatmap size `WxH` in pixels.
    #[arg(long, global = true, default_value = "400x400", value_parser = parse_dims)]
    pub raster: (usize, usize),
    #[arg(long, global = true, default_value_t = 1000)]
    pub trajectories: usize,
    #[arg(long, global = true, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value = "evasion-out")]
    pub out: PathBuf,
    /// Suppress the summary lines on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
}

fn parse_point(s: &str) -> std::result::Result<Point2, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got `{s}`"))?;
    let p = Point2::new(
        x.trim().parse().map_err(|e| format!("{e}"))?,
        y.trim().parse().map_err(|e| format!("{e}"))?,
    );
    p.is_finite().then_some(p).ok_or_else(|| "coordinates must be finite".into())
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

pub fn exit_code(err: &EvasionError) -> i32 {
    use EvasionError::*;
    match err {
        CoincidentPositions | InvalidParameter { .. } | OutOfDomain { .. } | NotRadial | LengthMismatch { .. }
        | IndexOutOfRange { .. } | Table(_) => EXIT_USAGE,
        Io(_) | Json(_) => EXIT_IO,
        Csv(e) if e.is_io_error() => EXIT_IO,
        Csv(_) => EXIT_USAGE,
        NoConvergence { .. } | QuadratureFailure { .. } | NotNodeless { .. } | Factorization { .. } => EXIT_CONVERGENCE,
        CaptureEvent { .. } => EXIT_INTERNAL,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. `EVASION_SEED` is read from the environment.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli_with_seed_env(args, std::env::var(SEED_ENV).ok())
}

pub fn run_cli_with_seed_env<I, T>(args: I, seed_env: Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(s) = seed_env.filter(|s| !s.trim().is_empty()) {
        match s.trim().parse() {
            Ok(seed) => cli.common.seed = seed,
            Err(_) => {
                eprintln!("error: {SEED_ENV}=`{s}` is not an unsigned integer");
                return EXIT_USAGE;
            }
        }
    }
    let result = match cli.common.threads {
        Some(0) => Err(EvasionError::invalid("threads", "must be >= 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => {
                eprintln!("error: thread pool: {e}");
                return EXIT_INTERNAL;
            }
        },
        None => execute(&cli),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<()> {
    let started = Instant::now();
    let c = &cli.common;
    QUIET.with(|q| q.set(c.quiet));
    fs::create_dir_all(&c.out)?;
    let mut manifest = match &cli.command {
        Command::Density => cmd_density(c)?,
        Command::Solve {
            potential,
            potential_radial,
        } => cmd_solve(c, potential.as_deref(), *potential_radial)?,
        Command::Bound => cmd_bound(c)?,
        Command::Simulate { bins, solver_density } => cmd_simulate(c, *bins, *solver_density)?,
        Command::Tradeoff { rhos } => cmd_tradeoff(c, rhos)?,
    };
    manifest.config = config_json(cli);
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.outputs.push("manifest.json".into());
    manifest.write(&c.out.join("manifest.json"))?;
    Ok(())
}

fn config_json(cli: &Cli) -> serde_json::Value {
    let c = &cli.common;
    let mut v = json!({
        "theta_max": c.theta_max,
        "rho": c.rho,
        "horizon": c.horizon,
        "prey": c.prey,
        "predator": c.predator,
        "mesh": [c.mesh.0, c.mesh.1],
        "rmax_policy": format!("{:?}", c.rmax_policy).to_lowercase(),
        "rmax": c.rmax,
        "raster": [c.raster.0, c.raster.1],
        "trajectories": c.trajectories,
        "steps": c.steps,
        "seed": c.seed,
        "threads": c.threads,
    });
    let extra = match &cli.command {
        Command::Solve {
            potential,
            potential_radial,
        } => json!({ "potential": potential, "potential_radial": potential_radial }),
        Command::Simulate { bins, solver_density } => json!({ "bins": bins, "solver_density": solver_density }),
        Command::Tradeoff { rhos } => json!({ "rhos": rhos }),
        _ => json!({}),
    };
    if let (Some(obj), Some(extra)) = (v.as_object_mut(), extra.as_object()) {
        obj.extend(extra.clone());
    }
    v
}

fn r_max(c: &CommonArgs) -> Result<f64> {
    match (c.rmax_policy, c.rmax) {
        (RmaxPolicy::Auto, _) => ClosedFormDensity::tail_radius(c.theta_max, c.rho, c.horizon),
        (RmaxPolicy::Value, Some(r)) if r > 0.0 && r.is_finite() => Ok(r),
        (RmaxPolicy::Value, Some(r)) => Err(EvasionError::invalid("rmax", format!("{r} is not > 0"))),
        (RmaxPolicy::Value, None) => Err(EvasionError::invalid("rmax", "--rmax-policy value needs --rmax")),
    }
}

fn wedge(c: &CommonArgs) -> Result<WedgeDomain> {
    WedgeDomain::from_positions(c.prey, c.predator, c.theta_max, r_max(c)?)
}

fn closed_form(c: &CommonArgs) -> Result<ClosedFormDensity> {
    ClosedFormDensity::new(wedge(c)?, c.rho, c.horizon)
}

thread_local! {
    static QUIET: std::cell::Cell<bool> = const { std::cell::Cell::new(false) };
}

fn say(line: std::fmt::Arguments) -> Result<()> {
    if QUIET.with(|q| q.get()) {
        return Ok(());
    }
    let mut out = std::io::stdout().lock();
    out.write_fmt(line)?;
    out.write_all(b"\n")?;
    Ok(())
}

macro_rules! say {
    ($($t:tt)*) => { say(format_args!($($t)*)) };
}

fn cmd_density(c: &CommonArgs) -> Result<RunManifest> {
    let cf = closed_form(c)?;
    let mass = cf.total_mass()?;
    let fisher = cf.fisher_trace()?;
    let second = cf.second_moment();
    let density = EvasionDensity::ClosedForm(cf);

    let (n_r, n_theta) = c.mesh;
    io::write_density_grid(io::create(&c.out.join("density_grid.csv"))?, &density, n_r, n_theta)?;
    let extent = Extent::of_wedge(density.wedge(), density.wedge().r_max());
    let map = Heatmap::render(&density, c.raster.0, c.raster.1, extent)?;
    map.write_pgm(io::create(&c.out.join("density.pgm"))?)?;

    say!("normalization = {mass:.9}")?;
    say!("fisher_trace = {fisher:.6}")?;
    say!("bound = {:.4}", 1.0 / fisher)?;
    say!("E[r^2] = {second:.6}")?;
    let mean = density.mean();
    say!("mean = ({:.6}, {:.6})", mean.x, mean.y)?;

    let mut m = RunManifest::new("density");
    m.metrics = json!({
        "normalization": mass,
        "fisher_trace": fisher,
        "bound": 1.0 / fisher,
        "second_moment_r": second,
        "mean": mean,
        "r_max": density.wedge().r_max(),
        "heatmap_extent": extent,
        "heatmap_peak": map.peak,
    });
    m.outputs = vec!["density_grid.csv".into(), "density.pgm".into()];
    Ok(m)
}

#[derive(Serialize)]
struct SolveMetrics {
    mu: f64,
    eigenvalue: f64,
    residual_norm: f64,
    iterations: usize,
    normalization: f64,
    fisher_trace: f64,
    closed_form_mu: Option<f64>,
    linf_gap: Option<f64>,
}

fn cmd_solve(c: &CommonArgs, potential: Option<&Path>, radial: bool) -> Result<RunManifest> {
    let w = wedge(c)?;
    let mesh = WedgeMesh::new(w, c.mesh.0, c.mesh.1)?;
    let pot = match potential {
        Some(path) => {
            let file = fs::File::open(path)?;
            EnergyPotential::Tabulated(TabulatedPotential::from_csv(file, mesh, radial)?)
        }
        None => EnergyPotential::single_integrator(c.horizon, c.prey)?,
    };
    let op = SparseOperator::assemble(mesh, &pot, c.rho)?;
    let stats = op.stats();
    let gs = crate::solver::ground_state(&op, SolverSettings::default())?;
    io::write_solution(io::create(&c.out.join("solution.csv"))?, &gs)?;

    let fisher = 4.0 * SparseOperator::kinetic(mesh).quadratic_form(&gs.u) / gs.normalization();
    let comparison = if pot.is_single_integrator() {
        let cf = ClosedFormDensity::new(w, c.rho, c.horizon)?;
        Some((cf.stationary_mu(), closed_form_gap(&gs, &cf)))
    } else {
        None
    };

    say!("mu = {:.6}", gs.mu)?;
    say!("residual = {:.3e}", gs.residual_norm)?;
    say!("iterations = {}", gs.iterations)?;
    say!("fisher_trace = {fisher:.6}")?;
    if let Some((mu_cf, gap)) = comparison {
        say!("closed_form_mu = {mu_cf:.6}")?;
        say!("linf_gap = {gap:.3e}")?;
    }

    let mut m = RunManifest::new("solve");
    m.metrics = serde_json::to_value(SolveMetrics {
        mu: gs.mu,
        eigenvalue: gs.eigenvalue,
        residual_norm: gs.residual_norm,
        iterations: gs.iterations,
        normalization: gs.normalization(),
        fisher_trace: fisher,
        closed_form_mu: comparison.map(|x| x.0),
        linf_gap: comparison.map(|x| x.1),
    })?;
    m.operator = Some(stats);
    m.outputs = vec!["solution.csv".into()];
    Ok(m)
}

fn cmd_bound(c: &CommonArgs) -> Result<RunManifest> {
    let density = EvasionDensity::ClosedForm(closed_form(c)?);
    let pot = EnergyPotential::single_integrator(c.horizon, c.prey)?;
    let em = metrics(&density, &pot, c.rho)?;
    say!("fisher_trace = {:.4}", em.fisher_trace)?;
    say!("bound = {:.4}", em.bound)?;
    say!("expected_energy = {:.4}", em.expected_energy)?;
    say!("objective = {:.4}", em.objective)?;
    let mut m = RunManifest::new("bound");
    m.metrics = serde_json::to_value(em)?;
    Ok(m)
}

fn cmd_simulate(c: &CommonArgs, bins: usize, solver_density: bool) -> Result<RunManifest> {
    let cfg = PursuitConfig {
        y0: c.prey,
        z0: c.predator,
        theta_max: c.theta_max,
        rho: c.rho,
        horizon: c.horizon,
        n_steps: c.steps,
        n_trajectories: c.trajectories,
        seed: c.seed,
        density_source: if solver_density {
            DensitySource::Solver {
                n_r: c.mesh.0,
                n_theta: c.mesh.1,
            }
        } else {
            DensitySource::ClosedForm
        },
    };
    let policy = PursuitPolicy::new(&cfg)?;
    let traces = run_with_policy(&cfg, &policy);
    let stats = PursuitStatistics::from_traces(&traces, policy.bound());

    let mut outputs = vec!["traces.csv".to_string(), "step_statistics.csv".to_string()];
    io::write_traces(io::create(&c.out.join("traces.csv"))?, &traces)?;
    {
        let mut w = csv::Writer::from_writer(io::create(&c.out.join("step_statistics.csv"))?);
        for s in &stats.steps {
            w.serialize(s)?;
        }
        w.flush()?;
    }
    let hist_dir = c.out.join("histograms");
    fs::create_dir_all(&hist_dir)?;
    for k in 0..stats.steps.len() {
        for (var, tag) in [
            (DistanceVariable::Distance, "distance"),
            (DistanceVariable::SquaredDistance, "sq_distance"),
        ] {
            let name = format!("{tag}_k{k:02}.csv");
            let h = distance_histogram(&traces, k, bins, var)?;
            io::write_histogram(io::create(&hist_dir.join(&name))?, &h)?;
            outputs.push(format!("histograms/{name}"));
        }
    }

    say!("bound = {:.4}", stats.bound)?;
    for s in &stats.steps {
        say!(
            "k = {:2}  mean_sq_distance = {:.4} ± {:.4}  fraction_above_bound = {:.4}",
            s.k,
            s.mean_sq_distance,
            s.std_error,
            s.fraction_above_bound
        )?;
    }
    say!("tail_fraction = {:.4}", stats.pooled_fraction_above_bound)?;
    say!("captures = {}", stats.captures)?;

    let mut m = RunManifest::new("simulate");
    m.seed = Some(c.seed);
    m.metrics = json!({
        "fisher_trace": policy.fisher_trace(),
        "statistics": stats,
    });
    m.outputs = outputs;
    Ok(m)
}

fn cmd_tradeoff(c: &CommonArgs, rhos: &[f64]) -> Result<RunManifest> {
    if rhos.is_empty() {
        return Err(EvasionError::invalid("rhos", "empty sweep"));
    }
    let points = tradeoff_sweep(rhos, c.theta_max, c.horizon)?;
    io::write_tradeoff(io::create(&c.out.join("tradeoff.csv"))?, &points)?;
    for p in &points {
        say!(
            "rho = {}  fisher_trace = {:.4}  expected_energy = {:.4}",
            p.rho,
            p.fisher_trace,
            p.expected_energy
        )?;
    }
    let mut m = RunManifest::new("tradeoff");
    m.metrics = serde_json::to_value(&points)?;
    m.outputs = vec!["tradeoff.csv".into()];
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_points_and_dims() {
        assert_eq!(parse_point("-2, 0.5").unwrap(), Point2::new(-2.0, 0.5));
        assert!(parse_point("1;2").is_err());
        assert!(parse_point("nan,0").is_err());
        assert_eq!(parse_dims("64x32").unwrap(), (64, 32));
        assert!(parse_dims("64").is_err());
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["evasion", "simulate", "--predator", "-3,1", "--seed", "9"]).unwrap();
        assert_eq!(cli.common.predator, Point2::new(-3.0, 1.0));
        assert_eq!(cli.common.seed, 9);
        assert!(matches!(cli.command, Command::Simulate { bins: 50, .. }));
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(exit_code(&EvasionError::CoincidentPositions), EXIT_USAGE);
        assert_eq!(exit_code(&std::io::Error::other("x").into()), EXIT_IO);
        assert_eq!(exit_code(&EvasionError::Factorization { pivot: 0 }), EXIT_CONVERGENCE);
    }

    #[test]
    fn bad_usage_is_exit_2() {
        assert_eq!(run_cli_with_seed_env(["evasion", "nope"], None), EXIT_USAGE);
        assert_eq!(run_cli_with_seed_env(["evasion", "bound", "--mesh", "12"], None), EXIT_USAGE);
        assert_eq!(run_cli_with_seed_env(["evasion", "--version"], None), EXIT_OK);
    }
}
