//! Pipelines behind each command.

use std::fs;
use std::path::PathBuf;

use super::config::{Command, InitialKind, RunConfig, TerminalKind};
use super::manifest::RunManifest;
use super::validate::{run_battery, write_battery_csv};
use crate::error::{Error, Result};
use crate::fpsolver::{read_initial_density, read_profile_csv, solve_fp, write_field_bin, write_field_csv, FpOptions};
use crate::fracops::FractionalOrder;
use crate::grid::{Field, SpaceGrid, TimeGrid};
use crate::hjbsolver::{solve_hjb, HamiltonianSpec, HjbOptions, TerminalCost};
use crate::mfg::{gaussian_density, solve_mfg, write_solution, CouplingSpec, MfgProblem};
use crate::subdiffusion::{
    empirical_density_field, histogram, mean_var, simulate_from_density, simulate_time_changed_sde, wasserstein1, write_ensemble,
    write_summary_csv, CoefficientSpec, InverseSampler, PathEnsemble,
};

/// Exit code for a completed run with failed monitors.
pub const EXIT_WARNINGS: i32 = 2;
pub const EXIT_ERROR: i32 = 1;

struct Setup {
    beta: FractionalOrder,
    time: TimeGrid,
    space: SpaceGrid,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let p = &cfg.problem;
    Ok(Setup {
        beta: FractionalOrder::new(p.beta)?,
        time: TimeGrid::new(p.horizon, p.n_steps)?,
        space: SpaceGrid::new(p.x_min, p.x_max, p.n_cells)?,
    })
}

fn initial_density(cfg: &RunConfig, space: &SpaceGrid) -> Result<Vec<f64>> {
    let init = &cfg.initial;
    match init.kind {
        InitialKind::Gaussian => Ok(gaussian_density(space, init.center, init.width)),
        InitialKind::Uniform => Ok(vec![1.0 / space.length(); space.n_cells()]),
        InitialKind::Csv => read_initial_density(init.path.as_deref().expect("validated"), space),
    }
}

fn terminal_cost(cfg: &RunConfig, space: &SpaceGrid) -> Result<TerminalCost> {
    let h = &cfg.hjb;
    match h.terminal {
        TerminalKind::Cosine => {
            let (lo, l, a) = (space.x_min(), space.length(), h.amplitude);
            TerminalCost::from_fn(*space, |x| a * (std::f64::consts::TAU * (x - lo) / l).cos())
        }
        TerminalKind::Csv => TerminalCost::read_csv(h.terminal_path.as_deref().expect("validated"), *space),
    }
}

fn hjb_options(cfg: &RunConfig) -> HjbOptions {
    HjbOptions { d2_bound: cfg.hjb.d2_bound, clock: cfg.hjb.clock, ..Default::default() }
}

fn fp_options(cfg: &RunConfig) -> FpOptions {
    FpOptions { clip_negative: cfg.fp.clip_negative, ill_posed: cfg.fp.ill_posed }
}

fn write_field(cfg: &RunConfig, m: &mut RunManifest, name: &str, field: &Field) -> Result<()> {
    let dir = &cfg.output.dir;
    if cfg.output.format.csv() {
        let p = dir.join(format!("{name}.csv"));
        write_field_csv(&p, field, name)?;
        m.outputs.push(p);
    }
    if cfg.output.format.bin() {
        let p = dir.join(format!("{name}.bin"));
        write_field_bin(&p, field)?;
        m.outputs.push(p);
    }
    Ok(())
}

/// Fitted exponent of `Var X_t` against `t` over the second half of the grid.
pub fn second_moment_exponent(ens: &PathEnsemble) -> f64 {
    let n_t = ens.n_t();
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    for n in n_t / 2..n_t {
        let (_, var) = mean_var(&ens.x_slice(n));
        lx.push(ens.t_grid.t(n).ln());
        ly.push(var.ln());
    }
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn simulate(cfg: &RunConfig, m: &mut RunManifest) -> Result<()> {
    let s = setup(cfg)?;
    let sim = &cfg.simulate;
    let sigma = (2.0 * cfg.problem.nu).sqrt();
    let coeffs = CoefficientSpec::constant(sim.drift, sigma);
    let sampler = InverseSampler::new(s.beta, s.time);
    let ens = m.stage("simulate", || simulate_time_changed_sde(&coeffs, sim.x0, &sampler, sim.n_paths, cfg.seed))?;
    let dir = &cfg.output.dir;
    if cfg.output.format.bin() {
        let p = dir.join("ensemble.bin");
        write_ensemble(&p, &ens)?;
        m.outputs.push(p);
    }
    let p = dir.join("ensemble_summary.csv");
    write_summary_csv(&p, &ens)?;
    m.outputs.push(p);
    let density = empirical_density_field(&ens, &s.space)?;
    write_field(cfg, m, "density_mc", &density)?;
    if sim.drift == 0.0 {
        let exponent = second_moment_exponent(&ens);
        m.check_le("second_moment_exponent_error", (exponent - s.beta.value()).abs(), 0.1);
    }
    Ok(())
}

fn constant_drift(s: &Setup, b: f64) -> Field {
    Field::from_fn(s.time, s.space, |_, _| b)
}

fn solve_fp_run(cfg: &RunConfig, m: &mut RunManifest) -> Result<Field> {
    let s = setup(cfg)?;
    let m0 = initial_density(cfg, &s.space)?;
    let drift = constant_drift(&s, cfg.fp.drift);
    let sol = m.stage("solve_fp", || solve_fp(&m0, &drift, cfg.problem.nu, s.beta, fp_options(cfg)))?;
    write_field(cfg, m, "density", &sol.m)?;
    if !cfg.fp.ill_posed {
        m.check_le("max_mass_drift", sol.max_mass_drift, 1e-12);
    }
    m.check_le("negativity", -sol.min_value, crate::fpsolver::NEGATIVITY_TOL);
    m.check("no_clipping", sol.clipped_steps == 0);
    Ok(sol.m)
}

fn compare(cfg: &RunConfig, m: &mut RunManifest, against_mc: bool) -> Result<()> {
    if !against_mc {
        return Err(Error::Config("compare needs --against-mc".into()));
    }
    let s = setup(cfg)?;
    let pde = solve_fp_run(cfg, m)?;
    let m0 = initial_density(cfg, &s.space)?;
    let coeffs = CoefficientSpec::constant(cfg.fp.drift, (2.0 * cfg.problem.nu).sqrt());
    let sampler = InverseSampler::new(s.beta, s.time);
    let n_paths = cfg.simulate.n_paths;
    let ens = m.stage("simulate", || simulate_from_density(&coeffs, &m0, &s.space, &sampler, n_paths, cfg.seed))?;
    let p = cfg.output.dir.join("compare.csv");
    let mut w = csv::Writer::from_path(&p)?;
    w.write_record(["t", "w1"])?;
    let dx = s.space.dx();
    let mut last = 0.0;
    for n in 0..s.time.n_nodes() {
        // the PDE domain is periodic, so paths are wrapped onto it
        let xs: Vec<f64> = ens.x_slice(n).into_iter().map(|x| s.space.wrap(x)).collect();
        let hist = histogram(&xs, &s.space)?;
        last = wasserstein1(pde.slice(n), &hist, dx)?;
        w.write_record([s.time.t(n).to_string(), last.to_string()])?;
    }
    w.flush()?;
    m.outputs.push(p);
    // Sampling noise: two half ensembles differ by about twice the noise
    // of the full one.
    let mut halves = [Vec::new(), Vec::new()];
    for (i, x) in ens.x_slice(s.time.n_steps()).into_iter().enumerate() {
        halves[i % 2].push(s.space.wrap(x));
    }
    let noise = 0.5 * wasserstein1(&histogram(&halves[0], &s.space)?, &histogram(&halves[1], &s.space)?, dx)?;
    // Discretization: the same solve on a grid refined twice in x and t.
    let fine_time = s.time.refined(2);
    let fine_space = s.space.refined(2);
    let fine_m0 = initial_density(cfg, &fine_space)?;
    let fine_drift = Field::from_fn(fine_time, fine_space, |_, _| cfg.fp.drift);
    let fine = m.stage("solve_fp_fine", || solve_fp(&fine_m0, &fine_drift, cfg.problem.nu, s.beta, fp_options(cfg)))?;
    let restricted: Vec<f64> = fine.m.slice(fine_time.n_steps()).chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    let richardson = wasserstein1(pde.slice(s.time.n_steps()), &restricted, dx)?;
    m.check_le("w1_final", last, 3.0 * (noise + richardson));
    Ok(())
}

fn solve_hjb_run(cfg: &RunConfig, m: &mut RunManifest) -> Result<()> {
    let s = setup(cfg)?;
    let g = terminal_cost(cfg, &s.space)?;
    let source = Field::from_fn(s.time, s.space, |_, _| cfg.hjb.source);
    let ham = HamiltonianSpec::truncated_quadratic(cfg.hjb.u_max)?;
    let v = m.stage("solve_hjb", || solve_hjb(&g, &source, cfg.problem.nu, s.beta, &ham, &hjb_options(cfg)))?;
    write_field(cfg, m, "value", &v.v)?;
    write_field(cfg, m, "drift", &v.drift)?;
    m.check_le("max_d2", v.max_d2, cfg.hjb.d2_bound);
    Ok(())
}

/// The MFG problem described by a configuration.
pub fn mfg_problem(cfg: &RunConfig) -> Result<MfgProblem> {
    let s = setup(cfg)?;
    let mc = &cfg.mfg;
    let potential = mc.potential_path.as_deref().map(|p| read_profile_csv(p, &s.space)).transpose()?;
    Ok(MfgProblem {
        beta: s.beta,
        nu: cfg.problem.nu,
        time: s.time,
        space: s.space,
        hamiltonian: HamiltonianSpec::truncated_quadratic(cfg.hjb.u_max)?,
        coupling: CouplingSpec { kind: mc.coupling, kappa: mc.kappa, epsilon: mc.epsilon, gamma: mc.gamma },
        potential,
        terminal: terminal_cost(cfg, &s.space)?,
        m0: initial_density(cfg, &s.space)?,
        damping: mc.damping,
        tolerance: mc.tolerance,
        max_iters: mc.max_iters,
        hjb: hjb_options(cfg),
        fp: fp_options(cfg),
    })
}

fn solve_mfg_run(cfg: &RunConfig, m: &mut RunManifest) -> Result<()> {
    let problem = mfg_problem(cfg)?;
    let sol = m.stage("solve_mfg", || solve_mfg(&problem))?;
    let written = write_solution(&cfg.output.dir, &sol, cfg.output.format)?;
    m.outputs.extend(written);
    let last = sol.trace.last().expect("at least one iteration");
    m.check("converged", sol.converged);
    m.check_le("final_gap", last.gap, problem.tolerance);
    m.check("trace_monotone", sol.trace_monotone);
    m.check_le("mass_error", last.mass_error, 1e-12 * problem.time.n_steps() as f64);
    m.check_le("negativity", -last.min_m, crate::fpsolver::NEGATIVITY_TOL);
    m.check_le("max_d2", sol.value.max_d2, cfg.hjb.d2_bound);
    Ok(())
}

fn validate(cfg: &RunConfig, m: &mut RunManifest) -> Result<()> {
    let rows = m.stage("battery", run_battery)?;
    write_battery_csv(std::io::stdout().lock(), &rows)?;
    let p = cfg.output.dir.join("validate.csv");
    write_battery_csv(fs::File::create(&p)?, &rows)?;
    m.outputs.push(p);
    for r in &rows {
        m.check_le(&format!("{} [{}]", r.check, r.parameter), r.measured, r.tolerance);
    }
    Ok(())
}

fn dispatch(command: Command, cfg: &RunConfig, m: &mut RunManifest, against_mc: bool) -> Result<()> {
    match command {
        Command::Simulate => simulate(cfg, m),
        Command::SolveFp => solve_fp_run(cfg, m).map(|_| ()),
        Command::SolveHjb => solve_hjb_run(cfg, m),
        Command::SolveMfg => solve_mfg_run(cfg, m),
        Command::Validate => validate(cfg, m),
        Command::Compare => compare(cfg, m, against_mc),
    }
}

/// Execute a command and return the process exit code: 0 when every
/// monitor passed, 2 when the run completed with failed monitors, 1 on error.
pub fn run(command: Command, cfg: RunConfig, against_mc: bool) -> i32 {
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    let dir: PathBuf = cfg.output.dir.clone();
    if let Err(e) = fs::create_dir_all(&dir) {
        eprintln!("error: cannot create {}: {e}", dir.display());
        return EXIT_ERROR;
    }
    let mut manifest = RunManifest::start(command, cfg.clone());
    if let Err(e) = manifest.write(&dir) {
        eprintln!("error: cannot write manifest: {e}");
        return EXIT_ERROR;
    }
    let outcome = dispatch(command, &cfg, &mut manifest, against_mc);
    let err = outcome.err().map(|e| e.to_string());
    if let Some(e) = &err {
        eprintln!("error: {e}");
    }
    manifest.finish(err.clone());
    if let Err(e) = manifest.write(&dir) {
        eprintln!("error: cannot write manifest: {e}");
        return EXIT_ERROR;
    }
    for a in manifest.assertions.iter().filter(|a| !a.passed) {
        eprintln!("warning: {} measured {:.3e} (limit {:.3e})", a.name, a.measured, a.limit);
    }
    match (err, manifest.all_passed()) {
        (Some(_), _) => EXIT_ERROR,
        (None, true) => 0,
        (None, false) => EXIT_WARNINGS,
    }
}
