//! `kuzlab` command line: loads a TOML run description, drives one experiment
//! and persists `config.json`, `reports.csv`/`reports.jsonl` and
//! `verdict.json` under `<out>/<experiment>/`.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use kuzlab::config::{linreg_forcing, parse_config, perturbation, Experiment, RunConfig};
use kuzlab::dynamics::SimState;
use kuzlab::energy::{energy_m, lifespan_t0, thresholds, ReportWriter};
use kuzlab::experiments::{
    check_guards, klainerman_experiment, lifespan_sweep, linear_regularity_experiment,
    load_checkpoint, run_from, save_checkpoint, stability_experiment, viscous_decay_experiment,
    ResultsDir,
};
use kuzlab::jet::build_jet;
use kuzlab::Error;

pub const EXIT_OK: i32 = 0;
/// The experiment ran but its assertion did not hold.
pub const EXIT_ASSERTION: i32 = 1;
/// Bad arguments, unreadable or invalid config.
pub const EXIT_USAGE: i32 = 2;
/// Initial data violate a guard or smallness condition.
pub const EXIT_GUARD: i32 = 3;
/// Numerical or I/O failure during the run.
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "kuzlab",
    version,
    about = "Kuznetsov-equation numerics laboratory"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single run until breakdown or the horizon; writes a checkpoint.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Continue from `<out>/simulate/checkpoint` up to the horizon.
        #[arg(long)]
        resume: bool,
    },
    /// Lifespan sweep over `sweep.eps_list` with a log-log fit.
    Sweep(Common),
    /// Perturbed-pair stability envelope.
    Stability(Common),
    /// Viscous global bound and monotone multi-index energy.
    Decay(Common),
    /// Weighted sup/L² ratio along an inviscid run.
    Klainerman(Common),
    /// Forced linear energy inequality.
    Linreg(Common),
    /// Prints the threshold record for the configured data.
    CheckThresholds(Common),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    #[arg(long, value_name = "T")]
    horizon: Option<f64>,
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
}

/// Maps a library error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        _ if e.is_guard() => EXIT_GUARD,
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::InvalidGrid(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd) {
        Ok(passed) => {
            if passed {
                EXIT_OK
            } else {
                EXIT_ASSERTION
            }
        }
        Err(e) => {
            eprintln!("kuzlab: {e}");
            exit_code(&e)
        }
    }
}

fn load(common: &Common, exp: Experiment) -> kuzlab::Result<RunConfig> {
    let text = fs::read_to_string(&common.config).map_err(|e| Error::Config {
        path: common.config.display().to_string(),
        message: format!("cannot read: {e}"),
    })?;
    let mut cfg = parse_config(&text)?;
    cfg.experiment = exp;
    if let Some(o) = &common.out {
        cfg.out_dir = o.clone();
    }
    if let Some(w) = common.workers {
        cfg.sweep.workers = w;
    }
    if let Some(h) = common.horizon {
        cfg.integrator.horizon = h;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cmd: Command) -> kuzlab::Result<bool> {
    match cmd {
        Command::Simulate { common, resume } => {
            simulate(&load(&common, Experiment::Simulate)?, resume)
        }
        Command::Sweep(c) => sweep(&load(&c, Experiment::Sweep)?),
        Command::Stability(c) => stability(&load(&c, Experiment::Stability)?),
        Command::Decay(c) => decay(&load(&c, Experiment::Decay)?),
        Command::Klainerman(c) => klainerman(&load(&c, Experiment::Klainerman)?),
        Command::Linreg(c) => linreg(&load(&c, Experiment::Linreg)?),
        Command::CheckThresholds(c) => check(&load(&c, Experiment::Simulate)?),
    }
}

fn results(cfg: &RunConfig) -> kuzlab::Result<ResultsDir> {
    let dir = ResultsDir::create(&cfg.out_dir, cfg.experiment.name())?;
    dir.write_config(cfg)?;
    Ok(dir)
}

/// Energy reports of the configured trajectory, written next to the
/// experiment's own verdict.
fn baseline_reports(cfg: &RunConfig, dir: &ResultsDir) -> kuzlab::Result<()> {
    let grid = cfg.build_grid()?;
    let (u0, u1) = cfg.initial_data(&grid)?;
    let setup = cfg.setup();
    check_guards(&u0, &u1, &setup)?;
    let mut w = dir.report_writer(&cfg.energies)?;
    run_from(SimState::new(u0, u1)?, 0, &setup, &mut |r| w.write(r))?;
    w.finish()
}

fn announce(dir: &ResultsDir, line: &str) {
    println!("{line}");
    println!("results: {}", dir.path().display());
}

fn simulate(cfg: &RunConfig, resume: bool) -> kuzlab::Result<bool> {
    let dir = results(cfg)?;
    let grid = cfg.build_grid()?;
    let mut setup = cfg.setup();
    let (state, done, mut writer) = if resume {
        let (state, meta) = load_checkpoint(&dir.checkpoint_dir())?;
        if meta.params != cfg.params || meta.kind != cfg.model {
            return Err(Error::Config {
                path: "params".into(),
                message: "checkpoint was written with different physics".into(),
            });
        }
        if state.grid().as_ref() != grid.as_ref() {
            return Err(Error::Config {
                path: "grid".into(),
                message: "checkpoint grid differs from the config".into(),
            });
        }
        if state.t > cfg.integrator.horizon {
            return Err(Error::Config {
                path: "integrator.horizon".into(),
                message: format!("checkpoint already at t = {}", state.t),
            });
        }
        // remaining interval, stepped uniformly from the checkpoint time
        setup.horizon = cfg.integrator.horizon - state.t;
        let w = ReportWriter::resume(dir.path(), &cfg.energies, state.t)?;
        (state, meta.step, w)
    } else {
        let (u0, u1) = cfg.initial_data(&grid)?;
        check_guards(&u0, &u1, &setup)?;
        (SimState::new(u0, u1)?, 0, dir.report_writer(&cfg.energies)?)
    };
    let out = run_from(state, 0, &setup, &mut |r| writer.write(r))?;
    let rows = writer.rows();
    writer.finish()?;
    let steps = done + out.steps;
    save_checkpoint(
        &dir.checkpoint_dir(),
        &out.state,
        steps,
        &cfg.params,
        cfg.model,
    )?;
    dir.write_verdict(&json!({
        "verdict": out.verdict,
        "steps": steps,
        "t_final": out.state.t,
        "dt": out.plan.dt,
        "scheme": out.plan.scheme,
        "rows": rows,
    }))?;
    let t_star = out
        .verdict
        .t_star
        .map_or("none".to_string(), |t| t.to_string());
    announce(
        &dir,
        &format!(
            "simulate: {steps} steps, t_star = {t_star}, cause = {:?}",
            out.verdict.cause
        ),
    );
    Ok(true)
}

fn sweep(cfg: &RunConfig) -> kuzlab::Result<bool> {
    let dir = results(cfg)?;
    let grid = cfg.build_grid()?;
    let (u0, u1) = cfg.initial_data(&grid)?;
    let res = lifespan_sweep(
        &u0,
        &u1,
        &cfg.sweep.eps_list,
        &cfg.setup(),
        cfg.sweep.workers,
    )?;
    dir.write_verdict(&res)?;
    baseline_reports(cfg, &dir)?;
    let slope = res.fit.map_or("none".to_string(), |f| f.slope.to_string());
    announce(
        &dir,
        &format!("sweep: {} rows, slope = {slope}", res.rows.len()),
    );
    Ok(true)
}

fn stability(cfg: &RunConfig) -> kuzlab::Result<bool> {
    let dir = results(cfg)?;
    let grid = cfg.build_grid()?;
    let (u0, u1) = cfg.initial_data(&grid)?;
    let (d0, d1) = perturbation(&grid, cfg.seed, cfg.stability.perturbation);
    let (w0, w1) = (u0.add(&d0), u1.add(&d1));
    let out = stability_experiment((&u0, &u1), (&w0, &w1), &cfg.setup())?;
    dir.write_verdict(&out)?;
    baseline_reports(cfg, &dir)?;
    announce(
        &dir,
        &format!(
            "stability: c1 = {}, c2 = {}, passed = {}",
            out.c1, out.c2, out.passed
        ),
    );
    Ok(out.passed)
}

fn decay(cfg: &RunConfig) -> kuzlab::Result<bool> {
    let dir = results(cfg)?;
    let grid = cfg.build_grid()?;
    let (u0, u1) = cfg.initial_data(&grid)?;
    let m = cfg
        .decay
        .m
        .unwrap_or_else(|| thresholds(&cfg.params, &cfg.envelope, grid.dims()).m_viscous);
    let out = viscous_decay_experiment(&u0, &u1, &cfg.setup(), &cfg.envelope, m)?;
    dir.write_verdict(&out)?;
    baseline_reports(cfg, &dir)?;
    announce(
        &dir,
        &format!(
            "decay: m = {m}, monotone = {:?}, bounded = {}, passed = {}",
            out.monotone, out.bounded, out.passed
        ),
    );
    Ok(out.passed)
}

fn klainerman(cfg: &RunConfig) -> kuzlab::Result<bool> {
    let dir = results(cfg)?;
    let grid = cfg.build_grid()?;
    let (u0, u1) = cfg.initial_data(&grid)?;
    let out = klainerman_experiment(&u0, &u1, &cfg.setup(), cfg.klainerman.m)?;
    dir.write_verdict(&out)?;
    baseline_reports(cfg, &dir)?;
    announce(
        &dir,
        &format!(
            "klainerman: growth = {}, passed = {}",
            out.growth, out.passed
        ),
    );
    Ok(out.passed)
}

fn linreg(cfg: &RunConfig) -> kuzlab::Result<bool> {
    let dir = results(cfg)?;
    let grid = cfg.build_grid()?;
    let (u0, u1) = cfg.initial_data(&grid)?;
    let top = cfg.linreg.horizons.iter().cloned().fold(0.0, f64::max);
    let dt = match cfg.integrator.dt {
        Some(dt) => dt,
        None => {
            let mut s = cfg.setup();
            s.horizon = top;
            s.plan(&grid)?.dt
        }
    };
    let forcing = linreg_forcing(cfg, &grid);
    let out = linear_regularity_experiment(
        &u0,
        &u1,
        &forcing,
        &cfg.params,
        &cfg.linreg.horizons,
        dt,
        cfg.linreg.slack,
    )?;
    dir.write_verdict(&out)?;
    baseline_reports(cfg, &dir)?;
    announce(
        &dir,
        &format!(
            "linreg: {} horizons, passed = {}",
            out.rows.len(),
            out.passed
        ),
    );
    Ok(out.passed)
}

fn check(cfg: &RunConfig) -> kuzlab::Result<bool> {
    let grid = cfg.build_grid()?;
    let th = thresholds(&cfg.params, &cfg.envelope, grid.dims());
    let (u0, u1) = cfg.initial_data(&grid)?;
    let s = SimState::new(u0, u1)?;
    let jet = build_jet(&s, &cfg.params, cfg.model, (th.m0 + 1) as usize)?;
    let e_m0 = energy_m(&jet, th.m0)?;
    let t0 = lifespan_t0(e_m0, &cfg.params, &cfg.envelope);
    let rec = json!({
        "thresholds": th,
        "e_m0_initial": e_m0,
        "t0": if t0.is_finite() { json!(t0) } else { json!(null) },
        "inviscid_check": e_m0.sqrt() <= th.inviscid_sqrt_energy,
    });
    println!("{}", serde_json::to_string_pretty(&rec)?);
    Ok(true)
}
