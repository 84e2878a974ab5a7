use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use nsv_core::diagnostics::{
    alpha_sweep, energy_report, pressure_norm_series, running_max_ratio, weighted_bounds,
    AlphaSweepRow,
};
use nsv_core::dynamics::integrate;
use nsv_core::io::{load_config, save_snapshot, write_report, ReportFormat, RunConfig};
use nsv_core::suitability::{
    coupling_sweep, fitted_tail_constant, local_energy_terms, remainder_term, tail_functional,
};
use nsv_core::verify::run_suite;

#[derive(Parser)]
#[command(
    name = "nsv",
    version,
    about = "Navier-Stokes-Voigt Fourier-Galerkin solver and verification harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random initial data (overrides `initial.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Only print failures and errors.
    #[arg(long)]
    quiet: bool,
    /// Report file format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and check the energy identity.
    Run(Common),
    /// Invariant suite on small lattices.
    Verify(Common),
    /// α-sweep of the weighted bounds and the pressure integral.
    Sweep(Common),
    /// Local energy identity, tail functional, and coupling sweep.
    Suitability {
        #[command(flatten)]
        common: Common,
        /// Skip the coupling sweep.
        #[arg(long)]
        no_coupling: bool,
    },
}

struct Outcome {
    quiet: bool,
    failures: usize,
}

impl Outcome {
    fn new(quiet: bool) -> Self {
        Self { quiet, failures: 0 }
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        if !passed {
            self.failures += 1;
        }
        if !passed || !self.quiet {
            println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        }
    }

    fn note(&self, line: String) {
        if !self.quiet {
            println!("{line}");
        }
    }
}

struct Workspace {
    cfg: RunConfig,
    out: PathBuf,
    format: ReportFormat,
    ext: &'static str,
}

fn prepare(common: &Common) -> Result<Workspace> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path).with_context(|| format!("loading {}", path.display()))?,
        None => bail!("--config is required for this subcommand"),
    };
    if let Some(seed) = common.seed {
        cfg.initial.seed = seed;
    }
    let out = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let format: ReportFormat = common.format.parse()?;
    let ext = match format {
        ReportFormat::Csv => "csv",
        ReportFormat::Json => "json",
    };
    Ok(Workspace {
        cfg,
        out,
        format,
        ext,
    })
}

impl Workspace {
    fn path(&self, stem: &str) -> PathBuf {
        self.out.join(format!("{stem}.{}", self.ext))
    }
}

fn run(common: &Common) -> Result<Outcome> {
    let ctx = prepare(common)?;
    let cfg = &ctx.cfg;
    let mut outcome = Outcome::new(common.quiet);
    let solver = cfg.solver_config();
    info!(
        "integrating n={} alpha={} T={}",
        solver.n, solver.alpha, solver.t_final
    );
    let traj = integrate(&solver, &cfg.initial_velocity()?)?;
    outcome.note(format!(
        "integrated {} samples, dt = {}",
        traj.len(),
        traj.dt
    ));

    write_snapshots(&traj, cfg.snapshot_every, &ctx.out)?;
    if cfg.diagnostics.energy {
        let rep = energy_report(&traj)?;
        write_report(&rep, &ctx.path("energy"), ctx.format)?;
        let r = rep.max_residual();
        outcome.check(
            "energy identity",
            r <= cfg.diagnostics.energy_tolerance,
            format!(
                "max residual {r:e} (tol {:e})",
                cfg.diagnostics.energy_tolerance
            ),
        );
    }
    if cfg.diagnostics.weighted {
        let w = weighted_bounds(&traj)?;
        write_report(&w, &ctx.path("weighted"), ctx.format)?;
        outcome.note(format!(
            "weighted: a6|Lu|2 = {}, a3|ut|2 = {}, a5|Gut|2 = {}",
            w.w_h2, w.w_ut, w.w_gut
        ));
    }
    if cfg.diagnostics.pressure {
        let p = pressure_norm_series(&traj)?;
        write_report(&p, &ctx.path("pressure"), ctx.format)?;
        outcome.note(format!("pressure L^5/3 integral = {}", p.integral));
    }
    Ok(outcome)
}

fn write_snapshots(traj: &nsv_core::dynamics::Trajectory, every: usize, out: &Path) -> Result<()> {
    let last = traj.len() - 1;
    for (i, s) in traj.samples.iter().enumerate() {
        let due = i == last || (every > 0 && i % every == 0);
        if due {
            save_snapshot(&s.state, &out.join(format!("snapshot_{i:06}.bin")))?;
        }
    }
    Ok(())
}

fn verify(common: &Common) -> Result<Outcome> {
    let mut outcome = Outcome::new(common.quiet);
    let seed = common.seed.unwrap_or(0);
    let checks = run_suite(seed)?;
    for c in &checks {
        outcome.check(
            &c.name,
            c.passed,
            format!("{:e} (tol {:e})", c.value, c.tolerance),
        );
    }
    if let Some(out) = &common.out {
        fs::create_dir_all(out)?;
        fs::write(
            out.join("verify.json"),
            serde_json::to_string_pretty(&checks)? + "\n",
        )?;
    }
    Ok(outcome)
}

type Column = fn(&AlphaSweepRow) -> f64;

fn sweep(common: &Common) -> Result<Outcome> {
    let ctx = prepare(common)?;
    let cfg = &ctx.cfg;
    let mut outcome = Outcome::new(common.quiet);
    let rows = alpha_sweep(
        &cfg.solver_config(),
        &cfg.sweep.alphas,
        &cfg.initial_velocity()?,
    )?;
    write_report(rows.as_slice(), &ctx.path("alpha_sweep"), ctx.format)?;
    let columns: [(&str, Column); 4] = [
        ("a6 int |Lu|^2", |r| r.w_h2),
        ("a3 int |u_t|^2", |r| r.w_ut),
        ("a5 int |Gu_t|^2", |r| r.w_gut),
        ("int |p|_5/3^5/3", |r| r.pressure_integral),
    ];
    for (name, f) in columns {
        let values: Vec<f64> = rows.iter().map(f).collect();
        let ratio = running_max_ratio(&values);
        outcome.check(
            name,
            ratio <= cfg.sweep.max_ratio,
            format!("running-max ratio {ratio} over {values:?}"),
        );
    }
    Ok(outcome)
}

fn suitability(common: &Common, no_coupling: bool) -> Result<Outcome> {
    let ctx = prepare(common)?;
    let cfg = &ctx.cfg;
    let mut outcome = Outcome::new(common.quiet);
    let phi = cfg.test_function()?;
    let u0 = cfg.initial_velocity()?;
    let solver = cfg.solver_config();
    let traj = integrate(&solver, &u0)?;

    let local = local_energy_terms(&traj, &phi)?;
    write_report(&local, &ctx.path("local_energy"), ctx.format)?;
    let r = local.relative_residual();
    let tol = cfg.suitability.residual_tolerance;
    outcome.check(
        "local energy identity",
        r <= tol,
        format!("residual {r:e} (tol {tol:e})"),
    );

    let rem = remainder_term(&traj, &phi)?;
    outcome.check(
        "remainder within Holder bound",
        rem.integral.abs() <= rem.holder_bound,
        format!("|{}| <= {}", rem.integral, rem.holder_bound),
    );

    let tail = tail_functional(&traj, &phi, solver.n)?;
    write_report(tail.as_slice(), &ctx.path("tail"), ctx.format)?;
    outcome.note(format!(
        "tail constant c(phi) = {}",
        fitted_tail_constant(&tail)
    ));

    if !no_coupling {
        let rows = coupling_sweep(&solver, &cfg.suitability.coupling, &u0, &phi)?;
        write_report(rows.as_slice(), &ctx.path("coupling"), ctx.format)?;
        for r in &rows {
            if let Some(err) = &r.failed {
                outcome.check(&format!("coupling row n={}", r.n), false, err.clone());
            }
        }
        let decreasing = rows.windows(2).all(|w| w[1].bound < w[0].bound);
        outcome.check(
            "coupling bound decreasing",
            decreasing || cfg.suitability.coupling.gamma >= 1.0 / 3.0,
            format!("{:?}", rows.iter().map(|r| r.bound).collect::<Vec<_>>()),
        );
        let slack = rows
            .windows(2)
            .all(|w| w[1].remainder <= 1.1 * w[0].remainder);
        outcome.check(
            "remainder non-increasing (10% slack)",
            slack,
            format!("{:?}", rows.iter().map(|r| r.remainder).collect::<Vec<_>>()),
        );
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = match &cli.command {
        Command::Run(c) | Command::Verify(c) | Command::Sweep(c) => c.quiet,
        Command::Suitability { common, .. } => common.quiet,
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if quiet {
        "error"
    } else {
        "warn"
    }))
    .init();

    let result = match &cli.command {
        Command::Run(c) => run(c),
        Command::Verify(c) => verify(c),
        Command::Sweep(c) => sweep(c),
        Command::Suitability {
            common,
            no_coupling,
        } => suitability(common, *no_coupling),
    };
    match result {
        Ok(o) if o.failures == 0 => ExitCode::SUCCESS,
        Ok(o) => {
            eprintln!("{} check(s) failed", o.failures);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
