//! Batch CLI for the spherical shell/cavity solver and the geometry
//! diagnostics. Payloads go to `--out` (or stdout); the run record goes to
//! stderr. Exit codes: 0 success, 2 config error, 3 solver failure, 4 I/O
//! error.

use clap::{Parser, Subcommand};
use shellcap::config::{parse_config, Format, Mode, ProblemParams, ScenarioConfig, SweepSpec};
use shellcap::run::{run, RunError};
use shellcap::sphere::{SolverError, SolverSettings};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "shellcap",
    version,
    about = "Relaxation, pressure sweeps, and residual-stress profiles for an \
             incompressible spherical shell around an eigenstrained elastic \
             surface enclosing a dry or fluid-filled cavity"
)]
struct Cli {
    /// Scenario file (required for all modes except geometry-check)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the payload to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Payload format (default: json for relax/solve, csv otherwise)
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Root-scan bracket as "lo,hi"
    #[arg(long, global = true)]
    bracket: Option<String>,

    /// Number of pre-scan points
    #[arg(long, global = true)]
    scan: Option<usize>,

    /// Equilibrium residual tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the zero-pressure (relaxed) equilibrium
    Relax,
    /// Solve the equilibrium at a given normalized outer pressure
    Solve {
        #[arg(long = "p-hat-o", allow_hyphen_values = true)]
        p_hat_o: f64,
    },
    /// Sweep the normalized outer pressure over a uniform grid
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        count: usize,
    },
    /// Radial stress profile through the shell at the configured pressure
    StressProfile {
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Gauss/Codazzi/curvature/area-map diagnostics on built-in fixtures
    GeometryCheck,
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, RunError> {
    match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(RunError::Io)?;
            parse_config(&text).map_err(RunError::Config)
        }
        None if matches!(cli.command, Command::GeometryCheck) => Ok(ScenarioConfig {
            mode: Mode::GeometryCheck,
            omega_s: 0.0,
            omega_l: 0.0,
            wet: false,
            params: ProblemParams::Nondimensional {
                alpha: 3.0,
                xi: 0.0,
                eta: 0.0,
                eta_f: 0.0,
                p_hat_o: 0.0,
            },
            solver: SolverSettings::default(),
            sweep: None,
            out_path: None,
            format: None,
            profile_samples: 101,
        }),
        None => Err(RunError::Config(shellcap::config::ConfigError::MissingKey {
            path: "--config".into(),
        })),
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut ScenarioConfig) -> Result<(), RunError> {
    cfg.mode = match cli.command {
        Command::Relax => Mode::Relax,
        Command::Solve { .. } => Mode::Solve,
        Command::Sweep { .. } => Mode::Sweep,
        Command::StressProfile { .. } => Mode::StressProfile,
        Command::GeometryCheck => Mode::GeometryCheck,
    };
    match cli.command {
        Command::Solve { p_hat_o } => match &mut cfg.params {
            ProblemParams::Nondimensional { p_hat_o: p, .. } => *p = p_hat_o,
            ProblemParams::Dimensional { p_o, mu, .. } => *p_o = p_hat_o * *mu,
        },
        Command::Sweep { from, to, count } => {
            if count < 2 {
                return Err(RunError::Config(shellcap::config::ConfigError::SweepCount { count }));
            }
            cfg.sweep = Some(SweepSpec { from, to, count });
        }
        Command::StressProfile { samples } => cfg.profile_samples = samples,
        _ => {}
    }
    if let Some(out) = &cli.out {
        cfg.out_path = Some(out.to_string_lossy().into_owned());
    }
    if let Some(fmt) = &cli.format {
        cfg.format = Format::parse(fmt);
    }
    if let Some(spec) = &cli.bracket {
        let parts: Vec<&str> = spec.split(',').collect();
        let parsed: Option<(f64, f64)> = match parts.as_slice() {
            [lo, hi] => lo.trim().parse().ok().zip(hi.trim().parse().ok()),
            _ => None,
        };
        match parsed {
            Some((lo, hi)) if hi > lo => cfg.solver.bracket = (lo, hi),
            _ => {
                return Err(RunError::Config(shellcap::config::ConfigError::BadValue {
                    path: "--bracket".into(),
                    detail: format!("expected 'lo,hi' with hi > lo, got '{spec}'"),
                }))
            }
        }
    }
    if let Some(scan) = cli.scan {
        cfg.solver.scan_points = scan;
    }
    if let Some(tol) = cli.tol {
        cfg.solver.tol = tol;
    }
    Ok(())
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    let mut cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("shellcap: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = apply_overrides(&cli, &mut cfg) {
        eprintln!("shellcap: {e}");
        return e.exit_code();
    }
    match run(&cfg) {
        Ok(record) => {
            if record.out_path.is_none() {
                print!("{}", record.payload);
            }
            eprintln!("{}", record.to_json());
            0
        }
        Err(e) => {
            eprintln!("shellcap: {e}");
            if let RunError::Solver(SolverError::Bracketing { table, .. }) = &e {
                eprintln!("scan table (x, residual):");
                for (x, g) in table {
                    eprintln!("{x:.12e},{g:.12e}");
                }
            }
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(real_main());
}
