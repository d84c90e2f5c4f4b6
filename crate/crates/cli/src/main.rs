use std::path::PathBuf;
use std::process::ExitCode;

use bgk_core::config::load_config;
use bgk_core::output::run_to_dir;
use bgk_core::Error;
use clap::Parser;

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Solve the 1D1V BGK equation from a key = value config file.
#[derive(Parser, Debug)]
#[command(name = "solver", version)]
struct Args {
    /// Path to the run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Directory for snapshots, moments and diagnostics. Overrides
    /// `output_dir` in the config; defaults to ./output.
    #[arg(long)]
    output_dir: Option<PathBuf>,

    /// Use the plain Maxwellian as the collision target.
    #[arg(long)]
    no_correction: bool,

    /// Suppress the run summary.
    #[arg(long)]
    quiet: bool,
}

fn exit_code(err: &Error) -> u8 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else if matches!(err.root(), Error::Io { .. }) {
        EXIT_IO
    } else {
        EXIT_CONFIG
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if args.quiet {
        "error"
    } else {
        "warn"
    }))
    .init();

    let mut cfg = match load_config(&args.config) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {}: {err}", args.config.display());
            // An unreadable config file is still a config problem for the caller.
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if args.no_correction {
        cfg.run.correction_enabled = false;
    }
    let dir = args
        .output_dir
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("output"));

    match run_to_dir(&cfg, &dir) {
        Ok(summary) => {
            if !args.quiet {
                let m = &summary.metadata;
                let last = summary.series.last();
                println!(
                    "{} x {} grid, {} steps of dt = {:e} (cfl {:.4}), correction {}",
                    m.n_x,
                    m.n_v,
                    m.timing.n_steps,
                    m.timing.dt,
                    m.timing.cfl_effective,
                    if m.correction_enabled { "on" } else { "off" }
                );
                if let Some(r) = last {
                    println!(
                        "t = {}: drho = {:.3e}, dm = {:.3e}, dE = {:.3e}, min f = {:.3e}",
                        r.time, r.drho, r.dm, r.de, r.min_f
                    );
                }
                println!("wrote {} files to {}", summary.files.len(), summary.output_dir.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let code = exit_code(&err);
            if code == EXIT_NUMERICAL {
                eprintln!("numerical failure: {err}");
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(code)
        }
    }
}
