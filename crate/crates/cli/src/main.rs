//! `cavity-cp`: parameter scans of thermal Casimir–Polder potentials in
//! planar cavities, written as CSV or JSON tables.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 3 when
//! the numerics fail (quadrature budget exhausted, extremum not bracketed).

mod commands;
mod table;
mod units;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand};

use cavity_cp::config::Registry;
use cavity_cp::QuadratureSpec;

use commands::{AsymArgs, BraggArgs, Context, DepthArgs, ProfileArgs};
use table::Format;

#[derive(Debug, Parser)]
#[command(name = "cavity-cp", version, about)]
struct Cli {
    /// Configuration file with extra molecules, materials and mirrors.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Relative tolerance of the quadratures.
    #[arg(long, global = true, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CAVITY_CP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Potential components on a grid of positions.
    Profile(ProfileArgs),
    /// Well depths at cavity resonances.
    Depth(DepthArgs),
    /// Normal-incidence reflectivity of quarter-wave stacks.
    Bragg(BraggArgs),
    /// Heating rate on a grid of positions.
    Heating(ProfileArgs),
    /// Constant-reflectivity depths against the closed-form offsets.
    Asym(AsymArgs),
}

enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
}

fn classify(err: anyhow::Error) -> Failure {
    match err.downcast_ref::<cavity_cp::Error>() {
        Some(e) if e.is_numerical() => Failure::Numerical(err),
        _ => Failure::Usage(err),
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut registry = Registry::builtin();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        registry.load(&text)?;
    }
    let spec = QuadratureSpec::default().with_rel_tol(cli.rel_tol);
    spec.validate()?;
    let ctx = Context { registry, spec };

    let table = match &cli.command {
        Command::Profile(a) => commands::profile(&ctx, a)?,
        Command::Depth(a) => commands::depth(&ctx, a)?,
        Command::Bragg(a) => commands::bragg(&ctx, a)?,
        Command::Heating(a) => commands::heating(&ctx, a)?,
        Command::Asym(a) => commands::asym(&ctx, a)?,
    };

    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    table.write(&mut out, cli.format)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli).map_err(classify) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
