//! `homocone`: verify scenario configs, fuzz the inequalities, run the demo.
//!
//! Exit codes: 0 when every check passes or is skipped, 1 on any failure,
//! 2 on a config or I/O error.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use homocone::harness::{self, builtin};
use rayon::prelude::*;

use config::ConfigError;
use output::{Format, Report, VerifyReport};

#[derive(Debug, Parser)]
#[command(
    name = "homocone",
    version,
    about = "Measures with homogeneous densities: checks and fuzzing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long, global = true, env = "HOMOCONE_JOBS")]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the checks listed in a scenario or run config.
    Verify { config: PathBuf },
    /// Random instances of the theorem-level checks.
    Fuzz {
        config: PathBuf,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Built-in scenarios with a summary table.
    Demo,
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, ConfigError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(ConfigError("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| ConfigError(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn verify(cli: &Cli, path: &Path) -> Result<bool, ConfigError> {
    let cfg = config::load_run_config(path)?;
    let jobs = cli.jobs.or(cfg.jobs);
    let runs = with_jobs(jobs, || cfg.scenarios.par_iter().map(|s| s.run()).collect::<Vec<_>>())?;
    let report = VerifyReport::new(cfg.scenarios.iter().zip(runs).collect());
    eprint!("{}", output::check_table(&report));
    let out = cli.out.clone().or(cfg.out);
    let format = Format::resolve(cli.format, cfg.format, out.as_deref());
    output::emit(&Report::Verify(&report).encode(format)?, out.as_ref())?;
    Ok(report.pass)
}

fn fuzz(cli: &Cli, path: &Path, count: Option<usize>, seed: Option<u64>) -> Result<bool, ConfigError> {
    let cfg = config::load_fuzz_config(path, count, seed)?;
    let report = with_jobs(cli.jobs, || harness::fuzz(&cfg))?.map_err(|e| ConfigError(e.to_string()))?;
    eprint!("{}", output::fuzz_table(&report));
    let format = Format::resolve(cli.format, None, cli.out.as_deref());
    output::emit(&Report::Fuzz(&report).encode(format)?, cli.out.as_ref())?;
    Ok(report.clean())
}

fn demo(cli: &Cli) -> Result<bool, ConfigError> {
    let scenarios = builtin::demo_scenarios().map_err(|e| ConfigError(e.to_string()))?;
    let runs = with_jobs(cli.jobs, || scenarios.par_iter().map(|s| s.run()).collect::<Vec<_>>())?;
    let report = VerifyReport::new(scenarios.iter().zip(runs).collect());
    print!("{}", output::check_table(&report));
    if let Some(out) = &cli.out {
        let format = Format::resolve(cli.format, None, Some(out));
        output::emit(&Report::Verify(&report).encode(format)?, Some(out))?;
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { config } => verify(&cli, config),
        Command::Fuzz { config, count, seed } => fuzz(&cli, config, *count, *seed),
        Command::Demo => demo(&cli),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
