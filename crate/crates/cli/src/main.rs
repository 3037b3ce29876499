use clap::{Parser, Subcommand};
use sg_router_cli::commands::{self, CommandError, RunOptions};
use sg_router_cli::config::{RunConfig, DEFAULT_CONFIG};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "sg-router", version, about = "Multi-hop THz/RF routing over Poisson relay fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file; the built-in defaults apply when absent.
    #[arg(long, global = true, env = "SGROUTER_CONFIG")]
    config: Option<PathBuf>,
    /// Overrides run.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for trial and grid evaluation.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reduced trial counts.
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Mean throughput and coverage per strategy over the (R, S) grid.
    Compare,
    /// Analytic coverage matrix over the heat-map grid.
    Heatmap,
    /// UAV altitude and density sweeps.
    UavSweep,
    /// Built-in accuracy and consistency checks.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path),
        None => RunConfig::from_toml(DEFAULT_CONFIG),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let opts = RunOptions { seed: cli.seed.unwrap_or(cfg.run.seed), quick: cli.quick };
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => match std::fs::File::create(p) {
            Ok(f) => Box::new(std::io::BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", p.display());
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => Box::new(std::io::stdout().lock()),
    };
    let result = match cli.command {
        Command::Compare => commands::compare(&cfg, opts, &mut *out),
        Command::Heatmap => commands::heatmap(&cfg, &mut *out),
        Command::UavSweep => commands::uav_sweep(&cfg, opts, &mut *out),
        Command::Validate => return run_validate(&cfg, opts, &mut *out),
    };
    finish(result.and_then(|_| out.flush().map_err(CommandError::from)))
}

fn run_validate(cfg: &RunConfig, opts: RunOptions, out: &mut dyn Write) -> ExitCode {
    let checks = match commands::validate(cfg, opts) {
        Ok(c) => c,
        Err(e) => return finish(Err(e.into())),
    };
    let mut failed = 0;
    for c in &checks {
        failed += !c.pass as usize;
        if let Err(e) = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail) {
            return finish(Err(e.into()));
        }
    }
    if let Err(e) = out.flush() {
        return finish(Err(e.into()));
    }
    if failed > 0 {
        eprintln!("{failed} check(s) failed");
        ExitCode::from(EXIT_CHECK_FAILED)
    } else {
        ExitCode::SUCCESS
    }
}

fn broken_pipe(e: &CommandError) -> bool {
    let io = match e {
        CommandError::Io(e) => Some(e),
        CommandError::Csv(e) => match e.kind() {
            csv::ErrorKind::Io(e) => Some(e),
            _ => None,
        },
        CommandError::Numeric(_) => None,
    };
    io.is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
}

fn finish(result: Result<(), CommandError>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // A closed reader (`| head`) is not an error.
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e @ CommandError::Numeric(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
        // Unwritable output is an invocation problem, like a bad config path.
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
