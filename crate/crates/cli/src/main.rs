use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dctm_cli::commands::{self, PatternSource, Progress, COUNT_LIMIT};
use dctm_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "dctm", version, about = "Domino-tiled clustering of planar phased arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured rng seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the uv lattice size.
    #[arg(long, global = true)]
    uv: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Optimise the clustering of one configuration.
    Synthesize,
    /// Repeat the synthesis over the configured partition sizes.
    Sweep,
    /// Count the domino tilings of an M x N rectangle.
    Count {
        cols: usize,
        rows: usize,
        /// Largest pixel count to enumerate.
        #[arg(long, default_value_t = COUNT_LIMIT)]
        limit: usize,
    },
    /// Pattern and metrics of the reference, an excitation or a tiling.
    Pattern {
        #[arg(long, conflicts_with = "tiling")]
        excitation: Option<PathBuf>,
        #[arg(long)]
        tiling: Option<PathBuf>,
    },
    /// Recompute metrics from a pattern dump (`u,v,power`).
    Metrics { pattern: PathBuf },
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("this command needs --config <path>".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(uv) = cli.uv {
        cfg.uv = uv;
    }
    if cfg.uv < 16 {
        return Err(CliError::Config(format!("--uv {} is too coarse, use at least 16", cfg.uv)));
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let progress = Progress::new(cli.quiet);
    match &cli.command {
        Command::Synthesize => {
            let cfg = load(cli)?;
            let dir = commands::output_dir(&cfg, cli.out.as_deref());
            commands::synthesize(&cfg, &dir, &progress)?;
            progress.say(format!("wrote {}", dir.display()));
        }
        Command::Sweep => {
            let cfg = load(cli)?;
            let dir = commands::output_dir(&cfg, cli.out.as_deref());
            commands::sweep(&cfg, &dir, &progress)?;
            progress.say(format!("wrote {}", dir.join("sweep.csv").display()));
        }
        Command::Count { cols, rows, limit } => {
            println!("{}", commands::count(*cols, *rows, *limit)?);
        }
        Command::Pattern { excitation, tiling } => {
            let cfg = load(cli)?;
            let dir = commands::output_dir(&cfg, cli.out.as_deref());
            let source = match (excitation, tiling) {
                (Some(e), _) => PatternSource::Excitation(e),
                (_, Some(t)) => PatternSource::Tiling(t),
                _ => PatternSource::Reference,
            };
            commands::pattern(&cfg, source, &dir)?;
            progress.say(format!("wrote {}", dir.display()));
        }
        Command::Metrics { pattern } => {
            let (steer, upsilon, case) = match &cli.config {
                Some(_) => {
                    let cfg = load(cli)?;
                    (cfg.steering()?, cfg.upsilon_w, cfg.case())
                }
                None => ((0.0, 0.0), None, stem(pattern)),
            };
            let row = commands::metrics_from_dump(pattern, steer, upsilon, &case)?;
            match &cli.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    commands::write_metrics(std::fs::File::create(dir.join("metrics.csv"))?, &[row])?;
                }
                None => commands::write_metrics(std::io::stdout().lock(), &[row])?,
            }
        }
    }
    Ok(())
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| "pattern".into(), |s| s.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dctm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
