use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cantorlab::config::ExperimentConfig;
use cantorlab::runner::{run, Command, RunOptions};

#[derive(Parser)]
#[command(name = "cantorlab", version, about = "Experiments on regular Cantor sets")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render SVG line plots.
    #[arg(long)]
    svg: bool,
    /// Maximum number of enumerated words.
    #[arg(long)]
    budget: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Add a wall-time column to every table.
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension brackets.
    Dim(Common),
    /// Limit-geometry convergence, transfer-map profile and eigenvalue ratios.
    Limitgeom(Common),
    /// Overlap counts and integrals over rho.
    Marstrand(Common),
    /// Box-counting scan of K + sK'.
    Sumscan(Common),
    /// Sub-Cantor extraction.
    Extract {
        #[command(flatten)]
        common: Common,
        /// System to extract from (overrides the config).
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
    /// Good-scale recurrence report.
    Recurrence(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, overrides) = match cli.command {
        Cmd::Dim(c) => (Command::Dim, c, None),
        Cmd::Limitgeom(c) => (Command::LimitGeom, c, None),
        Cmd::Marstrand(c) => (Command::Marstrand, c, None),
        Cmd::Sumscan(c) => (Command::SumScan, c, None),
        Cmd::Extract { common, system, a, b } => (Command::Extract, common, Some((system, a, b))),
        Cmd::Recurrence(c) => (Command::Recurrence, c, None),
    };
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    let mut text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", common.config.display());
            return ExitCode::FAILURE;
        }
    };
    if let Some((system, a, b)) = overrides {
        if system.is_some() || a.is_some() || b.is_some() {
            match apply_extract_overrides(&text, system, a, b) {
                Ok(t) => text = t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            }
        }
    }
    let opts = RunOptions {
        out: common.out,
        svg: common.svg,
        budget: common.budget,
        timings: common.timings,
    };
    match run(command, &text, &opts) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            match outcome.partial {
                Some(e) => {
                    eprintln!("error: {e} (partial results written)");
                    ExitCode::FAILURE
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn apply_extract_overrides(
    text: &str,
    system: Option<String>,
    a: Option<f64>,
    b: Option<f64>,
) -> cantorlab::Result<String> {
    let mut cfg = ExperimentConfig::parse(text)?;
    let mut ex = cfg.extract.take().unwrap_or(cantorlab::config::ExtractConfig {
        system: String::new(),
        a: 0.0,
        b: 0.0,
        target: Default::default(),
        bracket_depth: 8,
    });
    if let Some(s) = system {
        ex.system = s;
    }
    if let Some(a) = a {
        ex.a = a;
    }
    if let Some(b) = b {
        ex.b = b;
    }
    cfg.extract = Some(ex);
    cfg.to_toml()
}
