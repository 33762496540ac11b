use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use exdisc::experiments::ExperimentKind;
use exdisc::manifest::{dispatch, parse_manifest, DispatchOptions, OutputFormat};

#[derive(Parser)]
#[command(
    name = "exdisc",
    about = "Spectral laboratory for elliptic boundary problems exterior to the unit disc",
    version
)]
struct Cli {
    /// List the available experiments and what they measure.
    #[arg(long)]
    list: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiments of a manifest and write reports.
    Run {
        /// Path to a TOML manifest (see docs/manifest.md).
        manifest: PathBuf,

        /// Output directory for JSON reports and CSV series.
        #[arg(long, env = "EXDISC_OUTPUT")]
        output: Option<PathBuf>,

        /// Output formats, comma separated: json,csv.
        #[arg(long, value_delimiter = ',')]
        format: Option<Vec<String>>,

        /// Worker threads for the per-mode parallelism (default: all cores).
        #[arg(long, env = "EXDISC_JOBS")]
        jobs: Option<usize>,

        /// Override the seed of every experiment.
        #[arg(long)]
        seed: Option<u64>,

        /// Print per-criterion lines, not just the summary table.
        #[arg(short, long, action = clap::ArgAction::Count)]
        verbose: u8,
    },
}

fn parse_formats(raw: &[String]) -> Result<Vec<OutputFormat>, String> {
    raw.iter()
        .map(|s| match s.trim() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format '{other}' (expected json, csv)")),
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for kind in ExperimentKind::all() {
            println!("{:<16} {}", kind.as_str(), kind.description());
        }
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run {
        manifest,
        output,
        format,
        jobs,
        seed,
        verbose,
    }) = cli.command
    else {
        eprintln!("nothing to do; try --list or run <manifest> (see --help)");
        return ExitCode::from(2);
    };

    if let Some(jobs) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("warning: could not set thread pool size: {e}");
        }
    }

    let parsed = match parse_manifest(&manifest) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let formats = match format {
        Some(raw) => match parse_formats(&raw) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => parsed.format.clone(),
    };
    let opts = DispatchOptions {
        output: output
            .or_else(|| parsed.output.clone())
            .unwrap_or_else(|| PathBuf::from("out")),
        formats,
        seed_override: seed,
        verbosity: verbose.max(parsed.verbosity),
    };

    match dispatch(&parsed, &opts) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
