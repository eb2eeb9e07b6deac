use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wallcross_cli::cache::TableCache;
use wallcross_cli::config::{load_job, OutputMode, Task};
use wallcross_cli::report::{run, EXIT_INPUT};
use wallcross_core::analyzer::DualityMode;

#[derive(Parser)]
#[command(name = "wallcross", version, about = "Local cohomology and wall-crossing checks for graded rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(clap::Args)]
struct Flags {
    /// Weight range as MIN,MAX.
    #[arg(long = "box", global = true, value_parser = parse_range, allow_hyphen_values = true)]
    weights: Option<[i64; 2]>,
    /// Bound on the L1 norm of probed fine degrees.
    #[arg(long, global = true)]
    fine_bound: Option<u32>,
    /// Largest Čech truncation level.
    #[arg(long, global = true)]
    kmax: Option<u32>,
    /// Duality comparison mode.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Duality parameter a (defaults to -sigma).
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<i64>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    structured: bool,
    /// Directory for cached cohomology tables.
    #[arg(long, global = true, env = "WALLCROSS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Weight,
    Fine,
}

#[derive(Subcommand)]
enum Command {
    /// Classification, vanishing bounds and canonical vanishing.
    Analyze { config: PathBuf },
    /// Čech cohomology table.
    Cech { config: PathBuf },
    /// Local cohomology table.
    Localcoh { config: PathBuf },
    /// Dimension-level duality between the two sides.
    Duality { config: PathBuf },
    /// Slice and window inventories.
    Windows { config: PathBuf },
    /// Gorenstein test.
    Gorenstein { config: PathBuf },
    /// Compare the table with independent counts.
    Crosscheck { config: PathBuf },
    /// Run the tasks listed in the document.
    Run { config: PathBuf },
}

fn parse_range(s: &str) -> Result<[i64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected MIN,MAX")?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([p(a)?, p(b)?])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (path, task) = match cli.command {
        Command::Analyze { config } => (config, Some(Task::Analyze)),
        Command::Cech { config } => (config, Some(Task::Cech)),
        Command::Localcoh { config } => (config, Some(Task::Localcoh)),
        Command::Duality { config } => (config, Some(Task::Duality)),
        Command::Windows { config } => (config, Some(Task::Windows)),
        Command::Gorenstein { config } => (config, Some(Task::Gorenstein)),
        Command::Crosscheck { config } => (config, Some(Task::Crosscheck)),
        Command::Run { config } => (config, None),
    };
    let f = cli.flags;
    let job = load_job(&path).and_then(|mut doc| {
        if let Some(t) = task {
            doc.tasks = vec![t];
        }
        if let Some(w) = f.weights {
            doc.probe.weights = w;
        }
        if let Some(b) = f.fine_bound {
            doc.probe.fine_bound = b;
        }
        if let Some(k) = f.kmax {
            doc.probe.kmax = k;
        }
        if let Some(m) = f.mode {
            doc.mode = match m {
                Mode::Weight => DualityMode::Weight,
                Mode::Fine => DualityMode::Fine,
            };
        }
        if f.a.is_some() {
            doc.a = f.a;
        }
        if f.structured {
            doc.output = OutputMode::Structured;
        }
        if f.cache_dir.is_some() {
            doc.cache_dir = f.cache_dir;
        }
        doc.validate()
    });
    let job = match job {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let mut cache = TableCache::new(job.document.cache_dir.as_deref());
    let (report, log) = run(&job, &mut cache);
    for w in &log.warnings {
        eprintln!("warning: {w}");
    }
    match job.document.output {
        OutputMode::Structured => println!("{}", report.to_json()),
        OutputMode::Text => print!("{}", report.to_text()),
    }
    ExitCode::from(report.exit_code as u8)
}
