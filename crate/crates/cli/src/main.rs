//! `sbs`: score concept orientations in a labeled short-text corpus.
//!
//! Exit codes: 0 success, 1 a pipeline stage failed (or validation flagged
//! cells), 2 bad usage or configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::warn;
use sbs_core::pipeline::{self, RunConfig, RunOutcome, StageError, Table3Report};
use sbs_core::report::Format;
use sbs_core::scoring::rank_orientations;
use sbs_core::Execution;

const EXIT_STAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "sbs",
    version,
    about = "Semantic Brand Score of concept orientations per stakeholder group"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all artifacts.
    Run(RunArgs),
    /// Render the report tables of a finished run.
    Report {
        /// Output directory of a previous `run`.
        dir: PathBuf,
        #[arg(long, default_value = "markdown", value_parser = ["csv", "json", "markdown", "md"])]
        format: String,
    },
    /// Check that published combined shares equal the mean of their components.
    Validate {
        /// Share grid CSV; the bundled published grid when omitted.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Also write the per-cell report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run once per co-occurrence window and compare the rankings.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [5usize, 7])]
        windows: Vec<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Corpus format; guessed from the file extension when omitted.
    #[arg(long, value_parser = ["jsonl", "csv"])]
    format: Option<String>,
    /// Comma-separated group labels to report (overall is always included).
    #[arg(long, value_delimiter = ',')]
    groups: Option<Vec<String>>,
    #[arg(long)]
    no_spam_filter: bool,
    #[arg(long)]
    no_query_filter: bool,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    prune_min: Option<u64>,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::load(&self.config).map_err(|e| e.to_string())?;
        if let Some(f) = &self.format {
            cfg.corpus_format = Some(f.clone());
        }
        if let Some(g) = &self.groups {
            cfg.groups = Some(g.clone());
        }
        if self.no_spam_filter {
            cfg.spam.enabled = false;
        }
        if self.no_query_filter {
            cfg.query = None;
        }
        if let Some(w) = self.window {
            cfg.graph.window = w;
        }
        if let Some(p) = self.prune_min {
            cfg.graph.prune_min_weight = p;
        }
        Ok(cfg)
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SBS_LOG_LEVEL", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Report { dir, format } => cmd_report(&dir, &format),
        Command::Validate { grid, out } => cmd_validate(grid.as_deref(), out.as_deref()),
        Command::Sweep { run, windows } => cmd_sweep(&run, &windows),
    }
}

fn stage_failure(e: &StageError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_STAGE
    })
}

fn config_failure(msg: &str) -> ExitCode {
    eprintln!("error: [config] {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn print_summary(outcome: &RunOutcome, out: &Path) {
    let m = &outcome.manifest;
    println!(
        "{} documents analysed ({} loaded, {} malformed rows, {} spam, {} outside the query)",
        m.documents.analysed,
        m.documents.loaded,
        m.documents.malformed_rows,
        m.documents.spam_excluded,
        m.documents.query_excluded
    );
    for g in &outcome.groups {
        let ranked: Vec<String> = rank_orientations(&g.scores, &g.group)
            .iter()
            .map(|r| format!("{} {:.2}%", r.orientation, r.share_sbs))
            .collect();
        println!(
            "{:<24} {:>6} docs  {}",
            g.group.as_str(),
            g.doc_count,
            ranked.join(" > ")
        );
    }
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    println!("artifacts written to {}", out.display());
}

fn cmd_run(args: &RunArgs) -> ExitCode {
    let cfg = match args.config() {
        Ok(c) => c,
        Err(e) => return config_failure(&e),
    };
    match pipeline::run_with(&args.corpus, &cfg, &args.out, args.exec()) {
        Ok(outcome) => {
            print_summary(&outcome, &args.out);
            ExitCode::SUCCESS
        }
        Err(e) => stage_failure(&e),
    }
}

fn cmd_sweep(args: &RunArgs, windows: &[usize]) -> ExitCode {
    let cfg = match args.config() {
        Ok(c) => c,
        Err(e) => return config_failure(&e),
    };
    if args.window.is_some() {
        warn!("--window is ignored by sweep; use --windows");
    }
    match pipeline::window_sweep(&args.corpus, &cfg, windows, &args.out, args.exec()) {
        Ok(sweep) => {
            for (w, outcome) in &sweep.runs {
                println!("== window {w}");
                print_summary(outcome, &args.out.join(format!("window_{w}")));
            }
            println!("comparison written to {}", sweep.comparison.display());
            ExitCode::SUCCESS
        }
        Err(e) => stage_failure(&e),
    }
}

fn cmd_report(dir: &Path, format: &str) -> ExitCode {
    let format: Format = match format.parse() {
        Ok(f) => f,
        Err(e) => return config_failure(&e.to_string()),
    };
    let rendered = pipeline::load_report(dir).and_then(|r| r.render(format));
    let text = match rendered {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: [report] {e}");
            return ExitCode::from(EXIT_STAGE);
        }
    };
    let path = dir.join(format!("report.{}", format.extension()));
    if let Err(e) = fs::write(&path, &text) {
        eprintln!("error: [report.write] {}: {e}", path.display());
        return ExitCode::from(EXIT_STAGE);
    }
    print!("{text}");
    ExitCode::SUCCESS
}

fn cmd_validate(grid: Option<&Path>, out: Option<&Path>) -> ExitCode {
    let report: Table3Report = match grid {
        Some(path) => match pipeline::validate_table3(path) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: [validate] {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => pipeline::validate_grid(&pipeline::PublishedGrid::bundled()),
    };
    for c in &report.cells {
        println!(
            "{:<24} {:<22} published {:>6.2}  mean of shares {:>6.2}  |Δ| {:>5.2}{}",
            c.orientation,
            c.group.as_str(),
            c.published_sbs,
            c.reconstructed_sbs,
            c.abs_delta,
            if c.flagged { "  FLAGGED" } else { "" }
        );
    }
    println!(
        "{} cells, max |Δ| = {:.2} pp, {} flagged (tolerance {:.1})",
        report.cells.len(),
        report.max_abs_delta,
        report.flagged,
        report.tolerance
    );
    if let Some(path) = out {
        let body = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        if let Err(e) = fs::write(path, body) {
            eprintln!("error: [validate] {}: {e}", path.display());
            return ExitCode::from(EXIT_STAGE);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_STAGE)
    }
}
