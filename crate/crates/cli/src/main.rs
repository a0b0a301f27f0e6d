use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use relsite_cli::corpus::{run_corpus, Bounds};
use relsite_cli::report::{run_check_timed, Mode};
use relsite_cli::workspace::load_workspace;

const PASS: u8 = 0;
const FAIL: u8 = 1;
const INPUT: u8 = 2;
const DISCREPANCY: u8 = 3;

#[derive(Parser)]
#[command(name = "relsite", version, about = "Checks on finite sites and relative site morphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Load a workspace file and report the first error, if any.
    Validate { file: PathBuf },
    /// Run one check mode on a named problem.
    Check {
        file: PathBuf,
        #[arg(long)]
        problem: String,
        /// cofinality, filtered, fiberwise, diagonal, oracle or all.
        #[arg(long, default_value = "all")]
        mode: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Generate the corpus, evaluate every criterion and print a JSON report.
    Corpus {
        #[arg(long, default_value_t = 2)]
        max_objects: usize,
        #[arg(long, default_value_t = 3)]
        max_arrows: usize,
        #[arg(long, default_value_t = 2)]
        side_max_arrows: usize,
        #[arg(long, default_value_t = 4)]
        random_max_objects: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit with status 3 if any two equivalent criteria disagree.
        #[arg(long)]
        assert_equivalences: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(match cli.command {
        Command::Validate { file } => match load_workspace(&file) {
            Ok(ws) => {
                println!(
                    "{}: {} categories, {} functors, {} topologies, {} problems",
                    file.display(),
                    ws.categories.len(),
                    ws.functors.len(),
                    ws.topologies.len(),
                    ws.problems.len()
                );
                PASS
            }
            Err(e) => {
                eprintln!("error: {e}");
                INPUT
            }
        },
        Command::Check {
            file,
            problem,
            mode,
            format,
            timings,
        } => {
            let run = || -> Result<_, String> {
                let mode: Mode = mode.parse().map_err(|e| format!("{e}"))?;
                let ws = load_workspace(&file).map_err(|e| e.to_string())?;
                run_check_timed(&ws, &problem, mode, timings).map_err(|e| e.to_string())
            };
            match run() {
                Ok(report) => {
                    match format {
                        Format::Text => print!("{}", report.to_text()),
                        Format::Json => print!("{}", report.to_json()),
                    }
                    if report.discrepancy {
                        DISCREPANCY
                    } else if report.passed {
                        PASS
                    } else {
                        FAIL
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    INPUT
                }
            }
        }
        Command::Corpus {
            max_objects,
            max_arrows,
            side_max_arrows,
            random_max_objects,
            samples,
            seed,
            assert_equivalences,
        } => {
            let bounds = Bounds {
                max_objects,
                max_arrows,
                side_max_arrows,
                random_max_objects,
                samples,
            };
            let report = run_corpus(bounds, seed);
            print!("{}", report.to_json());
            if assert_equivalences && !report.all_agree() {
                eprintln!(
                    "{} disagreements, {} discrepancy events",
                    report.disagreements.len(),
                    report.discrepancy_events
                );
                DISCREPANCY
            } else {
                PASS
            }
        }
    })
}
