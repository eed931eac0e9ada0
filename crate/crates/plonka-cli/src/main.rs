//! Command-line surface over the decomposition library.
//!
//! Exit codes: 0 when the analysis completed (whatever the verdict), 1 on
//! input errors, 2 when a resource cap cut the work short.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use plonka_core::error::Error;
use plonka_core::format::{
    parse_algebra_with, parse_system_with, render_algebra, render_partition,
};
use plonka_core::partition::{brute_force_search, from_system, verify_axioms, SearchOutcome};
use plonka_core::report::{build_report, render_dot, render_json, render_text};
use plonka_core::systems::{decompose, plonka_sum};
use plonka_core::{FiniteAlgebra, Limits};

#[derive(Parser)]
#[command(
    name = "plonka",
    version,
    about = "Decompose finite algebras into direct systems, or compose them back"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// List every isolated subalgebra of the algebra in FILE
    Isolated { file: PathBuf },
    /// Enumerate the frames of isolated subalgebras, with complements
    Frames { file: PathBuf },
    /// Run the full decomposition and print the report
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Cap on the universe size for the subset scan
        #[arg(long)]
        max_universe: Option<usize>,
    },
    /// Build the Płonka sum of the direct system in SYSTEM_FILE and print it
    /// as an algebra document
    Compose { system_file: PathBuf },
    /// Derive a partition function from a decomposition, or search for one
    Partition {
        file: PathBuf,
        /// Search the function space directly instead of decomposing
        #[arg(long)]
        brute_force: bool,
        /// Node budget for the search (required above 4 elements)
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check that the direct system in --system composes to the algebra in FILE
    Verify {
        file: PathBuf,
        #[arg(long)]
        system: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

fn limits(max_universe: Option<usize>) -> Result<Limits, Error> {
    let mut limits = Limits::default();
    if let Ok(v) = std::env::var("PLONKA_MAX_UNIVERSE") {
        let parsed: usize = v
            .parse()
            .map_err(|_| Error::input(format!("PLONKA_MAX_UNIVERSE is not a number: '{v}'")))?;
        limits.max_universe = parsed;
    }
    if let Some(v) = max_universe {
        limits.max_universe = v;
    }
    Ok(limits)
}

fn load_algebra(path: &Path, limits: &Limits) -> Result<FiniteAlgebra, Error> {
    parse_algebra_with(&read(path)?, limits)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Isolated { file } => {
            let limits = limits(None)?;
            let alg = load_algebra(&file, &limits)?;
            let fam = plonka_core::isolation::all_isolated(&alg, &limits)?;
            println!("isolated family of {} ({} members):", alg.name(), fam.len());
            for (i, m) in fam.members().iter().enumerate() {
                println!("  I{} = {}", i + 1, alg.format_set(*m));
            }
        }
        Command::Frames { file } => {
            let limits = limits(None)?;
            let alg = load_algebra(&file, &limits)?;
            let fam = plonka_core::isolation::all_isolated(&alg, &limits)?;
            let frames = plonka_core::frames::enumerate_frames(&alg, &fam, &limits)?;
            println!("frames of {} ({}):", alg.name(), frames.len());
            for (fi, frame) in frames.iter().enumerate() {
                let members: Vec<String> = frame
                    .members()
                    .iter()
                    .map(|m| format!("I{}", m + 1))
                    .collect();
                let comps: Vec<String> = (0..frame.len())
                    .map(|pos| {
                        format!(
                            "I{}- = {}",
                            frame.members()[pos] + 1,
                            alg.format_set(frame.complement(pos))
                        )
                    })
                    .collect();
                let covering: Vec<String> = frame
                    .covering()
                    .iter()
                    .map(|&(i, j)| {
                        format!("I{} -> I{}", frame.members()[i] + 1, frame.members()[j] + 1)
                    })
                    .collect();
                println!(
                    "  frame {}: members {{{}}}; covering: {}; complements: {}",
                    fi + 1,
                    members.join(", "),
                    covering.join(", "),
                    comps.join(", ")
                );
            }
        }
        Command::Decompose {
            file,
            format,
            max_universe,
        } => {
            let limits = limits(max_universe)?;
            let alg = load_algebra(&file, &limits)?;
            let start = Instant::now();
            let d = decompose(&alg, &limits)?;
            let timing_ms = start.elapsed().as_millis() as u64;
            match format {
                Format::Text => print!("{}", render_text(&alg, &d)),
                Format::Json => {
                    let body = build_report(&alg, &d);
                    println!("{}", render_json(&body, timing_ms));
                }
                Format::Dot => print!("{}", render_dot(&alg, &d)),
            }
        }
        Command::Compose { system_file } => {
            let limits = limits(None)?;
            let sys = parse_system_with(&read(&system_file)?, &limits)?;
            print!("{}", render_algebra(&plonka_sum(&sys)));
        }
        Command::Partition {
            file,
            brute_force,
            budget,
        } => {
            let limits = limits(None)?;
            let alg = load_algebra(&file, &limits)?;
            if brute_force {
                let result = brute_force_search(&alg, budget)?;
                match result.outcome {
                    SearchOutcome::Found(f) => {
                        let report = verify_axioms(&alg, &f)?;
                        println!(
                            "partition function found ({} nodes searched):",
                            result.nodes
                        );
                        print!("{}", render_partition(&alg, &f));
                        println!(
                            "axioms: {}",
                            if report.all_pass() {
                                "all pass".to_string()
                            } else {
                                format!("FAILED {:?}", report.failing())
                            }
                        );
                    }
                    SearchOutcome::Refuted => {
                        println!(
                            "no non-trivial partition function exists \
                             (space fully refuted, {} nodes searched)",
                            result.nodes
                        );
                    }
                    SearchOutcome::BudgetExhausted => {
                        return Err(Error::resource(format!(
                            "search budget exhausted after {} nodes; \
                             the space was not decided",
                            result.nodes
                        )));
                    }
                }
            } else {
                let d = decompose(&alg, &limits)?;
                match d.systems.first() {
                    Some(entry) => {
                        let (sum, f) = from_system(&entry.system);
                        let report = verify_axioms(&sum, &f)?;
                        println!("partition function induced by system 1 of {}:", alg.name());
                        print!("{}", render_partition(&sum, &f));
                        println!(
                            "axioms: {}",
                            if report.all_pass() {
                                "all pass".to_string()
                            } else {
                                format!("FAILED {:?}", report.failing())
                            }
                        );
                    }
                    None => println!(
                        "{} admits no non-trivial system; no partition function derived \
                         (try --brute-force for an independent refutation)",
                        alg.name()
                    ),
                }
            }
        }
        Command::Verify { file, system } => {
            let limits = limits(None)?;
            let alg = load_algebra(&file, &limits)?;
            let sys = parse_system_with(&read(&system)?, &limits)?;
            let sum = plonka_sum(&sys);
            if sum.same_tables(&alg) {
                println!("MATCH: the system composes to {} exactly", alg.name());
            } else {
                println!(
                    "MISMATCH: the system composes to an algebra different from {}",
                    alg.name()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ (Error::Input(_) | Error::Parse { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e @ Error::Resource(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
