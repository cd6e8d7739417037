use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use pcs_core::fixtures::{check_example, worked_examples};
use pcs_core::report::{self, LpMethod};
use pcs_core::{read_instance, Error, ErrorClass, Instance, IrlsConfig, ReportDocument, DEFAULT_BUDGET};

const EXIT_VERIFICATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

/// Exact analysis of real phaseless compressed sensing instances.
#[derive(Parser)]
#[command(name = "pcs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the full equivalence certificate.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include every pseudo-extreme point in the report.
        #[arg(long)]
        verbose: bool,
    },
    /// Run a single solver.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        delta0: f64,
        #[arg(long, default_value_t = 0.1)]
        delta_factor: f64,
        #[arg(long, default_value_t = 8)]
        stages: usize,
        #[arg(long, default_value_t = 50)]
        inner_iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every lp optimum is a sparsest solution for each p below p*.
    Verify {
        file: PathBuf,
        #[arg(long = "p", required = true)]
        ps: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the two built-in worked examples.
    PaperExamples,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    L0,
    Lp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Heuristic,
}

fn budget() -> anyhow::Result<u64> {
    match std::env::var("PCS_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("PCS_BUDGET must be a non-negative integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_instance(&text).with_context(|| format!("in {}", path.display()))
}

fn emit(doc: &ReportDocument, out: Option<&Path>) -> anyhow::Result<()> {
    let text = doc.to_json();
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn examples_table() -> anyhow::Result<u8> {
    let budget = budget()?;
    let mut all_match = true;
    for ex in worked_examples() {
        println!("{}", ex.name);
        println!("  {:<14} {:<28} {:<28} status", "field", "expected", "computed");
        let checks = check_example(&ex, budget)?;
        for c in &checks {
            println!("  {c}");
        }
        all_match &= checks.iter().all(|c| c.matches);
    }
    if all_match {
        println!("all values match");
        Ok(0)
    } else {
        println!("MISMATCH");
        Ok(EXIT_VERIFICATION)
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Analyze { file, out, verbose } => {
            let inst = load(&file)?;
            emit(&report::analyze(&inst, verbose, budget()?)?, out.as_deref())?;
            Ok(0)
        }
        Command::Solve {
            file,
            problem,
            p,
            method,
            restarts,
            seed,
            delta0,
            delta_factor,
            stages,
            inner_iterations,
            out,
        } => {
            let inst = load(&file)?;
            let doc = match problem {
                Problem::L0 => report::solve_l0(&inst, budget()?)?,
                Problem::Lp => {
                    let Some(p) = p else {
                        return Err(Error::Field {
                            field: "--p".into(),
                            message: "required with --problem lp".into(),
                        }
                        .into());
                    };
                    let method = match method {
                        Method::Exact => LpMethod::Exact,
                        Method::Heuristic => LpMethod::Heuristic(IrlsConfig {
                            restarts,
                            seed,
                            delta0,
                            delta_factor,
                            stages,
                            inner_iterations,
                        }),
                    };
                    report::solve_lp(&inst, p, &method, budget()?)?
                }
            };
            emit(&doc, out.as_deref())?;
            Ok(0)
        }
        Command::Verify { file, ps, out } => {
            let inst = load(&file)?;
            let doc = report::verify(&inst, &ps, budget()?)?;
            emit(&doc, out.as_deref())?;
            for v in &doc.verification {
                let status = format!("{:?}", v.status).to_uppercase();
                eprintln!("p = {}: {status}", v.p);
            }
            if doc.any_failed() || doc.any_refused() {
                Ok(EXIT_VERIFICATION)
            } else {
                Ok(0)
            }
        }
        Command::PaperExamples => examples_table(),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()).map(Error::class) {
        Some(ErrorClass::Input) => EXIT_INPUT,
        Some(ErrorClass::Budget) => EXIT_BUDGET,
        Some(ErrorClass::Refused) => EXIT_VERIFICATION,
        Some(ErrorClass::Internal) => EXIT_INTERNAL,
        None => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
