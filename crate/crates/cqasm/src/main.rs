//! `cqasm` command-line driver.
//!
//! Exit codes: 0 success, 1 lex/parse/semantic/runtime diagnostics,
//! 2 I/O failures. Diagnostics go to stderr as `file:line:column: message`;
//! program output goes to stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cqasm::error::CompileError;
use cqasm::runtime::ExecutionRecord;
use cqasm::scheduler::DurationTable;
use cqasm::Program;

#[derive(Parser)]
#[command(name = "cqasm", version, about = "Parse, validate, schedule and simulate cQASM 1.0 programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a program and print its display events
    Run {
        /// Source file (.qc)
        input: PathBuf,
        /// Random seed; equal seeds reproduce runs bit for bit
        #[arg(long, env = "CQASM_SEED", default_value_t = 0)]
        seed: u64,
        /// Number of complete executions from |0...0>
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Parse and validate only; quiet on success
    Check {
        /// Source file (.qc)
        input: PathBuf,
    },
    /// Print per-bundle start cycles and the total duration
    Schedule {
        /// Source file (.qc)
        input: PathBuf,
        /// Duration table, lines of `mnemonic = cycles` (default: 1 each)
        #[arg(long)]
        durations: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the validated program as canonical JSON
    #[command(name = "emit-ir")]
    EmitIr {
        /// Source file (.qc)
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn read_source(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn compile_file(path: &Path) -> Result<Program, ExitCode> {
    let source = read_source(path)?;
    cqasm::compile(&source).map_err(|e| {
        report_compile_error(path, &e);
        ExitCode::from(1)
    })
}

fn report_compile_error(path: &Path, error: &CompileError) {
    // CompileError renders as "line:col: kind: message" (location first
    // when present), so prefixing the path yields file:line:column.
    match error {
        CompileError::Semantic(e) if e.location.is_none() => {
            eprintln!("{}: {e}", path.display());
        }
        _ => eprintln!("{}:{error}", path.display()),
    }
}

fn dispatch(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Check { input } => {
            compile_file(&input)?;
            Ok(())
        }
        Command::EmitIr { input } => {
            let program = compile_file(&input)?;
            println!("{}", program.canonical_json());
            Ok(())
        }
        Command::Schedule {
            input,
            durations,
            format,
        } => {
            let program = compile_file(&input)?;
            let table = match durations {
                None => DurationTable::new(),
                Some(path) => {
                    let text = read_source(&path)?;
                    DurationTable::parse(&text).map_err(|e| {
                        eprintln!("{}:{e}", path.display());
                        ExitCode::from(1)
                    })?
                }
            };
            let report = cqasm::schedule(&program, &table);
            match format {
                Format::Text => println!("{report}"),
                Format::Json => println!("{}", report.to_json()),
            }
            Ok(())
        }
        Command::Run {
            input,
            seed,
            shots,
            format,
        } => {
            let program = compile_file(&input)?;
            let record = cqasm::run(&program, seed, shots).map_err(|e| {
                eprintln!("{}: {e}", input.display());
                ExitCode::from(1)
            })?;
            match format {
                Format::Text => print_record_text(&record),
                Format::Json => print_record_json(&record),
            }
            Ok(())
        }
    }
}

fn print_record_text(record: &ExecutionRecord) {
    for event in &record.events {
        println!("{}", event.render_text());
    }
    let bits: String = record
        .final_bits
        .iter()
        .rev()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    println!("bits: {bits}");
}

/// Amplitudes above this register size are omitted from the JSON result
/// line (the full vector is still available through `display` events).
const JSON_AMPLITUDE_LIMIT_QUBITS: usize = 16;

#[derive(Serialize)]
struct ResultDoc {
    r#type: &'static str,
    seed: u64,
    shots: u64,
    bits: Vec<u8>,
    amplitudes: Option<Vec<[f64; 2]>>,
}

fn print_record_json(record: &ExecutionRecord) {
    for event in &record.events {
        println!("{}", event.to_json());
    }
    let qubit_count = record.final_bits.len();
    let amplitudes = if qubit_count <= JSON_AMPLITUDE_LIMIT_QUBITS {
        Some(
            record
                .final_amplitudes
                .iter()
                .map(|a| [a.re, a.im])
                .collect(),
        )
    } else {
        None
    };
    let result = ResultDoc {
        r#type: "result",
        seed: record.seed,
        shots: record.shots,
        bits: record.final_bits.iter().map(|&b| u8::from(b)).collect(),
        amplitudes,
    };
    println!(
        "{}",
        serde_json::to_string(&result).expect("result serialization cannot fail")
    );
}
