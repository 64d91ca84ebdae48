//! Toolchain for the cQASM 1.0 quantum assembly dialect: lexing, parsing,
//! semantic analysis, VLIW-style bundle scheduling and dense state-vector
//! simulation with seeded, fully reproducible measurement sampling.

pub mod analyze;
pub mod error;
pub mod gates;
pub mod ir;
pub mod lexer;
pub mod parser;
pub mod runtime;
pub mod scheduler;
pub mod statevector;

pub use analyze::{analyze, resolve_control_prefix, validate_bundle};
pub use error::{CompileError, LexError, Location, ParseError, RuntimeError, SemanticError};
pub use ir::{Axis, Bundle, GateKind, Instruction, Operation, Program, SubCircuit};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_index_expression, parse_source};
pub use runtime::{run, DisplayEvent, ExecutionRecord};
pub use scheduler::{schedule, DurationTable, ScheduleReport};
pub use statevector::StateVector;

/// Full front-end pipeline: source text to validated program.
pub fn compile(source: &str) -> Result<Program, CompileError> {
    let tokens = lexer::tokenize(source)?;
    let nodes = parser::parse(&tokens)?;
    Ok(analyze::analyze(&nodes)?)
}
