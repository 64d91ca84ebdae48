//! Bundle timing under the VLIW model.
//!
//! Bundles issue in program order with loops unrolled. A bundle occupies
//! the maximum duration of its member instructions; `wait n` always lasts
//! exactly its operand. Durations come from a configuration table keyed by
//! mnemonic, defaulting to one cycle, so a schedule computed with an empty
//! table and no waits counts exactly one cycle per bundle.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::analyze::NON_GATE_MNEMONICS;
use crate::ir::{GateKind, Operation, Program};

/// Error in a duration configuration file.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct DurationConfigError {
    pub line: usize,
    pub message: String,
}

/// Mnemonic-to-cycles table. Entries absent from the table take the
/// default of one cycle. `wait` carries its duration in its operand and
/// cannot be configured here.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DurationTable {
    durations: HashMap<&'static str, u64>,
}

fn canonical_mnemonic(name: &str) -> Option<&'static str> {
    if name == "measure" {
        return Some("measure_z");
    }
    if let Some(kind) = GateKind::from_mnemonic(name) {
        return Some(kind.mnemonic());
    }
    NON_GATE_MNEMONICS.iter().copied().find(|m| *m == name)
}

impl DurationTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Set the duration of one mnemonic (case-insensitive; `measure` and
    /// `measure_z` share an entry).
    pub fn set(&mut self, mnemonic: &str, cycles: u64) -> Result<(), String> {
        let folded = mnemonic.to_lowercase();
        if folded == "wait" {
            return Err("the duration of 'wait' is its operand".into());
        }
        let Some(key) = canonical_mnemonic(&folded) else {
            return Err(format!("unknown mnemonic '{mnemonic}'"));
        };
        if cycles < 1 {
            return Err(format!("duration of '{mnemonic}' must be at least 1 cycle"));
        }
        if self.durations.insert(key, cycles).is_some() {
            return Err(format!("duplicate duration for '{mnemonic}'"));
        }
        Ok(())
    }

    /// Parse the flat `mnemonic = cycles` file format. Blank lines and
    /// `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, DurationConfigError> {
        let mut table = DurationTable::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| DurationConfigError {
                line: idx + 1,
                message,
            };
            let Some((name, value)) = line.split_once('=') else {
                return Err(err(format!("expected 'mnemonic = cycles', got '{line}'")));
            };
            let cycles: u64 = value
                .trim()
                .parse()
                .map_err(|_| err(format!("invalid cycle count '{}'", value.trim())))?;
            table.set(name.trim(), cycles).map_err(err)?;
        }
        Ok(table)
    }

    /// Duration of one operation in cycles.
    pub fn duration_of(&self, op: &Operation) -> u64 {
        match op {
            Operation::Wait { cycles } => *cycles,
            _ => self.durations.get(op.mnemonic()).copied().unwrap_or(1),
        }
    }
}

/// Timing of one issued bundle (loops unrolled).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BundleSchedule {
    pub subcircuit: String,
    pub start_cycle: u64,
    pub duration: u64,
    pub qubits: Vec<usize>,
    pub instructions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub total_cycles: u64,
    pub bundles: Vec<BundleSchedule>,
}

impl ScheduleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization cannot fail")
    }
}

impl fmt::Display for ScheduleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8}  {:>8}  {:<12}  {:<10}  instructions", "start", "duration", "subcircuit", "qubits")?;
        for b in &self.bundles {
            let qubits = if b.qubits.is_empty() {
                "-".to_string()
            } else {
                b.qubits
                    .iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            writeln!(
                f,
                "{:>8}  {:>8}  {:<12}  {:<10}  {}",
                b.start_cycle,
                b.duration,
                b.subcircuit,
                qubits,
                b.instructions.join(" | ")
            )?;
        }
        write!(f, "total: {} cycles", self.total_cycles)
    }
}

/// Assign a start cycle to every bundle, loops unrolled, bundles issued
/// strictly in order: each bundle starts when the previous one finishes.
pub fn schedule(program: &Program, durations: &DurationTable) -> ScheduleReport {
    let mut bundles = Vec::new();
    let mut cursor = 0u64;
    for sub in &program.subcircuits {
        for _ in 0..sub.iterations {
            for bundle in &sub.bundles {
                let duration = bundle
                    .instructions
                    .iter()
                    .map(|i| durations.duration_of(&i.op))
                    .max()
                    .unwrap_or(1);
                let mut qubits: Vec<usize> = bundle
                    .instructions
                    .iter()
                    .flat_map(|i| i.qubits_touched(program.qubit_count))
                    .collect();
                qubits.sort_unstable();
                qubits.dedup();
                bundles.push(BundleSchedule {
                    subcircuit: sub.name.clone(),
                    start_cycle: cursor,
                    duration,
                    qubits,
                    instructions: bundle.instructions.iter().map(|i| i.to_string()).collect(),
                });
                cursor += duration;
            }
        }
    }
    ScheduleReport {
        total_cycles: cursor,
        bundles,
    }
}
