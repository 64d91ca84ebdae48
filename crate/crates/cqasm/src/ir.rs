//! Executable program representation.
//!
//! A `Program` is the fully validated output of semantic analysis: aliases
//! resolved, SGMQ operand sets expanded, arities checked. Values are
//! immutable once built and safe to share across threads.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::parser::format_real;

/// Measurement / preparation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn letter(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

/// The unitary gate catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    I,
    H,
    X,
    Y,
    Z,
    Rx,
    Ry,
    Rz,
    X90,
    Y90,
    MX90,
    MY90,
    S,
    Sdag,
    T,
    Tdag,
    Cnot,
    Toffoli,
    Cz,
    Swap,
    Crk,
    Cr,
}

/// Extra parameter a gate expects besides its qubit operands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateParameter {
    None,
    /// Rotation angle in radians.
    Angle,
    /// Phase-shift exponent k, phase pi / 2^k.
    PhaseExponent,
}

pub const GATE_KINDS: [GateKind; 22] = [
    GateKind::I,
    GateKind::H,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::X90,
    GateKind::Y90,
    GateKind::MX90,
    GateKind::MY90,
    GateKind::S,
    GateKind::Sdag,
    GateKind::T,
    GateKind::Tdag,
    GateKind::Cnot,
    GateKind::Toffoli,
    GateKind::Cz,
    GateKind::Swap,
    GateKind::Crk,
    GateKind::Cr,
];

impl GateKind {
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::I => "i",
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::X90 => "x90",
            GateKind::Y90 => "y90",
            GateKind::MX90 => "mx90",
            GateKind::MY90 => "my90",
            GateKind::S => "s",
            GateKind::Sdag => "sdag",
            GateKind::T => "t",
            GateKind::Tdag => "tdag",
            GateKind::Cnot => "cnot",
            GateKind::Toffoli => "toffoli",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Crk => "crk",
            GateKind::Cr => "cr",
        }
    }

    pub fn from_mnemonic(m: &str) -> Option<Self> {
        GATE_KINDS.iter().copied().find(|g| g.mnemonic() == m)
    }

    /// Number of qubit operands.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap | GateKind::Crk | GateKind::Cr => 2,
            GateKind::Toffoli => 3,
            _ => 1,
        }
    }

    pub fn parameter(self) -> GateParameter {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Cr => GateParameter::Angle,
            GateKind::Crk => GateParameter::PhaseExponent,
            _ => GateParameter::None,
        }
    }
}

/// What one instruction does, with all operands resolved to indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Operation {
    Gate {
        kind: GateKind,
        qubits: Vec<usize>,
        angle: Option<f64>,
        k: Option<u32>,
    },
    Prep {
        axis: Axis,
        qubit: usize,
    },
    Measure {
        axis: Axis,
        qubit: usize,
    },
    MeasureAll,
    MeasureParity {
        pairs: Vec<(usize, Axis)>,
    },
    Not {
        bits: Vec<usize>,
    },
    Wait {
        cycles: u64,
    },
    Display {
        bit: Option<usize>,
    },
    /// Empty qubit list means every qubit.
    ResetAveraging {
        qubits: Vec<usize>,
    },
}

impl Operation {
    /// Canonical mnemonic; `measure` is normalised to `measure_z`.
    pub fn mnemonic(&self) -> &'static str {
        match self {
            Operation::Gate { kind, .. } => kind.mnemonic(),
            Operation::Prep { axis: Axis::X, .. } => "prep_x",
            Operation::Prep { axis: Axis::Y, .. } => "prep_y",
            Operation::Prep { axis: Axis::Z, .. } => "prep_z",
            Operation::Measure { axis: Axis::X, .. } => "measure_x",
            Operation::Measure { axis: Axis::Y, .. } => "measure_y",
            Operation::Measure { axis: Axis::Z, .. } => "measure_z",
            Operation::MeasureAll => "measure_all",
            Operation::MeasureParity { .. } => "measure_parity",
            Operation::Not { .. } => "not",
            Operation::Wait { .. } => "wait",
            Operation::Display { .. } => "display",
            Operation::ResetAveraging { .. } => "reset_averaging",
        }
    }
}

/// One executable instruction: an operation plus the classical control
/// bits that gate it (empty for unconditional execution).
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub controls: Vec<usize>,
    pub op: Operation,
}

impl Instruction {
    pub fn unconditional(op: Operation) -> Self {
        Instruction {
            controls: Vec::new(),
            op,
        }
    }

    /// Qubits this instruction occupies, for bundle-disjointness and
    /// scheduling. Register-wide operations occupy every qubit.
    pub fn qubits_touched(&self, qubit_count: usize) -> Vec<usize> {
        match &self.op {
            Operation::Gate { qubits, .. } => qubits.clone(),
            Operation::Prep { qubit, .. } | Operation::Measure { qubit, .. } => vec![*qubit],
            Operation::MeasureAll => (0..qubit_count).collect(),
            Operation::MeasureParity { pairs } => pairs.iter().map(|(q, _)| *q).collect(),
            Operation::ResetAveraging { qubits } => {
                if qubits.is_empty() {
                    (0..qubit_count).collect()
                } else {
                    qubits.clone()
                }
            }
            Operation::Not { .. } | Operation::Wait { .. } | Operation::Display { .. } => vec![],
        }
    }

    /// Classical bits this instruction writes.
    pub fn bits_written(&self, qubit_count: usize) -> Vec<usize> {
        match &self.op {
            Operation::Measure { qubit, .. } => vec![*qubit],
            Operation::MeasureAll => (0..qubit_count).collect(),
            Operation::MeasureParity { pairs } => pairs.iter().map(|(q, _)| *q).collect(),
            Operation::Not { bits } => bits.clone(),
            _ => vec![],
        }
    }
}

/// Instructions scheduled to start in parallel.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub instructions: Vec<Instruction>,
}

/// A named section of the program, executed `iterations` times.
#[derive(Debug, Clone, PartialEq)]
pub struct SubCircuit {
    pub name: String,
    pub iterations: u64,
    pub bundles: Vec<Bundle>,
}

/// A validated cQASM program.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub qubit_count: usize,
    pub qubit_aliases: BTreeMap<String, usize>,
    pub bit_aliases: BTreeMap<String, usize>,
    pub subcircuits: Vec<SubCircuit>,
}

impl Program {
    /// Total number of bundles with loops unrolled.
    pub fn unrolled_bundle_count(&self) -> u64 {
        self.subcircuits
            .iter()
            .map(|s| s.iterations * s.bundles.len() as u64)
            .sum()
    }
}

// ---------------------------------------------------------------------------
// Canonical JSON document (`emit-ir`). Field order is fixed by the struct
// declarations so the output is byte-stable for golden-file comparison.

#[derive(Serialize)]
struct ProgramDoc<'a> {
    qubits: usize,
    aliases: AliasesDoc<'a>,
    subcircuits: Vec<SubCircuitDoc<'a>>,
}

#[derive(Serialize)]
struct AliasesDoc<'a> {
    qubit: &'a BTreeMap<String, usize>,
    bit: &'a BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct SubCircuitDoc<'a> {
    name: &'a str,
    iterations: u64,
    bundles: Vec<Vec<InstructionDoc>>,
}

#[derive(Serialize)]
struct InstructionDoc {
    kind: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    controls: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    bits: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pairs: Vec<(usize, &'static str)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycles: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bit: Option<usize>,
}

impl InstructionDoc {
    fn new(instr: &Instruction) -> Self {
        let mut doc = InstructionDoc {
            kind: instr.op.mnemonic(),
            controls: instr.controls.clone(),
            qubits: vec![],
            bits: vec![],
            pairs: vec![],
            angle: None,
            k: None,
            cycles: None,
            bit: None,
        };
        match &instr.op {
            Operation::Gate {
                qubits, angle, k, ..
            } => {
                doc.qubits = qubits.clone();
                doc.angle = *angle;
                doc.k = *k;
            }
            Operation::Prep { qubit, .. } | Operation::Measure { qubit, .. } => {
                doc.qubits = vec![*qubit];
            }
            Operation::MeasureAll => {}
            Operation::MeasureParity { pairs } => {
                doc.pairs = pairs.iter().map(|(q, a)| (*q, a.letter())).collect();
            }
            Operation::Not { bits } => doc.bits = bits.clone(),
            Operation::Wait { cycles } => doc.cycles = Some(*cycles),
            Operation::Display { bit } => doc.bit = *bit,
            Operation::ResetAveraging { qubits } => doc.qubits = qubits.clone(),
        }
        doc
    }
}

impl Program {
    /// The canonical JSON document printed by `emit-ir`.
    pub fn canonical_json(&self) -> String {
        let doc = ProgramDoc {
            qubits: self.qubit_count,
            aliases: AliasesDoc {
                qubit: &self.qubit_aliases,
                bit: &self.bit_aliases,
            },
            subcircuits: self
                .subcircuits
                .iter()
                .map(|s| SubCircuitDoc {
                    name: &s.name,
                    iterations: s.iterations,
                    bundles: s
                        .bundles
                        .iter()
                        .map(|b| b.instructions.iter().map(InstructionDoc::new).collect())
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("IR serialization cannot fail")
    }
}

// ---------------------------------------------------------------------------
// Pretty-printing back to source form. Analysing the printed text yields an
// identical Program.

fn index_list(reg: char, indices: &[usize]) -> String {
    let inner: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    format!("{reg}[{}]", inner.join(","))
}

impl Operation {
    /// Operand part of the source form, without the mnemonic; empty for
    /// operand-less instructions.
    fn operand_text(&self) -> String {
        match self {
            Operation::Gate {
                qubits, angle, k, ..
            } => {
                let mut parts: Vec<String> = qubits.iter().map(|q| index_list('q', &[*q])).collect();
                if let Some(a) = angle {
                    parts.push(format_real(*a));
                }
                if let Some(k) = k {
                    parts.push(k.to_string());
                }
                parts.join(",")
            }
            Operation::Prep { qubit, .. } | Operation::Measure { qubit, .. } => {
                index_list('q', &[*qubit])
            }
            Operation::MeasureAll => String::new(),
            Operation::MeasureParity { pairs } => {
                let parts: Vec<String> = pairs
                    .iter()
                    .map(|(q, a)| format!("{},{a}", index_list('q', &[*q])))
                    .collect();
                parts.join(",")
            }
            Operation::Not { bits } => index_list('b', bits),
            Operation::Wait { cycles } => cycles.to_string(),
            Operation::Display { bit } => match bit {
                Some(b) => index_list('b', &[*b]),
                None => String::new(),
            },
            Operation::ResetAveraging { qubits } => {
                if qubits.is_empty() {
                    String::new()
                } else {
                    index_list('q', qubits)
                }
            }
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let operands = self.op.operand_text();
        if !self.controls.is_empty() {
            write!(
                f,
                "c-{} {},{operands}",
                self.op.mnemonic(),
                index_list('b', &self.controls)
            )
        } else if operands.is_empty() {
            write!(f, "{}", self.op.mnemonic())
        } else {
            write!(f, "{} {operands}", self.op.mnemonic())
        }
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.instructions.len() == 1 {
            write!(f, "{}", self.instructions[0])
        } else {
            write!(f, "{{ ")?;
            for (i, instr) in self.instructions.iter().enumerate() {
                if i > 0 {
                    write!(f, " | ")?;
                }
                write!(f, "{instr}")?;
            }
            write!(f, " }}")
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.qubit_count)?;
        let mut qubit_maps: Vec<_> = self.qubit_aliases.iter().collect();
        qubit_maps.sort_by_key(|(name, idx)| (**idx, (*name).clone()));
        for (name, idx) in qubit_maps {
            writeln!(f, "map q[{idx}],{name}")?;
        }
        let mut bit_maps: Vec<_> = self.bit_aliases.iter().collect();
        bit_maps.sort_by_key(|(name, idx)| (**idx, (*name).clone()));
        for (name, idx) in bit_maps {
            writeln!(f, "map b[{idx}],{name}")?;
        }
        for sub in &self.subcircuits {
            if sub.iterations == 1 {
                writeln!(f, ".{}", sub.name)?;
            } else {
                writeln!(f, ".{}({})", sub.name, sub.iterations)?;
            }
            for bundle in &sub.bundles {
                writeln!(f, "{bundle}")?;
            }
        }
        Ok(())
    }
}
