//! Semantic analysis: syntax tree to validated `Program`.
//!
//! Resolves aliases, checks every index against the register size, expands
//! SGMQ operand sets into per-qubit instructions within the same bundle,
//! enforces arities and bundle disjointness, and wraps any instructions
//! that appear before the first explicit sub-circuit header into an
//! implicit sub-circuit named `default`.

use std::collections::BTreeMap;

use crate::error::{Location, SemanticError};
use crate::ir::{
    Axis, Bundle, GateKind, GateParameter, Instruction, Operation, Program, SubCircuit,
};
use crate::parser::{Node, RawInstruction, RawOperand, RegisterKind, Spanned, SyntaxNode};

/// Instruction mnemonics that are not unitary gates.
pub const NON_GATE_MNEMONICS: &[&str] = &[
    "prep_x",
    "prep_y",
    "prep_z",
    "measure",
    "measure_x",
    "measure_y",
    "measure_z",
    "measure_all",
    "measure_parity",
    "not",
    "wait",
    "display",
    "reset_averaging",
];

/// Words an alias may not shadow: every mnemonic, the statement keywords
/// and the register names.
fn is_reserved(name: &str) -> bool {
    GateKind::from_mnemonic(name).is_some()
        || NON_GATE_MNEMONICS.contains(&name)
        || crate::lexer::KEYWORDS.contains(&name)
        || name == "q"
        || name == "b"
}

/// Split an optional `c-` prefix off a gate mnemonic.
///
/// Returns the base gate and whether the prefix was present. Only gates
/// accept the prefix; `c-measure` and friends are rejected.
pub fn resolve_control_prefix(mnemonic: &str) -> Result<(GateKind, bool), String> {
    if let Some(base) = mnemonic.strip_prefix("c-") {
        match GateKind::from_mnemonic(base) {
            Some(kind) => Ok((kind, true)),
            None if NON_GATE_MNEMONICS.contains(&base) => Err(format!(
                "the 'c-' prefix applies only to gates, not to '{base}'"
            )),
            None => Err(format!("unknown mnemonic '{mnemonic}'")),
        }
    } else {
        match GateKind::from_mnemonic(mnemonic) {
            Some(kind) => Ok((kind, false)),
            None => Err(format!("unknown mnemonic '{mnemonic}'")),
        }
    }
}

/// Check bundle-level parallelism rules: instructions must touch pairwise
/// disjoint qubit sets and write pairwise disjoint bit sets, and `display`
/// may not share a bundle with other instructions.
pub fn validate_bundle(bundle: &Bundle, qubit_count: usize) -> Result<(), String> {
    if bundle.instructions.len() > 1
        && bundle
            .instructions
            .iter()
            .any(|i| matches!(i.op, Operation::Display { .. }))
    {
        return Err("display cannot appear inside a multi-instruction bundle".into());
    }
    let mut qubits_seen = vec![false; qubit_count];
    let mut bits_seen = vec![false; qubit_count];
    for instr in &bundle.instructions {
        for q in instr.qubits_touched(qubit_count) {
            if qubits_seen[q] {
                return Err(format!(
                    "qubit {q} is used by more than one instruction in the bundle"
                ));
            }
            qubits_seen[q] = true;
        }
        for b in instr.bits_written(qubit_count) {
            if bits_seen[b] {
                return Err(format!(
                    "bit {b} is written by more than one instruction in the bundle"
                ));
            }
            bits_seen[b] = true;
        }
    }
    Ok(())
}

/// Analyse a parsed statement sequence into a validated program.
pub fn analyze(nodes: &[Node]) -> Result<Program, SemanticError> {
    let mut analyzer = Analyzer::new();
    for (index, node) in nodes.iter().enumerate() {
        analyzer.statement(index, node)?;
    }
    analyzer.finish()
}

/// A resolved operand, classified by what it denotes.
enum Resolved {
    Qubits(Vec<usize>),
    Bits(Vec<usize>),
    Axis(Axis),
    Int(i64),
    Real(f64),
}

struct Analyzer {
    qubit_count: Option<usize>,
    qubit_aliases: BTreeMap<String, usize>,
    bit_aliases: BTreeMap<String, usize>,
    finished: Vec<SubCircuit>,
    current: SubCircuit,
    current_is_implicit: bool,
}

fn err(loc: impl Into<Option<Location>>, message: impl Into<String>) -> SemanticError {
    SemanticError::new(loc, message)
}

impl Analyzer {
    fn new() -> Self {
        Analyzer {
            qubit_count: None,
            qubit_aliases: BTreeMap::new(),
            bit_aliases: BTreeMap::new(),
            finished: Vec::new(),
            current: SubCircuit {
                name: "default".into(),
                iterations: 1,
                bundles: Vec::new(),
            },
            current_is_implicit: true,
        }
    }

    fn require_qubits(&self, loc: Location, what: &str) -> Result<usize, SemanticError> {
        self.qubit_count
            .ok_or_else(|| err(loc, format!("{what} before the qubits declaration")))
    }

    fn statement(&mut self, index: usize, node: &Node) -> Result<(), SemanticError> {
        let loc = node.loc;
        match &node.node {
            SyntaxNode::Version { value } => {
                if index != 0 {
                    return Err(err(loc, "the version statement must come first"));
                }
                if *value != 1.0 {
                    return Err(err(loc, format!("unsupported version {value}")));
                }
                Ok(())
            }
            SyntaxNode::Qubits { count } => {
                if self.qubit_count.is_some() {
                    return Err(err(loc, "duplicate qubits declaration"));
                }
                if *count < 1 {
                    return Err(err(loc, "the qubit register needs at least one qubit"));
                }
                self.qubit_count = Some(*count as usize);
                Ok(())
            }
            SyntaxNode::Map { target, name } => {
                self.require_qubits(loc, "map")?;
                self.define_alias(target, name, loc)
            }
            SyntaxNode::SubCircuitHeader { name, iterations } => {
                self.require_qubits(loc, "sub-circuit")?;
                let iterations = match iterations {
                    None => 1,
                    Some(n) if *n >= 1 => *n as u64,
                    Some(n) => {
                        return Err(err(loc, format!("loop count must be at least 1, got {n}")))
                    }
                };
                self.open_subcircuit(name.clone(), iterations);
                Ok(())
            }
            SyntaxNode::Bundle { instructions } => {
                let n = self.require_qubits(loc, "instruction")?;
                let mut resolved = Vec::new();
                for raw in instructions {
                    resolved.extend(self.resolve_instruction(raw)?);
                }
                let bundle = Bundle {
                    instructions: resolved,
                };
                validate_bundle(&bundle, n).map_err(|m| err(loc, m))?;
                self.current.bundles.push(bundle);
                Ok(())
            }
        }
    }

    fn open_subcircuit(&mut self, name: String, iterations: u64) {
        // An implicit, still-empty `default` section is dropped when the
        // program opens its first real sub-circuit.
        if !self.current_is_implicit || !self.current.bundles.is_empty() {
            let done = std::mem::replace(
                &mut self.current,
                SubCircuit {
                    name: String::new(),
                    iterations: 1,
                    bundles: Vec::new(),
                },
            );
            self.finished.push(done);
        }
        self.current.name = name;
        self.current.iterations = iterations;
        self.current_is_implicit = false;
    }

    fn finish(mut self) -> Result<Program, SemanticError> {
        let qubit_count = self
            .qubit_count
            .ok_or_else(|| err(None, "missing qubits declaration"))?;
        if !self.current_is_implicit || !self.current.bundles.is_empty() || self.finished.is_empty()
        {
            self.finished.push(self.current);
        }
        Ok(Program {
            qubit_count,
            qubit_aliases: self.qubit_aliases,
            bit_aliases: self.bit_aliases,
            subcircuits: self.finished,
        })
    }

    fn define_alias(
        &mut self,
        target: &Spanned<RawOperand>,
        name: &str,
        loc: Location,
    ) -> Result<(), SemanticError> {
        let (register, index) = match &target.node {
            RawOperand::Indexed(reg, indices) => {
                if indices.len() != 1 {
                    return Err(err(
                        target.loc,
                        "map takes a single qubit or bit, not an index set",
                    ));
                }
                self.check_index(*reg, indices[0], target.loc)?;
                (*reg, indices[0])
            }
            RawOperand::Name(n) => match self.lookup_alias(n) {
                Some(pair) => pair,
                None => return Err(err(target.loc, format!("unknown name '{n}'"))),
            },
            _ => return Err(err(target.loc, "map target must be a qubit or a bit")),
        };
        if is_reserved(name) {
            return Err(err(
                loc,
                format!("'{name}' cannot be used as an alias: it is a reserved word"),
            ));
        }
        if self.qubit_aliases.contains_key(name) || self.bit_aliases.contains_key(name) {
            return Err(err(loc, format!("alias '{name}' is already defined")));
        }
        match register {
            RegisterKind::Qubit => self.qubit_aliases.insert(name.to_string(), index),
            RegisterKind::Bit => self.bit_aliases.insert(name.to_string(), index),
        };
        Ok(())
    }

    fn lookup_alias(&self, name: &str) -> Option<(RegisterKind, usize)> {
        if let Some(&i) = self.qubit_aliases.get(name) {
            Some((RegisterKind::Qubit, i))
        } else {
            self.bit_aliases
                .get(name)
                .map(|&i| (RegisterKind::Bit, i))
        }
    }

    fn check_index(
        &self,
        register: RegisterKind,
        index: usize,
        loc: Location,
    ) -> Result<(), SemanticError> {
        let n = self.qubit_count.expect("checked by caller");
        if index >= n {
            let what = match register {
                RegisterKind::Qubit => "qubit",
                RegisterKind::Bit => "bit",
            };
            return Err(err(
                loc,
                format!("{what} index {index} out of range (the register has {n} qubits)"),
            ));
        }
        Ok(())
    }

    fn resolve_operand(
        &self,
        operand: &Spanned<RawOperand>,
    ) -> Result<(Resolved, Location), SemanticError> {
        let loc = operand.loc;
        let resolved = match &operand.node {
            RawOperand::Indexed(reg, indices) => {
                for &i in indices {
                    self.check_index(*reg, i, loc)?;
                }
                match reg {
                    RegisterKind::Qubit => Resolved::Qubits(indices.clone()),
                    RegisterKind::Bit => Resolved::Bits(indices.clone()),
                }
            }
            RawOperand::Name(n) => match self.lookup_alias(n) {
                Some((RegisterKind::Qubit, i)) => Resolved::Qubits(vec![i]),
                Some((RegisterKind::Bit, i)) => Resolved::Bits(vec![i]),
                None => return Err(err(loc, format!("unknown name '{n}'"))),
            },
            RawOperand::Axis(a) => Resolved::Axis(*a),
            RawOperand::Int(v) => Resolved::Int(*v),
            RawOperand::Real(v) => Resolved::Real(*v),
        };
        Ok((resolved, loc))
    }

    fn resolve_instruction(
        &self,
        raw: &Spanned<RawInstruction>,
    ) -> Result<Vec<Instruction>, SemanticError> {
        let loc = raw.loc;
        let mnemonic = raw.node.mnemonic.as_str();
        let operands: Vec<(Resolved, Location)> = raw
            .node
            .operands
            .iter()
            .map(|op| self.resolve_operand(op))
            .collect::<Result<_, _>>()?;

        match mnemonic {
            "prep_x" => self.single_qubit_family(mnemonic, &operands, loc, |q| Operation::Prep {
                axis: Axis::X,
                qubit: q,
            }),
            "prep_y" => self.single_qubit_family(mnemonic, &operands, loc, |q| Operation::Prep {
                axis: Axis::Y,
                qubit: q,
            }),
            "prep_z" => self.single_qubit_family(mnemonic, &operands, loc, |q| Operation::Prep {
                axis: Axis::Z,
                qubit: q,
            }),
            "measure_x" => self.single_qubit_family(mnemonic, &operands, loc, |q| {
                Operation::Measure {
                    axis: Axis::X,
                    qubit: q,
                }
            }),
            "measure_y" => self.single_qubit_family(mnemonic, &operands, loc, |q| {
                Operation::Measure {
                    axis: Axis::Y,
                    qubit: q,
                }
            }),
            "measure" | "measure_z" => self.single_qubit_family(mnemonic, &operands, loc, |q| {
                Operation::Measure {
                    axis: Axis::Z,
                    qubit: q,
                }
            }),
            "measure_all" => {
                if !operands.is_empty() {
                    return Err(err(loc, "measure_all takes no operands"));
                }
                Ok(vec![Instruction::unconditional(Operation::MeasureAll)])
            }
            "measure_parity" => self.parity(&operands, loc),
            "not" => {
                let mut bits: Vec<usize> = Vec::new();
                if operands.is_empty() {
                    return Err(err(loc, "not needs at least one bit operand"));
                }
                for (r, oloc) in &operands {
                    match r {
                        Resolved::Bits(bs) => {
                            for &b in bs {
                                if !bits.contains(&b) {
                                    bits.push(b);
                                }
                            }
                        }
                        _ => return Err(err(*oloc, "not operates on bits such as b[0]")),
                    }
                }
                Ok(vec![Instruction::unconditional(Operation::Not { bits })])
            }
            "wait" => {
                let cycles = match operands.as_slice() {
                    [(Resolved::Int(v), oloc)] => {
                        if *v < 1 {
                            return Err(err(
                                *oloc,
                                format!("wait needs at least 1 cycle, got {v}"),
                            ));
                        }
                        *v as u64
                    }
                    _ => return Err(err(loc, "wait takes one integer cycle count")),
                };
                Ok(vec![Instruction::unconditional(Operation::Wait { cycles })])
            }
            "display" => {
                let bit = match operands.as_slice() {
                    [] => None,
                    [(Resolved::Bits(bs), _)] if bs.len() == 1 => Some(bs[0]),
                    _ => {
                        return Err(err(
                            loc,
                            "display takes no operand or a single bit such as b[0]",
                        ))
                    }
                };
                Ok(vec![Instruction::unconditional(Operation::Display { bit })])
            }
            "reset_averaging" => match operands.as_slice() {
                [] => Ok(vec![Instruction::unconditional(Operation::ResetAveraging {
                    qubits: vec![],
                })]),
                [(Resolved::Qubits(qs), _)] => Ok(qs
                    .iter()
                    .map(|&q| {
                        Instruction::unconditional(Operation::ResetAveraging { qubits: vec![q] })
                    })
                    .collect()),
                _ => Err(err(loc, "reset_averaging takes an optional qubit set")),
            },
            _ => self.gate(mnemonic, &operands, loc),
        }
    }

    /// Preparations and single-qubit measurements: one qubit operand which
    /// may be an SGMQ set, expanded to one instruction per qubit.
    fn single_qubit_family(
        &self,
        mnemonic: &str,
        operands: &[(Resolved, Location)],
        loc: Location,
        make: impl Fn(usize) -> Operation,
    ) -> Result<Vec<Instruction>, SemanticError> {
        match operands {
            [(Resolved::Qubits(qs), _)] => Ok(qs
                .iter()
                .map(|&q| Instruction::unconditional(make(q)))
                .collect()),
            _ => Err(err(
                loc,
                format!("{mnemonic} takes exactly one qubit operand"),
            )),
        }
    }

    fn parity(
        &self,
        operands: &[(Resolved, Location)],
        loc: Location,
    ) -> Result<Vec<Instruction>, SemanticError> {
        if operands.is_empty() || !operands.len().is_multiple_of(2) {
            return Err(err(
                loc,
                "measure_parity takes an even number of operands: qubit,axis pairs",
            ));
        }
        let mut pairs: Vec<(usize, Axis)> = Vec::new();
        for chunk in operands.chunks(2) {
            let qubit = match &chunk[0] {
                (Resolved::Qubits(qs), _) if qs.len() == 1 => qs[0],
                (_, oloc) => {
                    return Err(err(*oloc, "measure_parity pairs start with a single qubit"))
                }
            };
            let axis = match &chunk[1] {
                (Resolved::Axis(a), _) => *a,
                (_, oloc) => {
                    return Err(err(*oloc, "measure_parity pairs end with an axis: x, y or z"))
                }
            };
            if pairs.iter().any(|(q, _)| *q == qubit) {
                return Err(err(
                    loc,
                    format!("duplicate qubit {qubit} in parity measurement"),
                ));
            }
            pairs.push((qubit, axis));
        }
        Ok(vec![Instruction::unconditional(Operation::MeasureParity {
            pairs,
        })])
    }

    fn gate(
        &self,
        mnemonic: &str,
        operands: &[(Resolved, Location)],
        loc: Location,
    ) -> Result<Vec<Instruction>, SemanticError> {
        let (kind, controlled) =
            resolve_control_prefix(mnemonic).map_err(|m| err(loc, m))?;

        let mut rest = operands;
        let mut controls: Vec<usize> = Vec::new();
        if controlled {
            while let Some(((Resolved::Bits(bs), _), tail)) = rest.split_first() {
                for &b in bs {
                    if !controls.contains(&b) {
                        controls.push(b);
                    }
                }
                rest = tail;
            }
            if controls.is_empty() {
                return Err(err(
                    loc,
                    format!("'{mnemonic}' needs at least one control bit before the qubits"),
                ));
            }
        }

        let mut qubit_groups: Vec<(Vec<usize>, Location)> = Vec::new();
        let mut numbers: Vec<(Resolved, Location)> = Vec::new();
        for (r, oloc) in rest {
            match r {
                Resolved::Qubits(qs) => {
                    if !numbers.is_empty() {
                        return Err(err(*oloc, "gate parameters come after the qubit operands"));
                    }
                    qubit_groups.push((qs.clone(), *oloc));
                }
                Resolved::Int(v) => numbers.push((Resolved::Int(*v), *oloc)),
                Resolved::Real(v) => numbers.push((Resolved::Real(*v), *oloc)),
                Resolved::Bits(_) => {
                    return Err(err(
                        *oloc,
                        format!("'{}' operates on qubits, not bits", kind.mnemonic()),
                    ))
                }
                Resolved::Axis(_) => {
                    return Err(err(*oloc, "unexpected axis operand"));
                }
            }
        }

        let (angle, k) = match kind.parameter() {
            GateParameter::None => {
                if let Some((_, oloc)) = numbers.first() {
                    return Err(err(
                        *oloc,
                        format!("'{}' takes no numeric parameter", kind.mnemonic()),
                    ));
                }
                (None, None)
            }
            GateParameter::Angle => match numbers.as_slice() {
                [(Resolved::Real(v), _)] => (Some(*v), None),
                [(Resolved::Int(v), _)] => (Some(*v as f64), None),
                _ => {
                    return Err(err(
                        loc,
                        format!("'{}' takes one angle in radians", kind.mnemonic()),
                    ))
                }
            },
            GateParameter::PhaseExponent => match numbers.as_slice() {
                [(Resolved::Int(v), oloc)] => {
                    if *v < 1 {
                        return Err(err(
                            *oloc,
                            format!("the phase exponent k must be at least 1, got {v}"),
                        ));
                    }
                    let k = u32::try_from(*v)
                        .map_err(|_| err(*oloc, format!("phase exponent {v} out of range")))?;
                    (None, Some(k))
                }
                _ => {
                    return Err(err(
                        loc,
                        format!("'{}' takes one integer exponent k", kind.mnemonic()),
                    ))
                }
            },
        };

        let arity = kind.arity();
        if arity == 1 {
            match qubit_groups.as_slice() {
                [(qs, _)] => Ok(qs
                    .iter()
                    .map(|&q| Instruction {
                        controls: controls.clone(),
                        op: Operation::Gate {
                            kind,
                            qubits: vec![q],
                            angle,
                            k,
                        },
                    })
                    .collect()),
                _ => Err(err(
                    loc,
                    format!("'{}' takes exactly one qubit operand", kind.mnemonic()),
                )),
            }
        } else {
            if qubit_groups.len() != arity {
                return Err(err(
                    loc,
                    format!(
                        "'{}' takes exactly {arity} qubit operands, got {}",
                        kind.mnemonic(),
                        qubit_groups.len()
                    ),
                ));
            }
            let mut qubits = Vec::with_capacity(arity);
            for (group, gloc) in &qubit_groups {
                if group.len() != 1 {
                    return Err(err(
                        *gloc,
                        "SGMQ index sets cannot be used with multi-qubit gates",
                    ));
                }
                if qubits.contains(&group[0]) {
                    return Err(err(
                        *gloc,
                        format!("duplicate qubit operand {}", group[0]),
                    ));
                }
                qubits.push(group[0]);
            }
            Ok(vec![Instruction {
                controls,
                op: Operation::Gate {
                    kind,
                    qubits,
                    angle,
                    k,
                },
            }])
        }
    }
}
