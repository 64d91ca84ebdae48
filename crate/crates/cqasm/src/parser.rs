//! Recursive-descent parser: token stream to unresolved syntax tree.
//!
//! The tree keeps mnemonics and operands verbatim (post case-folding);
//! name resolution, range checks and SGMQ expansion happen in `analyze`.
//! Every node carries the location of its first token for diagnostics.

use std::fmt;

use crate::error::{Location, ParseError};
use crate::ir::Axis;
use crate::lexer::{tokenize, Token, TokenKind};

/// A syntax element paired with its source location. Equality ignores the
/// location: two trees are equal when they have the same structure.
#[derive(Debug, Clone)]
pub struct Spanned<T> {
    pub node: T,
    pub loc: Location,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl<T> Spanned<T> {
    pub fn new(node: T, loc: Location) -> Self {
        Spanned { node, loc }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterKind {
    Qubit,
    Bit,
}

impl RegisterKind {
    pub fn letter(self) -> char {
        match self {
            RegisterKind::Qubit => 'q',
            RegisterKind::Bit => 'b',
        }
    }
}

/// One operand as written, before name resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum RawOperand {
    /// `q[...]` or `b[...]` with the index expression already expanded.
    Indexed(RegisterKind, Vec<usize>),
    /// An alias reference.
    Name(String),
    /// A bare `x`, `y` or `z` (only meaningful in parity measurements).
    Axis(Axis),
    Int(i64),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawInstruction {
    pub mnemonic: String,
    pub operands: Vec<Spanned<RawOperand>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SyntaxNode {
    Version { value: f64 },
    Qubits { count: i64 },
    Map { target: Spanned<RawOperand>, name: String },
    SubCircuitHeader { name: String, iterations: Option<i64> },
    Bundle { instructions: Vec<Spanned<RawInstruction>> },
}

pub type Node = Spanned<SyntaxNode>;

/// Expand a bracketed index expression: single indices, comma lists, and
/// inclusive `i:j` ranges, in any mixture. Duplicates are dropped while the
/// first-occurrence order is preserved.
pub fn parse_index_expression(raw: &str) -> Result<Vec<usize>, ParseError> {
    let tokens = tokenize(raw).map_err(|e| ParseError {
        location: e.location,
        message: e.message,
    })?;
    let mut cursor = Cursor::new(&tokens);
    let indices = cursor.index_list(Location::new(1, 1))?;
    if let Some(t) = cursor.peek() {
        return Err(cursor.unexpected(t, "end of index expression"));
    }
    Ok(indices)
}

/// Parse a token stream into the statement sequence.
pub fn parse(tokens: &[Token]) -> Result<Vec<Node>, ParseError> {
    Cursor::new(tokens).program()
}

/// Convenience: tokenize and parse in one step.
pub fn parse_source(source: &str) -> Result<Vec<Node>, ParseError> {
    let tokens = tokenize(source).map_err(|e| ParseError {
        location: e.location,
        message: e.message,
    })?;
    parse(&tokens)
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token]) -> Self {
        Cursor { tokens, pos: 0 }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_location(&self) -> Location {
        self.tokens
            .last()
            .map(|t| Location::new(t.line, t.column + t.lexeme.chars().count() as u32))
            .unwrap_or_else(|| Location::new(1, 1))
    }

    fn error(&self, loc: Location, message: impl Into<String>) -> ParseError {
        ParseError {
            location: loc,
            message: message.into(),
        }
    }

    fn unexpected(&self, token: &Token, wanted: &str) -> ParseError {
        let shown = if token.kind == TokenKind::Newline {
            "end of line".to_string()
        } else {
            format!("'{}'", token.lexeme)
        };
        self.error(token.location(), format!("expected {wanted}, found {shown}"))
    }

    fn expect_punct(&mut self, p: char, wanted: &str) -> Result<&'a Token, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Punct && t.lexeme == p.to_string() => {
                Ok(self.bump().unwrap())
            }
            Some(t) => Err(self.unexpected(t, wanted)),
            None => Err(self.error(self.eof_location(), format!("expected {wanted}"))),
        }
    }

    fn at_punct(&self, p: char) -> bool {
        matches!(self.peek(), Some(t) if t.kind == TokenKind::Punct && t.lexeme == p.to_string())
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), Some(t) if t.kind == TokenKind::Newline) {
            self.bump();
        }
    }

    fn program(&mut self) -> Result<Vec<Node>, ParseError> {
        let mut nodes = Vec::new();
        loop {
            self.skip_newlines();
            let Some(token) = self.peek() else { break };
            let node = self.statement(token)?;
            nodes.push(node);
            // Statements end at a line break (or the end of input).
            match self.peek() {
                None => {}
                Some(t) if t.kind == TokenKind::Newline => {
                    self.bump();
                }
                Some(t) => return Err(self.unexpected(t, "end of statement")),
            }
        }
        Ok(nodes)
    }

    fn statement(&mut self, first: &'a Token) -> Result<Node, ParseError> {
        let loc = first.location();
        match (first.kind, first.lexeme.as_str()) {
            (TokenKind::Keyword, "version") => {
                self.bump();
                let value = match self.peek() {
                    Some(t) if t.kind == TokenKind::Real => {
                        let v = t.lexeme.parse::<f64>().expect("lexer checked");
                        self.bump();
                        v
                    }
                    Some(t) => return Err(self.unexpected(t, "a version number such as 1.0")),
                    None => {
                        return Err(self.error(self.eof_location(), "expected a version number"))
                    }
                };
                Ok(Spanned::new(SyntaxNode::Version { value }, loc))
            }
            (TokenKind::Keyword, "qubits") => {
                self.bump();
                let count = self.integer("the register size")?;
                Ok(Spanned::new(SyntaxNode::Qubits { count }, loc))
            }
            (TokenKind::Keyword, "map") => {
                self.bump();
                let target = self.operand()?;
                self.expect_punct(',', "',' between the map target and its name")?;
                let name = self.identifier("an alias name")?;
                Ok(Spanned::new(SyntaxNode::Map { target, name }, loc))
            }
            (TokenKind::Punct, ".") => {
                self.bump();
                let name = self.identifier("a sub-circuit name")?;
                let iterations = if self.at_punct('(') {
                    self.bump();
                    let n = self.integer("an iteration count")?;
                    self.expect_punct(')', "')' after the iteration count")?;
                    Some(n)
                } else {
                    None
                };
                Ok(Spanned::new(
                    SyntaxNode::SubCircuitHeader { name, iterations },
                    loc,
                ))
            }
            (TokenKind::Punct, "{") => {
                self.bump();
                let mut instructions = Vec::new();
                loop {
                    self.skip_newlines();
                    match self.peek() {
                        Some(t) if t.kind == TokenKind::Ident => {
                            instructions.push(self.instruction()?);
                        }
                        Some(t) => return Err(self.unexpected(t, "an instruction")),
                        None => return Err(self.error(loc, "unclosed '{' in bundle")),
                    }
                    self.skip_newlines();
                    match self.peek() {
                        Some(t) if t.kind == TokenKind::Punct && t.lexeme == "|" => {
                            self.bump();
                        }
                        Some(t) if t.kind == TokenKind::Punct && t.lexeme == "}" => {
                            self.bump();
                            break;
                        }
                        Some(t) => return Err(self.unexpected(t, "'|' or '}'")),
                        None => return Err(self.error(loc, "unclosed '{' in bundle")),
                    }
                }
                Ok(Spanned::new(SyntaxNode::Bundle { instructions }, loc))
            }
            (TokenKind::Ident, _) => {
                let instr = self.instruction()?;
                Ok(Spanned::new(
                    SyntaxNode::Bundle {
                        instructions: vec![instr],
                    },
                    loc,
                ))
            }
            _ => Err(self.unexpected(first, "a statement")),
        }
    }

    fn instruction(&mut self) -> Result<Spanned<RawInstruction>, ParseError> {
        let head = self.bump().expect("caller checked");
        debug_assert_eq!(head.kind, TokenKind::Ident);
        let loc = head.location();
        let mnemonic = head.lexeme.clone();
        let mut operands = Vec::new();

        if self.starts_operand() {
            operands.push(self.operand()?);
            loop {
                if self.at_punct(',') {
                    self.bump();
                    operands.push(self.operand()?);
                } else if matches!(self.peek(),
                    Some(t) if t.kind == TokenKind::Int || t.kind == TokenKind::Real)
                {
                    // Trailing numeric parameters may be separated by
                    // whitespace alone: `rx q[0] 3.14`.
                    operands.push(self.operand()?);
                } else {
                    break;
                }
            }
        }
        Ok(Spanned::new(RawInstruction { mnemonic, operands }, loc))
    }

    fn starts_operand(&self) -> bool {
        matches!(
            self.peek(),
            Some(t) if matches!(t.kind, TokenKind::Ident | TokenKind::Int | TokenKind::Real)
        )
    }

    fn operand(&mut self) -> Result<Spanned<RawOperand>, ParseError> {
        let Some(token) = self.peek() else {
            return Err(self.error(self.eof_location(), "expected an operand"));
        };
        let loc = token.location();
        match token.kind {
            TokenKind::Int => {
                let v = token
                    .lexeme
                    .parse::<i64>()
                    .map_err(|_| self.error(loc, "integer literal out of range"))?;
                self.bump();
                Ok(Spanned::new(RawOperand::Int(v), loc))
            }
            TokenKind::Real => {
                let v = token.lexeme.parse::<f64>().expect("lexer checked");
                self.bump();
                Ok(Spanned::new(RawOperand::Real(v), loc))
            }
            TokenKind::Ident => {
                let name = token.lexeme.clone();
                self.bump();
                if self.at_punct('[') {
                    let register = match name.as_str() {
                        "q" => RegisterKind::Qubit,
                        "b" => RegisterKind::Bit,
                        _ => {
                            return Err(self.error(
                                loc,
                                format!("only the registers 'q' and 'b' can be indexed, not '{name}'"),
                            ))
                        }
                    };
                    self.bump();
                    let indices = self.index_list(loc)?;
                    self.expect_punct(']', "']' closing the index expression")?;
                    Ok(Spanned::new(RawOperand::Indexed(register, indices), loc))
                } else if name == "q" || name == "b" {
                    Err(self.error(loc, format!("expected '[' after register '{name}'")))
                } else {
                    match name.as_str() {
                        "x" => Ok(Spanned::new(RawOperand::Axis(Axis::X), loc)),
                        "y" => Ok(Spanned::new(RawOperand::Axis(Axis::Y), loc)),
                        "z" => Ok(Spanned::new(RawOperand::Axis(Axis::Z), loc)),
                        _ => Ok(Spanned::new(RawOperand::Name(name), loc)),
                    }
                }
            }
            _ => Err(self.unexpected(token, "an operand")),
        }
    }

    /// The contents of an index expression, up to but not including `]`.
    fn index_list(&mut self, open: Location) -> Result<Vec<usize>, ParseError> {
        let mut indices: Vec<usize> = Vec::new();
        let mut push = |i: usize| {
            if !indices.contains(&i) {
                indices.push(i);
            }
        };
        loop {
            let lo = self.index_value()?;
            if self.at_punct(':') {
                self.bump();
                let hi = self.index_value()?;
                if hi < lo {
                    return Err(self.error(
                        open,
                        format!("descending range {lo}:{hi} in index expression"),
                    ));
                }
                for i in lo..=hi {
                    push(i);
                }
            } else {
                push(lo);
            }
            if self.at_punct(',') {
                self.bump();
            } else {
                break;
            }
        }
        Ok(indices)
    }

    fn index_value(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Int => {
                let loc = t.location();
                let v = t
                    .lexeme
                    .parse::<i64>()
                    .map_err(|_| self.error(loc, "index out of range"))?;
                if v < 0 {
                    return Err(self.error(loc, format!("negative index {v}")));
                }
                self.bump();
                Ok(v as usize)
            }
            Some(t) => Err(self.unexpected(t, "an index")),
            None => Err(self.error(self.eof_location(), "expected an index")),
        }
    }

    fn integer(&mut self, wanted: &str) -> Result<i64, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Int => {
                let loc = t.location();
                let v = t
                    .lexeme
                    .parse::<i64>()
                    .map_err(|_| self.error(loc, "integer literal out of range"))?;
                self.bump();
                Ok(v)
            }
            Some(t) => Err(self.unexpected(t, wanted)),
            None => Err(self.error(self.eof_location(), format!("expected {wanted}"))),
        }
    }

    fn identifier(&mut self, wanted: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                let name = t.lexeme.clone();
                self.bump();
                Ok(name)
            }
            Some(t) => Err(self.unexpected(t, wanted)),
            None => Err(self.error(self.eof_location(), format!("expected {wanted}"))),
        }
    }
}

/// Format a real so that it lexes back to the same value: plain decimal
/// notation, always with a decimal point, never an exponent.
pub fn format_real(value: f64) -> String {
    let s = format!("{value}");
    if let Some(epos) = s.find(['e', 'E']) {
        let (mantissa, exp) = s.split_at(epos);
        let exp: i32 = exp[1..].parse().expect("float exponent");
        let (sign, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => ("-", rest),
            None => ("", mantissa),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i.to_string(), f.to_string()),
            None => (digits.to_string(), String::new()),
        };
        let digits: String = format!("{int_part}{frac_part}");
        let point = int_part.len() as i32 + exp;
        let mut out = String::from(sign);
        if point <= 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-point) as usize));
            out.push_str(&digits);
        } else if (point as usize) >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', point as usize - digits.len()));
            out.push_str(".0");
        } else {
            out.push_str(&digits[..point as usize]);
            out.push('.');
            out.push_str(&digits[point as usize..]);
        }
        out
    } else if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for RawOperand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawOperand::Indexed(reg, indices) => {
                write!(f, "{}[", reg.letter())?;
                for (i, idx) in indices.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{idx}")?;
                }
                write!(f, "]")
            }
            RawOperand::Name(n) => write!(f, "{n}"),
            RawOperand::Axis(a) => write!(f, "{a}"),
            RawOperand::Int(v) => write!(f, "{v}"),
            RawOperand::Real(v) => write!(f, "{}", format_real(*v)),
        }
    }
}

impl fmt::Display for RawInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mnemonic)?;
        for (i, op) in self.operands.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { " " } else { "," }, op.node)?;
        }
        Ok(())
    }
}

impl fmt::Display for SyntaxNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxNode::Version { value } => write!(f, "version {}", format_real(*value)),
            SyntaxNode::Qubits { count } => write!(f, "qubits {count}"),
            SyntaxNode::Map { target, name } => write!(f, "map {},{name}", target.node),
            SyntaxNode::SubCircuitHeader { name, iterations } => match iterations {
                Some(n) => write!(f, ".{name}({n})"),
                None => write!(f, ".{name}"),
            },
            SyntaxNode::Bundle { instructions } => {
                if instructions.len() == 1 {
                    write!(f, "{}", instructions[0].node)
                } else {
                    write!(f, "{{ ")?;
                    for (i, instr) in instructions.iter().enumerate() {
                        if i > 0 {
                            write!(f, " | ")?;
                        }
                        write!(f, "{}", instr.node)?;
                    }
                    write!(f, " }}")
                }
            }
        }
    }
}

/// Pretty-print a statement sequence, one statement per line. Parsing the
/// result yields a structurally identical tree.
pub fn render(nodes: &[Node]) -> String {
    let mut out = String::new();
    for node in nodes {
        out.push_str(&node.node.to_string());
        out.push('\n');
    }
    out
}
