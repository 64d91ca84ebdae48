//! Tokenizer for cQASM source text.
//!
//! The language is not case-sensitive: every alphabetic lexeme is folded to
//! lower case here, so later stages only ever see lower-case identifiers.
//! Comments run from `#` to the end of the line and produce no tokens.
//! Newlines are significant (they terminate statements) and are emitted as
//! tokens of their own.

use crate::error::{LexError, Location};

/// Statement-level reserved words. Gate and measurement mnemonics are plain
/// identifiers; they are classified during semantic analysis so that alias
/// names can be checked against the full mnemonic table in one place.
pub const KEYWORDS: &[&str] = &["version", "qubits", "map"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Ident,
    Int,
    Real,
    Punct,
    Newline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub fn location(&self) -> Location {
        Location::new(self.line, self.column)
    }
}

/// Punctuation accepted by the grammar.
const PUNCT: &[char] = &['{', '}', '|', ',', ':', '.', '[', ']', '(', ')'];

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Scanner<'a> {
    fn new(source: &'a str) -> Self {
        Scanner {
            chars: source.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn location(&self) -> Location {
        Location::new(self.line, self.column)
    }

    fn error(&self, loc: Location, message: impl Into<String>) -> LexError {
        LexError {
            location: loc,
            message: message.into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenize a source file. Total on any input string: returns either the
/// token sequence or a `LexError` with the offending position; never panics.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut s = Scanner::new(source);
    let mut tokens = Vec::new();

    while let Some(c) = s.peek() {
        let start = s.location();
        match c {
            '\n' => {
                s.bump();
                tokens.push(Token {
                    kind: TokenKind::Newline,
                    lexeme: "\n".into(),
                    line: start.line,
                    column: start.column,
                });
            }
            ' ' | '\t' | '\r' => {
                s.bump();
            }
            '#' => {
                // Comment to end of line; content is unrestricted.
                while let Some(c) = s.peek() {
                    if c == '\n' {
                        break;
                    }
                    s.bump();
                }
            }
            c if is_ident_start(c) => {
                let word = scan_word(&mut s);
                let kind = if KEYWORDS.contains(&word.as_str()) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Ident
                };
                tokens.push(Token {
                    kind,
                    lexeme: word,
                    line: start.line,
                    column: start.column,
                });
            }
            c if c.is_ascii_digit() => {
                tokens.push(scan_number(&mut s, start, String::new())?);
            }
            '-' | '+' => {
                s.bump();
                match s.peek() {
                    Some(c2) if c2.is_ascii_digit() || c2 == '.' => {
                        let sign = if c == '-' { "-".to_string() } else { String::new() };
                        tokens.push(scan_number(&mut s, start, sign)?);
                    }
                    _ => return Err(s.error(start, format!("unexpected '{c}'"))),
                }
            }
            '.' => {
                s.bump();
                // A dot directly followed by a digit is a real literal such
                // as `.5`; otherwise it is the sub-circuit punctuation.
                match s.peek() {
                    Some(c2) if c2.is_ascii_digit() => {
                        let mut lexeme = ".".to_string();
                        while let Some(c2) = s.peek() {
                            if !c2.is_ascii_digit() {
                                break;
                            }
                            lexeme.push(c2);
                            s.bump();
                        }
                        tokens.push(make_real(&s, start, lexeme)?);
                    }
                    _ => tokens.push(Token {
                        kind: TokenKind::Punct,
                        lexeme: ".".into(),
                        line: start.line,
                        column: start.column,
                    }),
                }
            }
            c if PUNCT.contains(&c) => {
                s.bump();
                tokens.push(Token {
                    kind: TokenKind::Punct,
                    lexeme: c.to_string(),
                    line: start.line,
                    column: start.column,
                });
            }
            c => {
                return Err(s.error(start, format!("character '{c}' is not part of the language")));
            }
        }
    }
    Ok(tokens)
}

/// Scan an identifier. A `-` is folded into the identifier when it joins two
/// letter sequences, which is how hyphenated mnemonics like `c-x` lex as a
/// single token.
fn scan_word(s: &mut Scanner) -> String {
    let mut word = String::new();
    while let Some(c) = s.peek() {
        if is_ident_continue(c) {
            word.extend(c.to_lowercase());
            s.bump();
        } else if c == '-' {
            let mut ahead = s.chars.clone();
            ahead.next();
            match ahead.next() {
                Some(c2) if is_ident_start(c2) => {
                    word.push('-');
                    s.bump();
                }
                _ => break,
            }
        } else {
            break;
        }
    }
    word
}

fn scan_number(s: &mut Scanner, start: Location, sign: String) -> Result<Token, LexError> {
    let mut lexeme = sign;
    while let Some(c) = s.peek() {
        if !c.is_ascii_digit() {
            break;
        }
        lexeme.push(c);
        s.bump();
    }
    if s.peek() == Some('.') {
        lexeme.push('.');
        s.bump();
        while let Some(c) = s.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            lexeme.push(c);
            s.bump();
        }
        if lexeme.ends_with('.') && !lexeme[..lexeme.len() - 1].chars().any(|c| c.is_ascii_digit())
        {
            return Err(s.error(start, "malformed number"));
        }
        make_real(s, start, lexeme)
    } else if lexeme.chars().any(|c| c.is_ascii_digit()) {
        Ok(Token {
            kind: TokenKind::Int,
            lexeme,
            line: start.line,
            column: start.column,
        })
    } else {
        Err(s.error(start, "malformed number"))
    }
}

fn make_real(s: &Scanner, start: Location, lexeme: String) -> Result<Token, LexError> {
    match lexeme.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Token {
            kind: TokenKind::Real,
            lexeme,
            line: start.line,
            column: start.column,
        }),
        _ => Err(s.error(start, format!("real literal '{lexeme}' is out of range"))),
    }
}
