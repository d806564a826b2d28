//! Recursive-descent parser for the formula language.
//!
//! ```text
//! expr    := conj ( 'until' '[' NUMBER ',' NUMBER ']' conj )?
//! conj    := primary ( 'and' primary )*
//! primary := '(' expr ')' | atom | NAME
//! atom    := signal ( '<' | '>' ) NUMBER
//! signal  := IDENT | '|' IDENT '|' | '||' IDENT '||'
//! ```
//!
//! `NAME` refers to a previously defined formula and is substituted in
//! place, so the resulting AST never contains references.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use super::formula::{Comparator, Formula, Signal};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at byte {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected {found}, expected {expected}")]
    Unexpected {
        found: String,
        expected: &'static str,
    },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("unknown signal dimension {0:?}")]
    UnknownSignal(String),
    #[error("unknown formula name {0:?}")]
    UnknownName(String),
    #[error("time bounds must satisfy 0 <= lower <= upper, got [{lower}, {upper}]")]
    BadBounds { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Lt,
    Gt,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bar,
    DoubleBar,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => alloc::format!("{s:?}"),
            Tok::Number(n) => n.to_string(),
            Tok::Lt => "'<'".into(),
            Tok::Gt => "'>'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Bar => "'|'".into(),
            Tok::DoubleBar => "'||'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'<' => Some(Tok::Lt),
            b'>' => Some(Tok::Gt),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            b'|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    i += 2;
                    out.push((Tok::DoubleBar, start));
                    continue;
                }
                Some(Tok::Bar)
            }
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, start));
            i += 1;
            continue;
        }
        let starts_number = c.is_ascii_digit()
            || c == b'.'
            || ((c == b'-' || c == b'+')
                && bytes
                    .get(i + 1)
                    .is_some_and(|d| d.is_ascii_digit() || *d == b'.'));
        if starts_number {
            i += 1;
            while i < bytes.len() {
                let d = bytes[i];
                let exp_sign = (d == b'-' || d == b'+') && matches!(bytes[i - 1], b'e' | b'E');
                if d.is_ascii_digit() || d == b'.' || d == b'e' || d == b'E' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(lit.into()),
                position: start,
            })?;
            if !value.is_finite() {
                return Err(ParseError {
                    kind: ParseErrorKind::BadNumber(lit.into()),
                    position: start,
                });
            }
            out.push((Tok::Number(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].into()), start));
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('\0');
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedChar(ch),
            position: start,
        });
    }
    Ok(out)
}

struct Parser<'a, F> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    lookup: &'a F,
}

impl<F: Fn(&str) -> Option<Formula>> Parser<'_, F> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            kind,
            position: self.offset(),
        })
    }

    fn unexpected<T>(&self, expected: &'static str) -> Result<T, ParseError> {
        match self.peek() {
            Some(tok) => self.err(ParseErrorKind::Unexpected {
                found: tok.describe(),
                expected,
            }),
            None => self.err(ParseErrorKind::UnexpectedEnd(expected)),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(expected)
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        match self.peek() {
            Some(Tok::Number(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == word)
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        let left = self.conj()?;
        if !self.is_keyword("until") {
            return Ok(left);
        }
        self.pos += 1;
        let bounds_at = self.offset();
        self.expect(Tok::LBracket, "'['")?;
        let lower = self.number()?;
        self.expect(Tok::Comma, "','")?;
        let upper = self.number()?;
        self.expect(Tok::RBracket, "']'")?;
        if !(lower >= 0.0 && lower <= upper) {
            return Err(ParseError {
                kind: ParseErrorKind::BadBounds { lower, upper },
                position: bounds_at,
            });
        }
        let right = self.conj()?;
        Ok(Formula::UntilBounded {
            left: Box::new(left),
            lower,
            upper,
            right: Box::new(right),
        })
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = Vec::new();
        parts.push(self.primary()?);
        while self.is_keyword("and") {
            self.pos += 1;
            parts.push(self.primary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Conjunction(parts)
        })
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Bar) | Some(Tok::DoubleBar) => {
                let signal = self.barred_signal()?;
                self.atom_tail(signal)
            }
            Some(Tok::Ident(name)) if name != "and" && name != "until" => {
                let name = name.clone();
                let at = self.offset();
                self.pos += 1;
                if matches!(self.peek(), Some(Tok::Lt) | Some(Tok::Gt)) {
                    match Signal::from_ident(&name) {
                        Some(signal) => self.atom_tail(signal),
                        None => Err(ParseError {
                            kind: ParseErrorKind::UnknownSignal(name),
                            position: at,
                        }),
                    }
                } else {
                    (self.lookup)(&name).ok_or(ParseError {
                        kind: ParseErrorKind::UnknownName(name),
                        position: at,
                    })
                }
            }
            _ => self.unexpected("an atom, a name or '('"),
        }
    }

    fn barred_signal(&mut self) -> Result<Signal, ParseError> {
        let at = self.offset();
        let double = self.peek() == Some(&Tok::DoubleBar);
        self.pos += 1;
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return self.unexpected("a signal name"),
        };
        self.pos += 1;
        if double {
            self.expect(Tok::DoubleBar, "'||'")?;
        } else {
            self.expect(Tok::Bar, "'|'")?;
        }
        match (double, name.as_str()) {
            (true, "v") => Ok(Signal::Speed),
            (false, "phi") => Ok(Signal::AbsPhi),
            _ => {
                let shown = if double {
                    alloc::format!("||{name}||")
                } else {
                    alloc::format!("|{name}|")
                };
                Err(ParseError {
                    kind: ParseErrorKind::UnknownSignal(shown),
                    position: at,
                })
            }
        }
    }

    fn atom_tail(&mut self, signal: Signal) -> Result<Formula, ParseError> {
        let comparator = match self.peek() {
            Some(Tok::Lt) => Comparator::Less,
            Some(Tok::Gt) => Comparator::Greater,
            _ => return self.unexpected("'<' or '>'"),
        };
        self.pos += 1;
        let constant = self.number()?;
        Ok(Formula::Atomic {
            signal,
            comparator,
            constant,
        })
    }
}

/// Parses a standalone formula; names are rejected.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &|_: &str| None)
}

/// Parses a formula, resolving bare names through `lookup`.
pub fn parse_formula_with<F>(text: &str, lookup: &F) -> Result<Formula, ParseError>
where
    F: Fn(&str) -> Option<Formula>,
{
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        lookup,
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return p.unexpected("end of input");
    }
    Ok(f)
}
