use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use super::formula::{Formula, Signal};
use super::parse::{parse_formula_with, ParseError};

/// The landing task's default specification file.
pub const TABLE1_SPEC: &str = include_str!("../../assets/table1.stl");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFileError {
    #[error("line {line}: expected `name := formula`")]
    MissingAssign { line: usize },
    #[error("line {line}: invalid formula name {name:?}")]
    BadName { line: usize, name: String },
    #[error("line {line}: {name:?} is already defined")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
}

/// Named formulas in definition order.
///
/// The text format is one definition per line, `name := expr`, with `#`
/// starting a comment. A definition may refer to any name defined on an
/// earlier line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpecSet {
    entries: Vec<(String, Formula)>,
}

impl SpecSet {
    pub fn parse(text: &str) -> Result<Self, SpecFileError> {
        let mut set = SpecSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (name, body) = content
                .split_once(":=")
                .ok_or(SpecFileError::MissingAssign { line })?;
            let name = name.trim();
            if !valid_name(name) {
                return Err(SpecFileError::BadName {
                    line,
                    name: name.into(),
                });
            }
            if set.get(name).is_some() {
                return Err(SpecFileError::Duplicate {
                    line,
                    name: name.into(),
                });
            }
            let lookup = |n: &str| set.get(n).cloned();
            let formula = parse_formula_with(body, &lookup).map_err(|mut source| {
                source.position += content.len() - body.len();
                SpecFileError::Parse { line, source }
            })?;
            set.entries.push((name.into(), formula));
        }
        Ok(set)
    }

    pub fn table1() -> Self {
        Self::parse(TABLE1_SPEC).expect("bundled specification parses")
    }

    pub fn get(&self, name: &str) -> Option<&Formula> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|(n, f)| (n.as_str(), f))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds or replaces a definition.
    pub fn insert(&mut self, name: impl Into<String>, formula: Formula) {
        let name = name.into();
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = formula,
            None => self.entries.push((name, formula)),
        }
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "and"
        && name != "until"
        && Signal::from_ident(name).is_none()
}

/// Writes every definition fully expanded, one per line.
impl fmt::Display for SpecSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, formula) in &self.entries {
            writeln!(f, "{name} := {formula}")?;
        }
        Ok(())
    }
}
