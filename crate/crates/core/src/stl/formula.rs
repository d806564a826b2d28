use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Signal dimensions an atom can constrain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signal {
    /// Left edge.
    X,
    /// Right edge (`x` plus footprint width).
    XRight,
    /// Bottom edge.
    Y,
    /// Top edge (`y` plus footprint height).
    YTop,
    /// Velocity magnitude, written `||v||`.
    Speed,
    Phi,
    /// Absolute rotation, written `|phi|`.
    AbsPhi,
}

impl Signal {
    pub const ALL: [Signal; 7] = [
        Signal::X,
        Signal::XRight,
        Signal::Y,
        Signal::YTop,
        Signal::Speed,
        Signal::Phi,
        Signal::AbsPhi,
    ];

    /// Canonical spelling used by the printer.
    pub fn as_str(self) -> &'static str {
        match self {
            Signal::X => "x",
            Signal::XRight => "x_right",
            Signal::Y => "y",
            Signal::YTop => "y_top",
            Signal::Speed => "||v||",
            Signal::Phi => "phi",
            Signal::AbsPhi => "|phi|",
        }
    }

    /// Looks up a bare identifier (no bars).
    pub fn from_ident(ident: &str) -> Option<Signal> {
        Some(match ident {
            "x" => Signal::X,
            "x_right" => Signal::XRight,
            "y" => Signal::Y,
            "y_top" => Signal::YTop,
            "speed" => Signal::Speed,
            "phi" => Signal::Phi,
            "abs_phi" => Signal::AbsPhi,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    Less,
    Greater,
}

impl Comparator {
    pub fn as_str(self) -> &'static str {
        match self {
            Comparator::Less => "<",
            Comparator::Greater => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Formula {
    Atomic {
        signal: Signal,
        comparator: Comparator,
        constant: f64,
    },
    Conjunction(Vec<Formula>),
    UntilBounded {
        left: Box<Formula>,
        lower: f64,
        upper: f64,
        right: Box<Formula>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaError {
    #[error("conjunction needs at least two operands, got {0}")]
    ShortConjunction(usize),
    #[error("until bounds must satisfy 0 <= lower <= upper, got [{lower}, {upper}]")]
    BadBounds { lower: f64, upper: f64 },
    #[error("constant {0} is not finite")]
    NonFinite(f64),
}

impl Formula {
    pub fn atom(signal: Signal, comparator: Comparator, constant: f64) -> Self {
        Formula::Atomic {
            signal,
            comparator,
            constant,
        }
    }

    pub fn and(children: Vec<Formula>) -> Result<Self, FormulaError> {
        let f = Formula::Conjunction(children);
        f.validate()?;
        Ok(f)
    }

    pub fn until(
        left: Formula,
        lower: f64,
        upper: f64,
        right: Formula,
    ) -> Result<Self, FormulaError> {
        let f = Formula::UntilBounded {
            left: Box::new(left),
            lower,
            upper,
            right: Box::new(right),
        };
        f.validate()?;
        Ok(f)
    }

    /// Checks structural invariants recursively.
    pub fn validate(&self) -> Result<(), FormulaError> {
        match self {
            Formula::Atomic { constant, .. } => {
                if !constant.is_finite() {
                    return Err(FormulaError::NonFinite(*constant));
                }
            }
            Formula::Conjunction(children) => {
                if children.len() < 2 {
                    return Err(FormulaError::ShortConjunction(children.len()));
                }
                for c in children {
                    c.validate()?;
                }
            }
            Formula::UntilBounded {
                left,
                lower,
                upper,
                right,
            } => {
                if !(lower.is_finite() && upper.is_finite() && *lower >= 0.0 && lower <= upper) {
                    return Err(FormulaError::BadBounds {
                        lower: *lower,
                        upper: *upper,
                    });
                }
                left.validate()?;
                right.validate()?;
            }
        }
        Ok(())
    }

    /// Longest look-ahead, in seconds, needed to evaluate this formula.
    pub fn horizon(&self) -> f64 {
        match self {
            Formula::Atomic { .. } => 0.0,
            Formula::Conjunction(children) => {
                children.iter().map(Formula::horizon).fold(0.0, f64::max)
            }
            Formula::UntilBounded {
                left, upper, right, ..
            } => upper + left.horizon().max(right.horizon()),
        }
    }
}

/// Canonical printer; its output parses back to an identical formula.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atomic {
                signal,
                comparator,
                constant,
            } => {
                write!(
                    f,
                    "{} {} {}",
                    signal.as_str(),
                    comparator.as_str(),
                    constant
                )
            }
            Formula::Conjunction(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" and ")?;
                    }
                    match child {
                        Formula::Atomic { .. } => write!(f, "{child}")?,
                        _ => write!(f, "({child})")?,
                    }
                }
                Ok(())
            }
            Formula::UntilBounded {
                left,
                lower,
                upper,
                right,
            } => {
                let side = |f: &mut fmt::Formatter<'_>, g: &Formula| match g {
                    Formula::UntilBounded { .. } => write!(f, "({g})"),
                    _ => write!(f, "{g}"),
                };
                side(f, left)?;
                write!(f, " until[{lower},{upper}] ")?;
                side(f, right)
            }
        }
    }
}
