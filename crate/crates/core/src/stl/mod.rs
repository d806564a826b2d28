//! Signal temporal logic over discrete-time traces.
//!
//! The fragment is deliberately small: linear threshold atoms, conjunction
//! and a time-bounded until. Formulas are written in a line-oriented text
//! format (see [`SpecSet`]) and evaluated with min/max robustness
//! semantics, so a positive value means the trace satisfies the formula
//! with that much margin.

mod formula;
mod parse;
mod robustness;
mod specfile;
mod trace;

pub use formula::{Comparator, Formula, FormulaError, Signal};
pub use parse::{parse_formula, parse_formula_with, ParseError, ParseErrorKind};
pub use robustness::{holds, robustness, robustness_series, step_bounds, EMPTY_WINDOW_ROBUSTNESS};
pub use specfile::{SpecFileError, SpecSet, TABLE1_SPEC};
pub use trace::{Footprint, Sample, Trace, TraceError, DEFAULT_DT};
