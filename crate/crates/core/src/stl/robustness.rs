//! Discrete-time quantitative semantics.
//!
//! `x > c` scores `x - c`, `x < c` scores `c - x`, conjunction takes the
//! minimum and bounded until follows the usual max-min unrolling:
//!
//! ```text
//! rho(a until[l,u] b, t) = max_{t' in [t+l, t+u]} min( rho(b, t'), min_{t'' in [t, t')} rho(a, t'') )
//! ```
//!
//! Windows are clipped at the end of the trace. A window that starts past
//! the end has no candidates and scores [`EMPTY_WINDOW_ROBUSTNESS`].

use alloc::vec;
use alloc::vec::Vec;

use super::formula::{Comparator, Formula};
use super::trace::Trace;

/// Stand-in for negative infinity when an until window is empty.
pub const EMPTY_WINDOW_ROBUSTNESS: f64 = -1e9;

const BOUND_EPS: f64 = 1e-9;

/// Converts second bounds to step offsets: lower rounds up, upper rounds
/// down. The window is empty when the returned lower exceeds the upper.
pub fn step_bounds(lower: f64, upper: f64, dt: f64) -> (usize, usize) {
    let lo = libm::ceil(lower / dt - BOUND_EPS).max(0.0);
    let hi = libm::floor(upper / dt + BOUND_EPS).max(0.0);
    (lo as usize, hi as usize)
}

/// Robustness of `formula` at step `index`.
///
/// # Panics
///
/// If `index` is not a valid step of `trace`.
pub fn robustness(formula: &Formula, trace: &Trace, index: usize) -> f64 {
    assert!(
        index < trace.len(),
        "step {index} outside trace of length {}",
        trace.len()
    );
    eval_at(formula, trace, index)
}

fn eval_at(formula: &Formula, trace: &Trace, index: usize) -> f64 {
    match formula {
        Formula::Atomic {
            signal,
            comparator,
            constant,
        } => margin(*comparator, trace.value(*signal, index), *constant),
        Formula::Conjunction(children) => children
            .iter()
            .map(|c| eval_at(c, trace, index))
            .fold(f64::INFINITY, f64::min),
        Formula::UntilBounded {
            left,
            lower,
            upper,
            right,
        } => {
            let (lo, hi) = step_bounds(*lower, *upper, trace.dt());
            until_at(
                index,
                lo,
                hi,
                trace.len(),
                |i| eval_at(left, trace, i),
                |i| eval_at(right, trace, i),
            )
        }
    }
}

/// Robustness at every step; element `i` equals [`robustness`] at `i`.
pub fn robustness_series(formula: &Formula, trace: &Trace) -> Vec<f64> {
    match formula {
        Formula::Atomic {
            signal,
            comparator,
            constant,
        } => (0..trace.len())
            .map(|i| margin(*comparator, trace.value(*signal, i), *constant))
            .collect(),
        Formula::Conjunction(children) => {
            let mut acc = vec![f64::INFINITY; trace.len()];
            for child in children {
                for (a, v) in acc.iter_mut().zip(robustness_series(child, trace)) {
                    *a = a.min(v);
                }
            }
            acc
        }
        Formula::UntilBounded {
            left,
            lower,
            upper,
            right,
        } => {
            let (lo, hi) = step_bounds(*lower, *upper, trace.dt());
            let left = robustness_series(left, trace);
            let right = robustness_series(right, trace);
            (0..trace.len())
                .map(|t| until_at(t, lo, hi, trace.len(), |i| left[i], |i| right[i]))
                .collect()
        }
    }
}

fn margin(comparator: Comparator, value: f64, constant: f64) -> f64 {
    match comparator {
        Comparator::Greater => value - constant,
        Comparator::Less => constant - value,
    }
}

/// Single forward sweep: the running minimum of `left` over `[t, t')` is
/// carried along while candidates `t'` are scanned.
fn until_at(
    t: usize,
    lo: usize,
    hi: usize,
    len: usize,
    left: impl Fn(usize) -> f64,
    right: impl Fn(usize) -> f64,
) -> f64 {
    let first = t.saturating_add(lo);
    if lo > hi || first >= len {
        return EMPTY_WINDOW_ROBUSTNESS;
    }
    let last = t.saturating_add(hi).min(len - 1);
    let mut best = f64::NEG_INFINITY;
    let mut prefix = f64::INFINITY;
    for i in t..=last {
        if i >= first {
            best = best.max(right(i).min(prefix));
        }
        prefix = prefix.min(left(i));
    }
    best
}

/// Boolean semantics with strict comparisons.
///
/// # Panics
///
/// If `index` is not a valid step of `trace`.
pub fn holds(formula: &Formula, trace: &Trace, index: usize) -> bool {
    assert!(
        index < trace.len(),
        "step {index} outside trace of length {}",
        trace.len()
    );
    match formula {
        Formula::Atomic {
            signal,
            comparator,
            constant,
        } => {
            let v = trace.value(*signal, index);
            match comparator {
                Comparator::Greater => v > *constant,
                Comparator::Less => v < *constant,
            }
        }
        Formula::Conjunction(children) => children.iter().all(|c| holds(c, trace, index)),
        Formula::UntilBounded {
            left,
            lower,
            upper,
            right,
        } => {
            let (lo, hi) = step_bounds(*lower, *upper, trace.dt());
            let first = index.saturating_add(lo);
            if lo > hi || first >= trace.len() {
                return false;
            }
            let last = index.saturating_add(hi).min(trace.len() - 1);
            (first..=last)
                .any(|k| holds(right, trace, k) && (index..k).all(|j| holds(left, trace, j)))
        }
    }
}
