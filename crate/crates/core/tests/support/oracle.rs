//! Definitional robustness evaluator used as a test oracle.
//!
//! Works straight from the semantics on sample times: no step conversion,
//! no sweeps, every minimum and maximum recomputed from scratch.

#![allow(dead_code)]

use quadcoach_core::stl::{Comparator, Formula, Signal, Trace};

pub const EMPTY: f64 = -1e9;

fn signal_value(trace: &Trace, signal: Signal, i: usize) -> f64 {
    let s = trace.samples()[i];
    let fp = trace.footprint();
    match signal {
        Signal::X => s.x,
        Signal::XRight => s.x + fp.width,
        Signal::Y => s.y,
        Signal::YTop => s.y + fp.height,
        Signal::Speed => s.speed,
        Signal::Phi => s.phi,
        Signal::AbsPhi => s.phi.abs(),
    }
}

pub fn rho(formula: &Formula, trace: &Trace, t: usize) -> f64 {
    match formula {
        Formula::Atomic {
            signal,
            comparator,
            constant,
        } => {
            let v = signal_value(trace, *signal, t);
            match comparator {
                Comparator::Greater => v - constant,
                Comparator::Less => constant - v,
            }
        }
        Formula::Conjunction(children) => children
            .iter()
            .map(|c| rho(c, trace, t))
            .fold(f64::INFINITY, f64::min),
        Formula::UntilBounded {
            left,
            lower,
            upper,
            right,
        } => {
            let dt = trace.dt();
            let now = t as f64 * dt;
            let mut best: Option<f64> = None;
            for tp in t..trace.len() {
                let at = tp as f64 * dt;
                if at < now + lower - 1e-9 || at > now + upper + 1e-9 {
                    continue;
                }
                let mut value = rho(right, trace, tp);
                for tpp in t..tp {
                    value = value.min(rho(left, trace, tpp));
                }
                best = Some(best.map_or(value, |b: f64| b.max(value)));
            }
            best.unwrap_or(EMPTY)
        }
    }
}

/// Boolean satisfaction with strict comparisons, also from the definition.
pub fn sat(formula: &Formula, trace: &Trace, t: usize) -> bool {
    match formula {
        Formula::Atomic {
            signal,
            comparator,
            constant,
        } => {
            let v = signal_value(trace, *signal, t);
            match comparator {
                Comparator::Greater => v > *constant,
                Comparator::Less => v < *constant,
            }
        }
        Formula::Conjunction(children) => children.iter().all(|c| sat(c, trace, t)),
        Formula::UntilBounded {
            left,
            lower,
            upper,
            right,
        } => {
            let dt = trace.dt();
            let now = t as f64 * dt;
            (t..trace.len()).any(|tp| {
                let at = tp as f64 * dt;
                at >= now + lower - 1e-9
                    && at <= now + upper + 1e-9
                    && sat(right, trace, tp)
                    && (t..tp).all(|tpp| sat(left, trace, tpp))
            })
        }
    }
}
