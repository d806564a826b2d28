//! Keyword heuristics for the five feedback elements.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

/// Word count a manageable paragraph must fall in.
pub const WORD_BUDGET: RangeInclusive<usize> = 60..=160;

const MOTIVATION: &[&str] = &[
    "you can",
    "you will",
    "you'll",
    "you're getting",
    "you are getting",
    "you are making",
    "keep it up",
    "keep going",
    "confident",
    "believe",
    "great job",
    "nice work",
    "well done",
    "good job",
    "progress",
    "you clearly",
    "definitely",
    "absolutely",
];
const REFLECTION_CUES: &[&str] = &[
    "think", "reflect", "what", "how", "why", "notice", "consider", "when", "which",
];
const TIMELY: &[&str] = &[
    "this trial",
    "last trial",
    "that trial",
    "previous trial",
    "this attempt",
    "last attempt",
    "that attempt",
    "this landing",
    "that landing",
    "this flight",
    "this run",
    "just now",
    "just finished",
    "most recent",
];
const ACTION_VERBS: &[&str] = &[
    "try",
    "ease",
    "reduce",
    "increase",
    "lower",
    "raise",
    "hold",
    "release",
    "tap",
    "press",
    "apply",
    "use",
    "add",
    "cut",
    "start",
    "begin",
    "keep",
    "correct",
    "counter",
    "level",
    "straighten",
    "slow",
    "tilt",
];
const CONTROL_TERMS: &[&str] = &[
    "throttle",
    "rotation",
    "rotate",
    "attitude",
    "tilt",
    "thrust",
    "w key",
    "s key",
    "a key",
    "d key",
    "rotation keys",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ElementCoverage {
    pub reflection: bool,
    pub motivation: bool,
    pub timely: bool,
    pub actionable: bool,
    pub manageable: bool,
}

impl ElementCoverage {
    pub fn all(&self) -> bool {
        self.reflection && self.motivation && self.timely && self.actionable && self.manageable
    }
}

/// Lower-cased words joined by single spaces and padded, so phrases can be
/// matched on word boundaries with `contains(" phrase ")`.
fn normalise(text: &str) -> String {
    let mut out = String::from(" ");
    for word in words(text) {
        for c in word.chars() {
            out.extend(c.to_lowercase());
        }
        out.push(' ');
    }
    out
}

fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|w| !w.is_empty())
}

fn has_any(normalised: &str, phrases: &[&str]) -> bool {
    phrases.iter().any(|p| {
        let mut needle = String::with_capacity(p.len() + 2);
        needle.push(' ');
        needle.push_str(p);
        needle.push(' ');
        normalised.contains(&needle)
    })
}

fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if matches!(c, '.' | '!' | '?') {
            out.push(&text[start..=i]);
            start = i + 1;
        }
    }
    if start < text.len() && !text[start..].trim().is_empty() {
        out.push(&text[start..]);
    }
    out
}

pub fn validate_elements(text: &str) -> ElementCoverage {
    let all = normalise(text);
    let sentences = sentences(text);
    let word_count = words(text).count();
    ElementCoverage {
        reflection: sentences
            .iter()
            .any(|s| s.trim_end().ends_with('?') && has_any(&normalise(s), REFLECTION_CUES)),
        motivation: has_any(&all, MOTIVATION),
        timely: has_any(&all, TIMELY),
        actionable: sentences.iter().any(|s| {
            let n = normalise(s);
            has_any(&n, ACTION_VERBS) && has_any(&n, CONTROL_TERMS)
        }),
        manageable: WORD_BUDGET.contains(&word_count),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_covers_nothing() {
        assert_eq!(validate_elements(""), ElementCoverage::default());
    }

    #[test]
    fn individual_elements() {
        let c = validate_elements("In this trial you drifted. What did you notice? Try easing the throttle. You can do it.");
        assert!(c.timely && c.reflection && c.actionable && c.motivation);
        assert!(!c.manageable);

        // A question without a reflective cue word does not count.
        assert!(!validate_elements("Ready?").reflection);
        // The action verb and control term must share a sentence.
        assert!(!validate_elements("Try harder. The throttle is sensitive.").actionable);
        // Whole words only.
        assert!(!validate_elements("Retry the thrusters").actionable);
    }

    #[test]
    fn word_budget_edges() {
        let words = |n: usize| alloc::vec!["word"; n].join(" ");
        assert!(!validate_elements(&words(59)).manageable);
        assert!(validate_elements(&words(60)).manageable);
        assert!(validate_elements(&words(160)).manageable);
        assert!(!validate_elements(&words(161)).manageable);
    }
}
