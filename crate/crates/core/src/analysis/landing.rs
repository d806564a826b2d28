use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::rows::{TrialRow, TRIALS_PER_SESSION};
use crate::feedback::FeedbackCondition;
use crate::sim::LandingOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    /// Sample standard deviation; zero for a single participant.
    pub sd: f64,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Self {
        Self {
            mean: mean(values),
            sd: sample_sd(values),
        }
    }
}

/// One half of a landing table row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandingColumns {
    pub first_half: MeanSd,
    pub second_half: MeanSd,
    pub improvement: MeanSd,
    pub all_trials: MeanSd,
}

impl LandingColumns {
    /// `counts` holds per-participant (trials 1-10, trials 11-20) counts.
    pub fn from_counts(counts: &[(u32, u32)]) -> Self {
        let first: Vec<f64> = counts.iter().map(|c| f64::from(c.0)).collect();
        let second: Vec<f64> = counts.iter().map(|c| f64::from(c.1)).collect();
        let diff: Vec<f64> = counts
            .iter()
            .map(|c| f64::from(c.1) - f64::from(c.0))
            .collect();
        let all: Vec<f64> = counts.iter().map(|c| f64::from(c.0 + c.1)).collect();
        let first_half = MeanSd::of(&first);
        let second_half = MeanSd::of(&second);
        Self {
            first_half,
            second_half,
            improvement: MeanSd {
                mean: second_half.mean - first_half.mean,
                sd: sample_sd(&diff),
            },
            all_trials: MeanSd::of(&all),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: FeedbackCondition,
    pub participants: usize,
    pub safe: LandingColumns,
    pub safe_or_unsafe: LandingColumns,
}

/// Landing counts for one complete session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCounts {
    pub session_id: String,
    pub condition: FeedbackCondition,
    pub safe_first: u32,
    pub safe_second: u32,
    pub landed_first: u32,
    pub landed_second: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedSession {
    pub session_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandingTable {
    pub summaries: Vec<ConditionSummary>,
    pub excluded: Vec<ExcludedSession>,
}

impl LandingTable {
    pub fn get(&self, condition: FeedbackCondition) -> Option<&ConditionSummary> {
        self.summaries.iter().find(|s| s.condition == condition)
    }
}

/// Per-session counts for every complete session, plus the sessions that
/// were left out and why. Sessions are ordered by id.
pub fn session_counts(rows: &[TrialRow]) -> (Vec<SessionCounts>, Vec<ExcludedSession>) {
    let mut by_session: BTreeMap<&str, Vec<&TrialRow>> = BTreeMap::new();
    for row in rows {
        by_session
            .entry(row.session_id.as_str())
            .or_default()
            .push(row);
    }
    let mut counts = Vec::new();
    let mut excluded = Vec::new();
    for (id, trials) in by_session {
        match count_session(&trials) {
            Ok(c) => counts.push(c),
            Err(reason) => excluded.push(ExcludedSession {
                session_id: id.into(),
                reason,
            }),
        }
    }
    (counts, excluded)
}

fn count_session(trials: &[&TrialRow]) -> Result<SessionCounts, String> {
    let condition = trials[0].condition;
    if trials.iter().any(|t| t.condition != condition) {
        return Err("rows disagree on the condition".into());
    }
    let mut seen = [false; TRIALS_PER_SESSION as usize];
    let mut c = SessionCounts {
        session_id: trials[0].session_id.clone(),
        condition,
        safe_first: 0,
        safe_second: 0,
        landed_first: 0,
        landed_second: 0,
    };
    for t in trials {
        if !(1..=TRIALS_PER_SESSION).contains(&t.trial_index) {
            return Err(format!("trial index {} out of range", t.trial_index));
        }
        let slot = &mut seen[(t.trial_index - 1) as usize];
        if *slot {
            return Err(format!("trial {} appears twice", t.trial_index));
        }
        *slot = true;
        let first = t.trial_index <= TRIALS_PER_SESSION / 2;
        let safe = u32::from(t.outcome == LandingOutcome::Safe);
        let landed = u32::from(t.outcome.reached_pad());
        if first {
            c.safe_first += safe;
            c.landed_first += landed;
        } else {
            c.safe_second += safe;
            c.landed_second += landed;
        }
    }
    let done = seen.iter().filter(|s| **s).count();
    if done != TRIALS_PER_SESSION as usize {
        return Err(format!("only {done} of {TRIALS_PER_SESSION} trials"));
    }
    Ok(c)
}

pub fn summarize_counts(
    condition: FeedbackCondition,
    counts: &[SessionCounts],
) -> ConditionSummary {
    let safe: Vec<(u32, u32)> = counts
        .iter()
        .map(|c| (c.safe_first, c.safe_second))
        .collect();
    let landed: Vec<(u32, u32)> = counts
        .iter()
        .map(|c| (c.landed_first, c.landed_second))
        .collect();
    ConditionSummary {
        condition,
        participants: counts.len(),
        safe: LandingColumns::from_counts(&safe),
        safe_or_unsafe: LandingColumns::from_counts(&landed),
    }
}

/// Average landings per condition over complete sessions. Incomplete
/// sessions are reported in `excluded` rather than failing the table.
pub fn landing_table(rows: &[TrialRow]) -> LandingTable {
    let (counts, excluded) = session_counts(rows);
    let summaries = FeedbackCondition::ALL
        .into_iter()
        .filter_map(|cond| {
            let group: Vec<SessionCounts> = counts
                .iter()
                .filter(|c| c.condition == cond)
                .cloned()
                .collect();
            (!group.is_empty()).then(|| summarize_counts(cond, &group))
        })
        .collect();
    LandingTable {
        summaries,
        excluded,
    }
}

/// Participants with and without at least one safe landing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mastery {
    pub condition: FeedbackCondition,
    pub failed: u64,
    pub mastered: u64,
}

/// Mastery counts for `condition` over complete sessions.
pub fn mastery(condition: FeedbackCondition, counts: &[SessionCounts]) -> Mastery {
    let group = counts.iter().filter(|c| c.condition == condition);
    let (failed, mastered) = group.fold((0, 0), |(f, m), c| {
        if c.safe_first + c.safe_second == 0 {
            (f + 1, m)
        } else {
            (f, m + 1)
        }
    });
    Mastery {
        condition,
        failed,
        mastered,
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with `n - 1` in the denominator.
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
}

pub fn sample_sd(values: &[f64]) -> f64 {
    libm::sqrt(sample_variance(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn session(id: &str, cond: FeedbackCondition, outcomes: &[LandingOutcome]) -> Vec<TrialRow> {
        outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| TrialRow::new(id, cond, i as u32 + 1, *o, 10.0))
            .collect()
    }

    #[test]
    fn second_half_only() {
        use LandingOutcome::*;
        let mut outcomes = vec![Crash; 10];
        outcomes.extend([Safe; 10]);
        let mut rows = Vec::new();
        for i in 0..4 {
            rows.extend(session(
                &format!("s{i}"),
                FeedbackCondition::Text,
                &outcomes,
            ));
        }
        let table = landing_table(&rows);
        let text = table.get(FeedbackCondition::Text).unwrap();
        assert_eq!(text.participants, 4);
        assert_eq!(text.safe.improvement.mean, 10.0);
        assert_eq!(text.safe.improvement.sd, 0.0);
        assert_eq!(text.safe.all_trials.mean, 10.0);
        assert!(table.excluded.is_empty());
    }

    #[test]
    fn single_participant() {
        use LandingOutcome::*;
        let mut outcomes = vec![
            Safe, Safe, Safe, Safe, Unsafe, Crash, Crash, Crash, Crash, Crash,
        ];
        outcomes.extend([
            Safe, Safe, Safe, Safe, Safe, Safe, Unsafe, Unsafe, Crash, Crash,
        ]);
        let table = landing_table(&session("p", FeedbackCondition::Baseline, &outcomes));
        let row = table.get(FeedbackCondition::Baseline).unwrap();
        assert_eq!(row.safe.first_half, MeanSd { mean: 4.0, sd: 0.0 });
        assert_eq!(row.safe.second_half.mean, 6.0);
        assert_eq!(row.safe.improvement.mean, 2.0);
        assert_eq!(row.safe_or_unsafe.first_half.mean, 5.0);
        assert_eq!(row.safe_or_unsafe.second_half.mean, 8.0);
        assert_eq!(row.safe_or_unsafe.all_trials.mean, 13.0);
    }

    #[test]
    fn incomplete_sessions_are_excluded() {
        use LandingOutcome::*;
        let mut rows = session("short", FeedbackCondition::Text, &[Safe; 19]);
        let mut dup = session("dup", FeedbackCondition::Text, &[Safe; 20]);
        dup[3].trial_index = 4;
        dup[4].trial_index = 4;
        rows.extend(dup);
        let mut mixed = session("mixed", FeedbackCondition::Text, &[Safe; 20]);
        mixed[0].condition = FeedbackCondition::Baseline;
        rows.extend(mixed);
        rows.extend(session("ok", FeedbackCondition::Multimodal, &[Crash; 20]));
        let table = landing_table(&rows);
        let ids: Vec<&str> = table
            .excluded
            .iter()
            .map(|e| e.session_id.as_str())
            .collect();
        assert_eq!(ids, ["dup", "mixed", "short"]);
        assert_eq!(table.summaries.len(), 1);
        assert_eq!(table.summaries[0].safe.all_trials.mean, 0.0);
    }

    #[test]
    fn sample_sd_by_hand() {
        // deviations from 5 are -3, -1, 1, 3: squares sum to 20, over 3
        let sd = sample_sd(&[2.0, 4.0, 6.0, 8.0]);
        assert!((sd * sd - 20.0 / 3.0).abs() < 1e-12);
        assert_eq!(sample_sd(&[7.0]), 0.0);
    }
}
