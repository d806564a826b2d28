//! Seeded fixture synthesis: samples with exact moments and participant
//! cohorts whose landing table matches a target row.

use quadcoach_core::analysis::{
    summarize_counts, ConditionSummary, LandingColumns, MeanSd, SessionCounts, SurveyResponse,
    TrialRow,
};
use quadcoach_core::feedback::FeedbackCondition;
use quadcoach_core::sim::LandingOutcome;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Trials per half session.
const HALF: u32 = 10;
/// A column is matched once its SD rounds to the target at two decimals.
const SD_TOLERANCE: f64 = 0.005;
const DEFAULT_ITERATIONS: usize = 600_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("need at least {min} values, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("standard deviation must be finite and non-negative, got {0}")]
    BadSd(f64),
    #[error("column means are not consistent with integer counts over {0} participants")]
    InconsistentMeans(usize),
    #[error("no cohort satisfies the count constraints")]
    Infeasible,
}

/// `n` seeded values whose sample mean and sample SD equal `mean` and
/// `sd` up to rounding.
pub fn sample_with_moments(
    mean: f64,
    sd: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<f64>, SynthError> {
    if n < 2 {
        return Err(SynthError::TooFew { min: 2, got: n });
    }
    if !sd.is_finite() || sd < 0.0 {
        return Err(SynthError::BadSd(sd));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let m = raw.iter().sum::<f64>() / n as f64;
    let s = (raw.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64).sqrt();
    Ok(raw.iter().map(|v| mean + sd * (v - m) / s).collect())
}

/// One condition's row of the landing table to reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortTarget {
    pub condition: FeedbackCondition,
    pub participants: usize,
    pub safe: LandingColumns,
    pub safe_or_unsafe: LandingColumns,
    /// Participants without a safe landing in any trial, when known.
    pub failed: Option<usize>,
}

fn columns(values: [(f64, f64); 4]) -> LandingColumns {
    let [first_half, second_half, improvement, all_trials] =
        values.map(|(mean, sd)| MeanSd { mean, sd });
    LandingColumns {
        first_half,
        second_half,
        improvement,
        all_trials,
    }
}

/// The published landing table, one target per condition.
pub fn reported_cohorts() -> [CohortTarget; 3] {
    [
        CohortTarget {
            condition: FeedbackCondition::Baseline,
            participants: 55,
            safe: columns([(3.42, 2.85), (5.40, 3.28), (1.98, 2.18), (8.82, 5.75)]),
            safe_or_unsafe: columns([(7.04, 2.24), (8.53, 1.93), (1.49, 1.92), (15.56, 3.71)]),
            failed: Some(8),
        },
        CohortTarget {
            condition: FeedbackCondition::Text,
            participants: 56,
            safe: columns([(3.05, 2.96), (4.41, 3.07), (1.36, 2.65), (7.46, 5.42)]),
            safe_or_unsafe: columns([(6.55, 2.61), (8.20, 2.02), (1.64, 2.19), (14.75, 4.17)]),
            failed: None,
        },
        CohortTarget {
            condition: FeedbackCondition::Multimodal,
            participants: 56,
            safe: columns([(2.75, 2.46), (5.12, 2.52), (2.38, 2.33), (7.88, 4.39)]),
            safe_or_unsafe: columns([(6.93, 2.21), (8.89, 1.27), (1.96, 1.93), (15.82, 3.06)]),
            failed: Some(2),
        },
    ]
}

impl CohortTarget {
    fn sds(&self) -> [f64; 8] {
        let (s, l) = (&self.safe, &self.safe_or_unsafe);
        [
            s.first_half.sd,
            s.second_half.sd,
            s.improvement.sd,
            s.all_trials.sd,
            l.first_half.sd,
            l.second_half.sd,
            l.improvement.sd,
            l.all_trials.sd,
        ]
    }

    /// Column totals implied by the means, checked against the derived
    /// columns.
    fn totals(&self) -> Result<[i64; 4], SynthError> {
        let n = self.participants as f64;
        let total = |m: f64| (m * n).round() as i64;
        let matches = |sum: i64, m: f64| (sum as f64 / n - m).abs() <= SD_TOLERANCE + 1e-9;
        let mut out = [0; 4];
        for (k, cols) in [&self.safe, &self.safe_or_unsafe].into_iter().enumerate() {
            let first = total(cols.first_half.mean);
            let second = total(cols.second_half.mean);
            if !matches(second - first, cols.improvement.mean)
                || !matches(first + second, cols.all_trials.mean)
            {
                return Err(SynthError::InconsistentMeans(self.participants));
            }
            out[k * 2] = first;
            out[k * 2 + 1] = second;
        }
        Ok(out)
    }
}

/// Whether some paired integer data could show all four SDs at their
/// two-decimal values. Sample variances obey
/// `var(x + y) + var(y - x) = 2 var(x) + 2 var(y)` exactly.
pub fn sds_consistent(cols: &LandingColumns) -> bool {
    let range = |sd: f64| {
        (
            (sd - SD_TOLERANCE).max(0.0).powi(2),
            (sd + SD_TOLERANCE).powi(2),
        )
    };
    let (f_lo, f_hi) = range(cols.first_half.sd);
    let (s_lo, s_hi) = range(cols.second_half.sd);
    let (d_lo, d_hi) = range(cols.improvement.sd);
    let (a_lo, a_hi) = range(cols.all_trials.sd);
    d_lo + a_lo <= 2.0 * (f_hi + s_hi) && 2.0 * (f_lo + s_lo) <= d_hi + a_hi
}

/// Per-participant counts as `[safe_first, safe_second, landed_first, landed_second]`.
type Counts = [i64; 4];

fn derived(p: &Counts) -> [i64; 8] {
    let [a, b, c, d] = *p;
    [a, b, b - a, a + b, c, d, d - c, c + d]
}

fn failed(p: &Counts) -> bool {
    p[0] + p[1] == 0
}

/// Upper bound of column `col` for this participant.
fn cap(p: &Counts, col: usize) -> i64 {
    if col < 2 {
        p[col + 2]
    } else {
        i64::from(HALF)
    }
}

/// Lower bound of column `col` for this participant.
fn floor(p: &Counts, col: usize) -> i64 {
    if col < 2 {
        0
    } else {
        p[col - 2]
    }
}

fn spread(total: i64, slots: &mut [Counts], col: usize) -> Result<(), SynthError> {
    let mut left = total;
    while left > 0 {
        let mut moved = false;
        for p in slots.iter_mut() {
            if left > 0 && p[col] < cap(p, col) {
                p[col] += 1;
                left -= 1;
                moved = true;
            }
        }
        if !moved {
            return Err(SynthError::Infeasible);
        }
    }
    Ok(())
}

/// Seeded cohort matching the target's means exactly and its SDs as
/// closely as the search finds.
pub fn synthesize_cohort(
    target: &CohortTarget,
    seed: u64,
) -> Result<Vec<SessionCounts>, SynthError> {
    synthesize_cohort_with(target, seed, DEFAULT_ITERATIONS)
}

pub fn synthesize_cohort_with(
    target: &CohortTarget,
    seed: u64,
    iterations: usize,
) -> Result<Vec<SessionCounts>, SynthError> {
    let n = target.participants;
    if n < 2 {
        return Err(SynthError::TooFew { min: 2, got: n });
    }
    let [sa, sb, sc, sd] = target.totals()?;
    let n_failed = target.failed.unwrap_or(0);
    if n_failed > n {
        return Err(SynthError::Infeasible);
    }

    let mut people = vec![[0i64; 4]; n];
    spread(sc, &mut people, 2)?;
    spread(sd, &mut people, 3)?;
    let (fail, rest) = people.split_at_mut(n_failed);
    debug_assert!(fail.iter().all(failed));
    spread(sa, rest, 0)?;
    let offset = usize::try_from(sa).unwrap_or(0) % rest.len().max(1);
    rest.rotate_left(offset);
    spread(sb, rest, 1)?;
    if target.failed.is_some() && rest.iter().any(failed) {
        return Err(SynthError::Infeasible);
    }

    let goal = target.sds();
    let nf = n as f64;
    let mut sums = [0i64; 8];
    let mut squares = [0i64; 8];
    for p in &people {
        for (k, v) in derived(p).into_iter().enumerate() {
            sums[k] += v;
            squares[k] += v * v;
        }
    }
    let sd_of = |k: usize, sq: i64| {
        let s = sums[k] as f64;
        ((sq as f64 - s * s / nf) / (nf - 1.0)).max(0.0).sqrt()
    };
    let cost = |sq: &[i64; 8]| {
        (0..8)
            .map(|k| (sd_of(k, sq[k]) - goal[k]).powi(2))
            .sum::<f64>()
    };
    let matched = |sq: &[i64; 8]| (0..8).all(|k| (sd_of(k, sq[k]) - goal[k]).abs() < SD_TOLERANCE);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = cost(&squares);
    let mut best = (current, people.clone());
    let (t_start, t_end) = (0.05f64, 1e-7f64);
    for step in 0..iterations {
        if matched(&squares) {
            best = (current, people.clone());
            break;
        }
        let col = rng.random_range(0..4);
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j
            || people[i][col] <= floor(&people[i], col)
            || people[j][col] >= cap(&people[j], col)
        {
            continue;
        }
        let (old_i, old_j) = (people[i], people[j]);
        let (mut new_i, mut new_j) = (old_i, old_j);
        new_i[col] -= 1;
        new_j[col] += 1;
        if target.failed.is_some()
            && (failed(&new_i) != failed(&old_i) || failed(&new_j) != failed(&old_j))
        {
            continue;
        }
        let mut trial = squares;
        for (old, new) in [(old_i, new_i), (old_j, new_j)] {
            for (k, (o, v)) in derived(&old).into_iter().zip(derived(&new)).enumerate() {
                trial[k] += v * v - o * o;
            }
        }
        let next = cost(&trial);
        let temperature = t_start * (t_end / t_start).powf(step as f64 / iterations as f64);
        if next <= current || rng.random::<f64>() < ((current - next) / temperature).exp() {
            people[i] = new_i;
            people[j] = new_j;
            squares = trial;
            current = next;
            if current < best.0 {
                best = (current, people.clone());
            }
        }
    }

    let mut people = best.1;
    people.shuffle(&mut rng);
    Ok(people
        .into_iter()
        .enumerate()
        .map(|(k, [a, b, c, d])| SessionCounts {
            session_id: format!("{}-{:03}", target.condition.as_str(), k + 1),
            condition: target.condition,
            safe_first: a as u32,
            safe_second: b as u32,
            landed_first: c as u32,
            landed_second: d as u32,
        })
        .collect())
}

/// Landing-table row of a synthesized cohort.
pub fn cohort_summary(cohort: &[SessionCounts]) -> Option<ConditionSummary> {
    Some(summarize_counts(cohort.first()?.condition, cohort))
}

/// Twenty trial rows per participant reproducing its counts, with seeded
/// outcome order, durations and survey answers.
pub fn cohort_rows(cohort: &[SessionCounts], seed: u64) -> Vec<TrialRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(cohort.len() * 2 * HALF as usize);
    for p in cohort {
        let mut index = 1;
        for (safe, landed) in [
            (p.safe_first, p.landed_first),
            (p.safe_second, p.landed_second),
        ] {
            let mut half: Vec<LandingOutcome> = (0..HALF)
                .map(|k| match k {
                    k if k < safe => LandingOutcome::Safe,
                    k if k < landed => LandingOutcome::Unsafe,
                    _ => LandingOutcome::Crash,
                })
                .collect();
            half.shuffle(&mut rng);
            for outcome in half {
                let duration = (rng.random_range(600..4000) as f64) * 0.02;
                let survey = SurveyResponse {
                    motivation: rng.random_range(1..=5),
                    manageable: rng.random_range(1..=5),
                    actionable: rng.random_range(1..=5),
                    timely: rng.random_range(1..=5),
                    reflection: rng.random_range(1..=5),
                };
                let review = (rng.random_range(500..6000) as f64) / 100.0;
                rows.push(
                    TrialRow::new(p.session_id.clone(), p.condition, index, outcome, duration)
                        .with_survey(survey, review),
                );
                index += 1;
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_are_exact() {
        let xs = sample_with_moments(2.38, 2.33, 56, 7).unwrap();
        let m = xs.iter().sum::<f64>() / 56.0;
        let s = (xs.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 55.0).sqrt();
        assert!((m - 2.38).abs() < 1e-12);
        assert!((s - 2.33).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_means_rejected() {
        let mut target = reported_cohorts()[2].clone();
        target.safe.improvement.mean = 3.0;
        assert_eq!(
            synthesize_cohort(&target, 1),
            Err(SynthError::InconsistentMeans(56))
        );
    }
}
