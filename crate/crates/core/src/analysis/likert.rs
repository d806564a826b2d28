use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::rows::{SurveyItem, TrialRow};
use super::AnalysisError;
use crate::feedback::FeedbackCondition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LikertLevel {
    Disagree,
    Neutral,
    Agree,
}

impl LikertLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            LikertLevel::Disagree => "Disagree",
            LikertLevel::Neutral => "Neutral",
            LikertLevel::Agree => "Agree",
        }
    }
}

/// Five-point rating to three-point level.
pub fn collapse_likert(rating: u8) -> Result<LikertLevel, AnalysisError> {
    match rating {
        1 | 2 => Ok(LikertLevel::Disagree),
        3 => Ok(LikertLevel::Neutral),
        4 | 5 => Ok(LikertLevel::Agree),
        r => Err(AnalysisError::RatingOutOfRange(r)),
    }
}

/// Most frequent rating, the smallest one on ties. `None` when empty.
pub fn per_participant_mode(ratings: &[u8]) -> Option<u8> {
    let mut counts = [0usize; 256];
    for &r in ratings {
        counts[usize::from(r)] += 1;
    }
    let mut best: Option<(u8, usize)> = None;
    for (value, &count) in counts.iter().enumerate() {
        if count > 0 && best.is_none_or(|(_, c)| count > c) {
            best = Some((value as u8, count));
        }
    }
    best.map(|(v, _)| v)
}

/// Participants per collapsed level for one condition and survey item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertCounts {
    pub condition: FeedbackCondition,
    pub item: SurveyItem,
    pub disagree: u32,
    pub neutral: u32,
    pub agree: u32,
}

impl LikertCounts {
    pub fn total(&self) -> u32 {
        self.disagree + self.neutral + self.agree
    }
}

/// Each participant's modal rating per item, collapsed and counted per
/// condition. Participants without any answer for an item are skipped.
pub fn likert_summary(rows: &[TrialRow]) -> Result<Vec<LikertCounts>, AnalysisError> {
    let mut per_session: BTreeMap<(&str, FeedbackCondition), Vec<&TrialRow>> = BTreeMap::new();
    for row in rows {
        per_session
            .entry((row.session_id.as_str(), row.condition))
            .or_default()
            .push(row);
    }
    let mut out = Vec::new();
    for condition in FeedbackCondition::ALL {
        for item in SurveyItem::ALL {
            let mut counts = LikertCounts {
                condition,
                item,
                disagree: 0,
                neutral: 0,
                agree: 0,
            };
            for ((_, cond), trials) in &per_session {
                if *cond != condition {
                    continue;
                }
                let ratings: Vec<u8> = trials.iter().filter_map(|t| t.rating(item)).collect();
                let Some(mode) = per_participant_mode(&ratings) else {
                    continue;
                };
                match collapse_likert(mode)? {
                    LikertLevel::Disagree => counts.disagree += 1,
                    LikertLevel::Neutral => counts.neutral += 1,
                    LikertLevel::Agree => counts.agree += 1,
                }
            }
            if counts.total() > 0 {
                out.push(counts);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse() {
        let levels: Vec<_> = (1..=5).map(|r| collapse_likert(r).unwrap()).collect();
        use LikertLevel::*;
        assert_eq!(levels, [Disagree, Disagree, Neutral, Agree, Agree]);
        assert_eq!(collapse_likert(0), Err(AnalysisError::RatingOutOfRange(0)));
        assert_eq!(collapse_likert(6), Err(AnalysisError::RatingOutOfRange(6)));
    }

    #[test]
    fn modes() {
        assert_eq!(per_participant_mode(&[4, 4, 5]), Some(4));
        assert_eq!(per_participant_mode(&[2, 2, 4, 4]), Some(2));
        assert_eq!(per_participant_mode(&[4, 2, 4, 2]), Some(2));
        assert_eq!(per_participant_mode(&[3]), Some(3));
        assert_eq!(per_participant_mode(&[]), None);
    }
}
