use proptest::prelude::*;
use quadcoach_core::analysis::{
    collapse_likert, fisher_exact, kruskal_wallis, kruskal_wallis_permutation_p, landing_table,
    per_participant_mode, t_test, LikertLevel, SurveyResponse, TrialRow,
};
use quadcoach_core::feedback::FeedbackCondition;
use quadcoach_core::sim::LandingOutcome;

fn choose(n: u64, k: u64) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * u128::from(n - i) / u128::from(i + 1);
    }
    r
}

/// Two-sided Fisher p by listing every table with the observed margins, in
/// exact integer arithmetic.
fn fisher_by_enumeration(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let weight = |x: u64| choose(r1, x) * choose(r2, c1 - x);
    let observed = weight(a);
    let (mut extreme, mut total) = (0u128, 0u128);
    for x in c1.saturating_sub(r2)..=r1.min(c1) {
        let w = weight(x);
        total += w;
        if w <= observed {
            extreme += w;
        }
    }
    extreme as f64 / total as f64
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|u| *u < v).count() as f64;
            let equal = values.iter().filter(|u| *u == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// H as the ratio of between-group to total rank variance, which equals the
/// tie-corrected statistic.
fn h_by_variance(groups: &[Vec<f64>]) -> f64 {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let ranks = average_ranks(&pooled);
    let n = pooled.len() as f64;
    let grand = ranks.iter().sum::<f64>() / n;
    let total: f64 = ranks.iter().map(|r| (r - grand).powi(2)).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut offset = 0;
    let mut between = 0.0;
    for g in groups {
        let mean = ranks[offset..offset + g.len()].iter().sum::<f64>() / g.len() as f64;
        between += g.len() as f64 * (mean - grand).powi(2);
        offset += g.len();
    }
    (n - 1.0) * between / total
}

/// Permutation p over all orderings of the pooled sample (Heap's algorithm).
fn permutation_p_by_orderings(groups: &[Vec<f64>]) -> f64 {
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let mut pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let split = |values: &[f64]| {
        let mut out = Vec::new();
        let mut offset = 0;
        for s in &sizes {
            out.push(values[offset..offset + s].to_vec());
            offset += s;
        }
        h_by_variance(&out)
    };
    let observed = split(&pooled);
    let n = pooled.len();
    let mut c = vec![0usize; n];
    let (mut hits, mut total) = (0u64, 0u64);
    let mut visit = |values: &[f64]| {
        total += 1;
        if split(values) >= observed - 1e-9 {
            hits += 1;
        }
    };
    visit(&pooled);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                pooled.swap(0, i);
            } else {
                pooled.swap(c[i], i);
            }
            visit(&pooled);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}

fn arb_groups(max_groups: usize, max_size: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        prop::collection::vec((0i32..6).prop_map(f64::from), 1..=max_size),
        2..=max_groups,
    )
    .prop_filter("need three observations", |g| {
        g.iter().map(Vec::len).sum::<usize>() >= 3
    })
}

fn arb_sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, 2..30)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fisher_matches_enumeration(a in 0u64..25, b in 0u64..25, c in 0u64..25, d in 0u64..25) {
        prop_assume!(a + b > 0 && c + d > 0 && a + c > 0 && b + d > 0);
        let p = fisher_exact(a, b, c, d).unwrap().p_value;
        let expected = fisher_by_enumeration(a, b, c, d);
        prop_assert!((p - expected).abs() <= 1e-9, "{p} vs {expected}");
    }

    #[test]
    fn fisher_ignores_orientation(a in 0u64..40, b in 0u64..40, c in 0u64..40, d in 0u64..40) {
        prop_assume!(a + b > 0 && c + d > 0 && a + c > 0 && b + d > 0);
        let p = fisher_exact(a, b, c, d).unwrap().p_value;
        for (w, x, y, z) in [(d, c, b, a), (c, d, a, b), (b, a, d, c), (a, c, b, d)] {
            let q = fisher_exact(w, x, y, z).unwrap().p_value;
            prop_assert!((p - q).abs() <= 1e-12, "{p} vs {q}");
        }
    }

    #[test]
    fn t_is_antisymmetric(a in arb_sample(), b in arb_sample()) {
        let ab = t_test(&a, &b).unwrap();
        let ba = t_test(&b, &a).unwrap();
        prop_assert_eq!(ab.statistic, -ba.statistic);
        prop_assert_eq!(ab.p_value, ba.p_value);
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
        prop_assert_eq!(ab.df, Some((a.len() + b.len() - 2) as f64));
    }

    #[test]
    fn t_ignores_common_shift(a in arb_sample(), b in arb_sample(), k in -100.0..100.0f64) {
        let plain = t_test(&a, &b).unwrap().statistic;
        let a2: Vec<f64> = a.iter().map(|v| v + k).collect();
        let b2: Vec<f64> = b.iter().map(|v| v + k).collect();
        let shifted = t_test(&a2, &b2).unwrap().statistic;
        prop_assert!((plain - shifted).abs() <= 1e-9 * plain.abs().max(1.0), "{plain} vs {shifted}");
    }

    #[test]
    fn kw_matches_variance_form(groups in arb_groups(4, 6)) {
        let refs: Vec<&[f64]> = groups.iter().map(Vec::as_slice).collect();
        let r = kruskal_wallis(&refs).unwrap();
        let expected = h_by_variance(&groups);
        prop_assert!((r.statistic - expected).abs() <= 1e-9 * expected.max(1.0), "{} vs {expected}", r.statistic);
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        prop_assert_eq!(r.df, Some((groups.len() - 1) as f64));
    }

    #[test]
    fn kw_ignores_monotone_transforms(groups in arb_groups(4, 6), scale in 0.1..10.0f64) {
        let refs: Vec<&[f64]> = groups.iter().map(Vec::as_slice).collect();
        let plain = kruskal_wallis(&refs).unwrap();
        let warped: Vec<Vec<f64>> =
            groups.iter().map(|g| g.iter().map(|v| (v * scale).exp() - 7.0).collect()).collect();
        let refs: Vec<&[f64]> = warped.iter().map(Vec::as_slice).collect();
        prop_assert_eq!(kruskal_wallis(&refs).unwrap(), plain);
    }

    #[test]
    fn improvement_is_the_half_difference(
        cohort in prop::collection::vec(prop::collection::vec(0u8..3, 20), 1..12),
    ) {
        let outcomes = [LandingOutcome::Safe, LandingOutcome::Unsafe, LandingOutcome::Crash];
        let rows: Vec<TrialRow> = cohort
            .iter()
            .enumerate()
            .flat_map(|(p, trials)| {
                trials.iter().enumerate().map(move |(i, o)| {
                    TrialRow::new(format!("p{p:02}"), FeedbackCondition::Multimodal, i as u32 + 1, outcomes[*o as usize], 30.0)
                })
            })
            .collect();
        let table = landing_table(&rows);
        let row = table.get(FeedbackCondition::Multimodal).unwrap();
        prop_assert_eq!(row.participants, cohort.len());
        for cols in [row.safe, row.safe_or_unsafe] {
            prop_assert_eq!(cols.improvement.mean, cols.second_half.mean - cols.first_half.mean);
        }
    }

    #[test]
    fn mode_is_most_frequent_then_smallest(ratings in prop::collection::vec(1u8..=5, 1..15)) {
        let mode = per_participant_mode(&ratings).unwrap();
        let count = |r: u8| ratings.iter().filter(|x| **x == r).count();
        for r in 1..=5u8 {
            prop_assert!(count(r) <= count(mode));
            if r < mode {
                prop_assert!(count(r) < count(mode));
            }
        }
    }

    #[test]
    fn rows_round_trip_through_json(
        index in 1u32..=20,
        duration in 0.0..120.0f64,
        review in prop::option::of((0.0..600.0f64, 1u8..=5)),
    ) {
        let mut row = TrialRow::new("abc", FeedbackCondition::Text, index, LandingOutcome::Unsafe, duration);
        if let Some((seconds, r)) = review {
            row = row.with_survey(SurveyResponse { timely: 6 - r, ..SurveyResponse::uniform(r) }, seconds);
        }
        let line = serde_json::to_string(&row).unwrap();
        prop_assert_eq!(serde_json::from_str::<TrialRow>(&line).unwrap(), row);
    }
}

#[test]
fn kw_permutation_p_matches_orderings() {
    let cases: Vec<Vec<Vec<f64>>> = vec![
        vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0]],
        vec![vec![1.0, 1.0, 2.0], vec![2.0, 3.0], vec![3.0, 3.0, 4.0]],
        vec![vec![0.5, 2.0, 2.0, 7.0], vec![1.0, 3.0, 9.0, 9.0]],
        vec![vec![4.0], vec![1.0, 2.0, 3.0, 5.0, 6.0, 7.0]],
    ];
    for groups in cases {
        let refs: Vec<&[f64]> = groups.iter().map(Vec::as_slice).collect();
        let ours = kruskal_wallis_permutation_p(&refs).unwrap();
        let expected = permutation_p_by_orderings(&groups);
        assert!(
            (ours - expected).abs() < 1e-12,
            "{groups:?}: {ours} vs {expected}"
        );
    }
}

#[test]
fn collapse_is_onto_and_ordered() {
    let levels: Vec<LikertLevel> = (1..=5).map(|r| collapse_likert(r).unwrap()).collect();
    assert!(levels.windows(2).all(|w| w[0] <= w[1]));
    for level in [
        LikertLevel::Disagree,
        LikertLevel::Neutral,
        LikertLevel::Agree,
    ] {
        assert!(levels.contains(&level));
    }
}

#[test]
fn fisher_reported_table() {
    let ours = fisher_exact(2, 54, 8, 47).unwrap().p_value;
    assert!((ours - fisher_by_enumeration(2, 54, 8, 47)).abs() < 1e-12);
    assert!((0.03..=0.06).contains(&ours));
}
