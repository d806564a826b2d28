use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::landing::{mean, sample_variance};
use super::special::{chi_square_sf, ln_choose, student_t_two_sided};
use super::AnalysisError;

/// Relative slack when comparing table probabilities against the observed one.
const FISHER_REL_TOL: f64 = 1e-7;

/// Largest pooled sample size accepted by the permutation test.
pub const PERMUTATION_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    FisherExact,
    PooledT,
    KruskalWallis,
}

impl TestKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::FisherExact => "fisher-exact",
            TestKind::PooledT => "pooled-t",
            TestKind::KruskalWallis => "kruskal-wallis",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: TestKind,
    /// Odds ratio for Fisher, t for the t-test, H for Kruskal-Wallis.
    pub statistic: f64,
    pub df: Option<f64>,
    pub p_value: f64,
}

/// Two-sided Fisher exact test on the table `[[a, b], [c, d]]`.
///
/// Sums the hypergeometric probabilities of every table with the same
/// margins that is no more likely than the observed one.
pub fn fisher_exact(a: u64, b: u64, c: u64, d: u64) -> Result<TestResult, AnalysisError> {
    let (r1, r2, c1, c2) = (a + b, c + d, a + c, b + d);
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return Err(AnalysisError::ZeroMargin);
    }
    let n = r1 + r2;
    let ln_total = ln_choose(n, c1);
    let ln_p = |x: u64| ln_choose(r1, x) + ln_choose(r2, c1 - x) - ln_total;
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let observed = ln_p(a);
    let cutoff = observed + libm::log1p(FISHER_REL_TOL);
    let p: f64 = (lo..=hi)
        .map(ln_p)
        .filter(|lp| *lp <= cutoff)
        .map(libm::exp)
        .sum();
    let odds = (a as f64 * d as f64) / (b as f64 * c as f64);
    Ok(TestResult {
        test: TestKind::FisherExact,
        statistic: odds,
        df: None,
        p_value: p.clamp(0.0, 1.0),
    })
}

/// Pooled-variance two-sample t-test, two-sided.
pub fn t_test(group_a: &[f64], group_b: &[f64]) -> Result<TestResult, AnalysisError> {
    for (label, g) in [("a", group_a), ("b", group_b)] {
        if g.len() < 2 {
            return Err(AnalysisError::TooFewSamples {
                group: label,
                n: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(AnalysisError::NonFinite);
        }
    }
    let (na, nb) = (group_a.len() as f64, group_b.len() as f64);
    let df = na + nb - 2.0;
    let pooled =
        ((na - 1.0) * sample_variance(group_a) + (nb - 1.0) * sample_variance(group_b)) / df;
    let diff = mean(group_a) - mean(group_b);
    let (t, p) = if pooled == 0.0 {
        if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(diff), 0.0)
        }
    } else {
        let t = diff / libm::sqrt(pooled * (1.0 / na + 1.0 / nb));
        (t, student_t_two_sided(t, df))
    };
    Ok(TestResult {
        test: TestKind::PooledT,
        statistic: t,
        df: Some(df),
        p_value: p,
    })
}

/// Average ranks (1-based) of the pooled values, in input order.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

fn check_groups(groups: &[&[f64]]) -> Result<usize, AnalysisError> {
    if groups.len() < 2 {
        return Err(AnalysisError::TooFewGroups(groups.len()));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(AnalysisError::EmptyGroup);
    }
    if groups.iter().flat_map(|g| g.iter()).any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    let n: usize = groups.iter().map(|g| g.len()).sum();
    if n < 3 {
        return Err(AnalysisError::TooFewObservations(n));
    }
    Ok(n)
}

/// Sum over groups of `R_i^2 / n_i` given per-observation ranks laid out
/// group after group.
fn rank_sum_term(ranks: &[f64], sizes: &[usize]) -> f64 {
    let mut offset = 0;
    let mut total = 0.0;
    for &size in sizes {
        let r: f64 = ranks[offset..offset + size].iter().sum();
        total += r * r / size as f64;
        offset += size;
    }
    total
}

/// Kruskal-Wallis H with tie correction and a chi-square p-value.
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<TestResult, AnalysisError> {
    let n = check_groups(groups)?;
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let ranks = average_ranks(&pooled);
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let df = (groups.len() - 1) as f64;
    let correction = 1.0 - tie_sum(&pooled) / ((n * n * n - n) as f64);
    if correction <= 0.0 {
        return Ok(TestResult {
            test: TestKind::KruskalWallis,
            statistic: 0.0,
            df: Some(df),
            p_value: 1.0,
        });
    }
    let nf = n as f64;
    let h =
        (12.0 / (nf * (nf + 1.0)) * rank_sum_term(&ranks, &sizes) - 3.0 * (nf + 1.0)) / correction;
    let h = h.max(0.0);
    Ok(TestResult {
        test: TestKind::KruskalWallis,
        statistic: h,
        df: Some(df),
        p_value: chi_square_sf(h, df),
    })
}

/// Sum of `t^3 - t` over tie groups.
fn tie_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        total += t * t * t - t;
        start = end;
    }
    total
}

/// Exact permutation p-value for the Kruskal-Wallis statistic: the share of
/// all assignments of the pooled observations to groups of the observed
/// sizes whose statistic is at least the observed one.
pub fn kruskal_wallis_permutation_p(groups: &[&[f64]]) -> Result<f64, AnalysisError> {
    let n = check_groups(groups)?;
    if n > PERMUTATION_MAX_N {
        return Err(AnalysisError::PermutationTooLarge(n));
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let ranks = average_ranks(&pooled);
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let observed = rank_sum_term(&ranks, &sizes);
    let tol = 1e-9 * observed.abs().max(1.0);

    let mut remaining = sizes.clone();
    let mut sums = alloc::vec![0.0; sizes.len()];
    let mut hits = 0u64;
    let mut total = 0u64;
    assign(0, &ranks, &sizes, &mut remaining, &mut sums, &mut |sums| {
        let stat: f64 = sums
            .iter()
            .zip(&sizes)
            .map(|(r, s)| r * r / *s as f64)
            .sum();
        total += 1;
        if stat >= observed - tol {
            hits += 1;
        }
    });
    Ok(hits as f64 / total as f64)
}

fn assign(
    i: usize,
    ranks: &[f64],
    sizes: &[usize],
    remaining: &mut [usize],
    sums: &mut [f64],
    visit: &mut dyn FnMut(&[f64]),
) {
    if i == ranks.len() {
        visit(sums);
        return;
    }
    for g in 0..sizes.len() {
        if remaining[g] > 0 {
            remaining[g] -= 1;
            sums[g] += ranks[i];
            assign(i + 1, ranks, sizes, remaining, sums, visit);
            sums[g] -= ranks[i];
            remaining[g] += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fisher_reference_values() {
        // two-sided p for [[2,54],[8,47]] from an independent implementation
        let r = fisher_exact(2, 54, 8, 47).unwrap();
        assert!((r.p_value - 0.052_630_2).abs() < 1e-6, "{}", r.p_value);
        assert_eq!(fisher_exact(5, 5, 5, 5).unwrap().p_value, 1.0);
        assert_eq!(fisher_exact(0, 0, 3, 4), Err(AnalysisError::ZeroMargin));
        assert_eq!(fisher_exact(0, 3, 0, 4), Err(AnalysisError::ZeroMargin));
    }

    #[test]
    fn fisher_small_table_by_hand() {
        // margins 3/3 and 3/3: tables x=0..3 have weights 1, 9, 9, 1 over 20
        let r = fisher_exact(3, 0, 0, 3).unwrap();
        assert!((r.p_value - 2.0 / 20.0).abs() < 1e-12);
        let r = fisher_exact(2, 1, 1, 2).unwrap();
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert!(r.statistic == 4.0);
    }

    #[test]
    fn t_by_hand() {
        // means 1 and 2, both variances 2: pooled 2, se sqrt(2 * (1/2 + 1/2))
        let r = t_test(&[0.0, 2.0], &[1.0, 3.0]).unwrap();
        let t = -1.0 / libm::sqrt(2.0);
        assert!((r.statistic - t).abs() < 1e-15);
        assert_eq!(r.df, Some(2.0));
        // df 2: two-sided p = 1 - |t| / sqrt(2 + t^2)
        let p = 1.0 - t.abs() / libm::sqrt(2.0 + t * t);
        assert!((r.p_value - p).abs() < 1e-12);
    }

    #[test]
    fn t_degenerate() {
        let r = t_test(&[1.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        let r = t_test(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!((r.statistic, r.p_value), (f64::NEG_INFINITY, 0.0));
        assert!(matches!(
            t_test(&[1.0], &[1.0, 2.0]),
            Err(AnalysisError::TooFewSamples { group: "a", n: 1 })
        ));
    }

    #[test]
    fn kw_by_hand() {
        // rank sums 6, 15, 24 over N = 9: 12/90 * (36 + 225 + 576)/3 - 30 = 7.2
        let r = kruskal_wallis(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 9.0]]).unwrap();
        assert!((r.statistic - 7.2).abs() < 1e-12);
        assert!((r.p_value - libm::exp(-3.6)).abs() < 1e-12);
        let r = kruskal_wallis(&[&[2.0, 2.0], &[2.0], &[2.0, 2.0]]).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn kw_ties_by_hand() {
        // pooled 1,1,2,3: ranks 1.5,1.5,3,4. Groups {1,1} and {2,3}:
        // raw 12/20 * (9/2 + 49/2) - 15 = 2.4, tie correction 1 - 6/60 = 0.9
        let r = kruskal_wallis(&[&[1.0, 1.0], &[2.0, 3.0]]).unwrap();
        assert!((r.statistic - 2.4 / 0.9).abs() < 1e-12);
    }

    #[test]
    fn permutation_extreme() {
        // only the 3! label swaps of a perfect separation reach the maximum
        let p =
            kruskal_wallis_permutation_p(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 9.0]])
                .unwrap();
        assert!((p - 6.0 / 1680.0).abs() < 1e-15);
        let big = [0.0; 7];
        assert_eq!(
            kruskal_wallis_permutation_p(&[&big, &big]),
            Err(AnalysisError::PermutationTooLarge(14))
        );
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }
}
