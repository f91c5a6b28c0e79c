use serde::{Deserialize, Serialize};

use super::special::{normal_sf, student_t_two_sided_p};
use crate::data::PairedDataset;
use crate::error::{Error, Result};
use crate::stats::{mean, sample_variance, DesignStats};

/// Largest number of non-zero differences for which the signed-rank
/// p-value is computed by full enumeration (2^20 sign assignments).
pub const WILCOXON_EXACT_MAX_M: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    PairedT,
    WilcoxonSignedRankExact,
    WilcoxonSignedRankNormal,
    PearsonT,
}

/// Outcome of a two-sided test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom for t-based tests, number of non-zero differences
    /// for signed-rank tests.
    pub df_or_n: f64,
    pub method: TestMethod,
}

/// Paired t-test on the within-seed differences, `df = n − 1`.
pub fn paired_t_test(data: &PairedDataset) -> Result<TestResult> {
    let n = data.len();
    if n < 2 {
        return Err(Error::TooFewSeeds {
            needed: 2,
            available: n,
        });
    }
    let d = data.differences();
    let var = sample_variance(&d);
    if var == 0.0 {
        return Err(Error::DegenerateDifferences);
    }
    let t = mean(&d) / (var / n as f64).sqrt();
    let df = (n - 1) as f64;
    Ok(TestResult {
        statistic: t,
        p_value: student_t_two_sided_p(t, df),
        df_or_n: df,
        method: TestMethod::PairedT,
    })
}

/// Wilcoxon signed-rank test.
///
/// Zero differences are dropped; tied magnitudes get midranks. The statistic
/// is the rank sum of positive differences. Up to [`WILCOXON_EXACT_MAX_M`]
/// non-zero differences the two-sided p-value is exact,
/// `min(1, 2·min(P(W ≤ w), P(W ≥ w)))`, by enumerating every sign assignment;
/// beyond that a continuity-corrected normal approximation with tie-adjusted
/// variance is used.
pub fn wilcoxon_signed_rank(data: &PairedDataset) -> Result<TestResult> {
    let nonzero: Vec<f64> = data.differences().into_iter().filter(|d| *d != 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::AllZeroDifferences);
    }
    let m = nonzero.len();
    let ranks = doubled_midranks(&nonzero);
    let w2: u64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let statistic = w2 as f64 / 2.0;

    if m <= WILCOXON_EXACT_MAX_M {
        let (le, ge) = enumerate_tails(&ranks, w2);
        let total = (1u64 << m) as f64;
        let p = (2.0 * le.min(ge) as f64 / total).min(1.0);
        return Ok(TestResult {
            statistic,
            p_value: p,
            df_or_n: m as f64,
            method: TestMethod::WilcoxonSignedRankExact,
        });
    }

    let mf = m as f64;
    let mean_w = mf * (mf + 1.0) / 4.0;
    let tie_term: f64 = tie_group_sizes(&nonzero)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var_w = mf * (mf + 1.0) * (2.0 * mf + 1.0) / 24.0 - tie_term / 48.0;
    let z = ((statistic - mean_w).abs() - 0.5).max(0.0) / var_w.sqrt();
    Ok(TestResult {
        statistic,
        p_value: (2.0 * normal_sf(z)).min(1.0),
        df_or_n: mf,
        method: TestMethod::WilcoxonSignedRankNormal,
    })
}

/// Ranks of `|d|` times two, so midranks stay integral.
pub(crate) fn doubled_midranks(d: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()));
    let mut ranks = vec![0u64; d.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && d[order[j + 1]].abs() == d[order[i]].abs() {
            j += 1;
        }
        // positions i..=j hold 1-based ranks i+1..=j+1; midrank*2 = i + j + 2
        let r2 = (i + j + 2) as u64;
        for &k in &order[i..=j] {
            ranks[k] = r2;
        }
        i = j + 1;
    }
    ranks
}

fn tie_group_sizes(d: &[f64]) -> Vec<usize> {
    let mut mags: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < mags.len() {
        let mut j = i;
        while j + 1 < mags.len() && mags[j + 1] == mags[i] {
            j += 1;
        }
        sizes.push(j - i + 1);
        i = j + 1;
    }
    sizes
}

// Counts sign assignments whose positive-rank sum is ≤ and ≥ the observed
// one. Walks all 2^m subsets in Gray-code order so each step flips one sign.
fn enumerate_tails(ranks: &[u64], observed: u64) -> (u64, u64) {
    let m = ranks.len();
    let mut sum = 0u64;
    let (mut le, mut ge) = (1u64, u64::from(observed == 0));
    let mut included = 0u64;
    for k in 1u64..(1u64 << m) {
        let bit = k.trailing_zeros() as usize;
        let mask = 1u64 << bit;
        if included & mask == 0 {
            sum += ranks[bit];
        } else {
            sum -= ranks[bit];
        }
        included ^= mask;
        if sum <= observed {
            le += 1;
        }
        if sum >= observed {
            ge += 1;
        }
    }
    (le, ge)
}

/// Classical t-based test of `ρ = 0`, `df = n − 2`.
pub fn pearson_test(stats: &DesignStats) -> Result<TestResult> {
    if stats.n < 3 {
        return Err(Error::TooFewSeeds {
            needed: 3,
            available: stats.n,
        });
    }
    let rho = stats.rho;
    if rho.abs() >= 1.0 {
        return Err(Error::PerfectCorrelation { rho });
    }
    let df = (stats.n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    Ok(TestResult {
        statistic: t,
        p_value: student_t_two_sided_p(t, df),
        df_or_n: df,
        method: TestMethod::PearsonT,
    })
}
