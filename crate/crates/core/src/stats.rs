//! Closed-form effect estimators and design statistics.
//!
//! All sums go through [`canonical_sum`]: terms are sorted, then added
//! pairwise. The result depends only on the multiset of terms, so every
//! statistic here is bit-for-bit invariant under reordering of seeds.

use serde::{Deserialize, Serialize};

use crate::data::PairedDataset;
use crate::error::{Error, Result};
use crate::inference::special::{check_alpha, normal_cdf, student_t_quantile, two_sided_z};

/// Relative tolerance under which `σ₁ ≈ σ₀` and the simplified effective
/// sample size `r / (1 - ρ)` is reported alongside the exact one.
pub const SIGMA_EQUALITY_TOL: f64 = 1e-2;

/// Evaluation design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    Paired,
    Independent,
}

impl Design {
    pub fn as_str(self) -> &'static str {
        match self {
            Design::Paired => "paired",
            Design::Independent => "independent",
        }
    }
}

/// Quantile family used for confidence bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// `Δ̂ ± z_{1-α/2}·SE`.
    #[default]
    Normal,
    /// Student-t critical value; df = n − 1 (paired) or Welch (independent).
    StudentT,
}

/// A point estimate of `Δ` with its standard error and symmetric interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub delta: f64,
    pub se: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub design: Design,
    /// Seeds contributing to the treatment column.
    pub n: usize,
    /// Seeds contributing to the control column; equals `n` for paired data.
    pub n_control: usize,
    pub alpha: f64,
    #[serde(default)]
    pub interval: IntervalKind,
}

impl EffectEstimate {
    pub fn half_width(&self) -> f64 {
        self.ci_upper - self.delta
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_lower <= value && value <= self.ci_upper
    }
}

/// Sample moments of a paired dataset (denominator `n − 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignStats {
    pub n: usize,
    pub sigma1: f64,
    pub sigma0: f64,
    pub cov: f64,
    pub rho: f64,
}

impl DesignStats {
    /// Builds stats from population-style moments; `cov = ρ·σ₁·σ₀`.
    pub fn from_moments(n: usize, sigma1: f64, sigma0: f64, rho: f64) -> Result<Self> {
        if !(sigma1 > 0.0 && sigma1.is_finite() && sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(Error::DegenerateVariance {
                sigma1,
                sigma0,
                cov: rho * sigma1 * sigma0,
            });
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidDataset(format!("rho must lie in [-1, 1], got {rho}")));
        }
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(Self {
            n,
            sigma1,
            sigma0,
            cov: rho * sigma1 * sigma0,
            rho,
        })
    }

    /// `σ₁² + σ₀² − 2ρσ₁σ₀`, written so it cannot go negative for `ρ ≤ 1`.
    pub fn diff_variance(&self) -> f64 {
        let gap = self.sigma1 - self.sigma0;
        (gap * gap + 2.0 * self.sigma1 * self.sigma0 * (1.0 - self.rho)).max(0.0)
    }

    pub fn sum_variance(&self) -> f64 {
        self.sigma1 * self.sigma1 + self.sigma0 * self.sigma0
    }
}

/// Estimator variances under both designs and their gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceDecomposition {
    pub var_ind: f64,
    pub var_pair: f64,
    pub reduction: f64,
}

/// Effective number of independent runs matching a paired design's precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssResult {
    /// Total runs `r = 2n`.
    pub r: usize,
    pub r_eff: f64,
    pub ratio: f64,
    /// `r / (1 − ρ)`, present only when `σ₁ ≈ σ₀` within [`SIGMA_EQUALITY_TOL`].
    pub simplified: Option<f64>,
}

// ---------------------------------------------------------------------------
// Summation and moments

/// Order-independent sum: sort by total order, then pairwise accumulate.
pub fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    pairwise_sum(&terms)
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    canonical_sum(xs.to_vec()) / xs.len() as f64
}

/// Unbiased sample variance; caller guarantees `len ≥ 2`.
pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let sq = xs.iter().map(|x| (x - m) * (x - m)).collect();
    canonical_sum(sq) / (xs.len() - 1) as f64
}

pub(crate) fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let prods = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    canonical_sum(prods) / (xs.len() - 1) as f64
}

// ---------------------------------------------------------------------------
// Estimators

/// Paired estimator: mean within-seed difference, SE from the spread of the
/// differences.
///
/// The point estimate is evaluated as `mean(y1) − mean(y0)`, algebraically
/// equal to the mean difference, so it agrees bit-for-bit with
/// [`estimate_independent`] on the same columns.
pub fn estimate_paired(data: &PairedDataset, alpha: f64) -> Result<EffectEstimate> {
    estimate_paired_with(data, alpha, IntervalKind::Normal)
}

pub fn estimate_paired_with(
    data: &PairedDataset,
    alpha: f64,
    interval: IntervalKind,
) -> Result<EffectEstimate> {
    check_alpha(alpha)?;
    let n = data.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if n < 2 {
        return Err(Error::DegenerateSe { n });
    }
    let delta = mean(data.y1()) - mean(data.y0());
    let se = (sample_variance(&data.differences()) / n as f64).sqrt();
    let crit = critical_value(alpha, interval, (n - 1) as f64)?;
    Ok(build_estimate(delta, se, crit, Design::Paired, n, n, alpha, interval))
}

/// Difference in means treating the two columns as unrelated samples.
pub fn estimate_independent(y1: &[f64], y0: &[f64], alpha: f64) -> Result<EffectEstimate> {
    estimate_independent_with(y1, y0, alpha, IntervalKind::Normal)
}

pub fn estimate_independent_with(
    y1: &[f64],
    y0: &[f64],
    alpha: f64,
    interval: IntervalKind,
) -> Result<EffectEstimate> {
    check_alpha(alpha)?;
    if y1.is_empty() || y0.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if y1.iter().chain(y0).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue {
            location: "estimator input".into(),
        });
    }
    let (n1, n0) = (y1.len(), y0.len());
    if n1 < 2 || n0 < 2 {
        return Err(Error::DegenerateSe { n: n1.min(n0) });
    }
    let delta = mean(y1) - mean(y0);
    let (a, b) = (sample_variance(y1) / n1 as f64, sample_variance(y0) / n0 as f64);
    let se = (a + b).sqrt();
    let df = welch_df(a, b, n1, n0);
    let crit = critical_value(alpha, interval, df)?;
    Ok(build_estimate(delta, se, crit, Design::Independent, n1, n0, alpha, interval))
}

fn welch_df(a: f64, b: f64, n1: usize, n0: usize) -> f64 {
    let den = a * a / (n1 - 1) as f64 + b * b / (n0 - 1) as f64;
    if den > 0.0 {
        (a + b) * (a + b) / den
    } else {
        (n1 + n0 - 2) as f64
    }
}

fn critical_value(alpha: f64, interval: IntervalKind, df: f64) -> Result<f64> {
    match interval {
        IntervalKind::Normal => two_sided_z(alpha),
        IntervalKind::StudentT => student_t_quantile(1.0 - alpha / 2.0, df),
    }
}

#[allow(clippy::too_many_arguments)]
fn build_estimate(
    delta: f64,
    se: f64,
    crit: f64,
    design: Design,
    n: usize,
    n_control: usize,
    alpha: f64,
    interval: IntervalKind,
) -> EffectEstimate {
    let h = crit * se;
    EffectEstimate {
        delta,
        se,
        ci_lower: delta - h,
        ci_upper: delta + h,
        design,
        n,
        n_control,
        alpha,
        interval,
    }
}

// ---------------------------------------------------------------------------
// Design statistics

/// Sample standard deviations, covariance and Pearson correlation.
///
/// A constant column makes `ρ` undefined; that is reported as
/// [`Error::DegenerateVariance`] carrying the moments that do exist.
pub fn design_stats(data: &PairedDataset) -> Result<DesignStats> {
    let n = data.len();
    if n < 2 {
        return Err(Error::TooFewSeeds {
            needed: 2,
            available: n,
        });
    }
    let sigma1 = sample_variance(data.y1()).sqrt();
    let sigma0 = sample_variance(data.y0()).sqrt();
    let cov = sample_covariance(data.y1(), data.y0());
    if sigma1 == 0.0 || sigma0 == 0.0 {
        return Err(Error::DegenerateVariance { sigma1, sigma0, cov });
    }
    let rho = (cov / (sigma1 * sigma0)).clamp(-1.0, 1.0);
    Ok(DesignStats {
        n,
        sigma1,
        sigma0,
        cov,
        rho,
    })
}

/// `Var(Δ̂_ind)`, `Var(Δ̂_pair)` and their difference `(2/n)·Cov`.
pub fn variance_decomposition(stats: &DesignStats) -> VarianceDecomposition {
    let n = stats.n as f64;
    let var_ind = stats.sum_variance() / n;
    let s = stats.sigma1 * stats.sigma0;
    let gap = stats.sigma1 - stats.sigma0;
    let var_pair = (gap * gap + 2.0 * (s - stats.cov)).max(0.0) / n;
    VarianceDecomposition {
        var_ind,
        var_pair,
        reduction: 2.0 * stats.cov / n,
    }
}

/// `(2/n)·ρ·σ₁·σ₀`. Negative when pairing hurts; reported as is.
pub fn variance_reduction(stats: &DesignStats) -> f64 {
    2.0 / stats.n as f64 * stats.rho * stats.sigma1 * stats.sigma0
}

/// Rescales an independent-design SE to the paired design at the same budget.
pub fn paired_se_from_independent(se_ind: f64, stats: &DesignStats) -> Result<f64> {
    if !(se_ind >= 0.0) || !se_ind.is_finite() {
        return Err(Error::NonpositiveSe(se_ind));
    }
    // 1 − 2ρσ₁σ₀/(σ₁² + σ₀²) = [(σ₁ − σ₀)² + 2σ₁σ₀(1 − ρ)] / (σ₁² + σ₀²)
    let radicand = stats.diff_variance() / stats.sum_variance();
    debug_assert!(radicand >= 0.0, "radicand {radicand} negative");
    Ok(se_ind * radicand.sqrt())
}

/// `z_{1−α/2}·SE`.
pub fn ci_half_width(se: f64, alpha: f64) -> Result<f64> {
    Ok(two_sided_z(alpha)? * se)
}

/// Normal-approximation power `1 − Φ(z_{1−α/2} − |Δ|/SE)`.
///
/// Only the upper rejection tail is counted, so at `Δ = 0` this gives `α/2`
/// rather than `α`. The missing lower tail is `Φ(−z − |Δ|/SE)`, negligible
/// once `|Δ|/SE` exceeds about 1.
pub fn power_normal_approx(delta_abs: f64, se: f64, alpha: f64) -> Result<f64> {
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::NonpositiveSe(se));
    }
    let z = two_sided_z(alpha)?;
    Ok(normal_cdf(delta_abs.abs() / se - z).clamp(0.0, 1.0))
}

/// Number of independent runs with the same estimator variance as `r`
/// paired runs.
pub fn effective_sample_size(r: usize, stats: &DesignStats) -> Result<EssResult> {
    if r == 0 || !r.is_multiple_of(2) {
        return Err(Error::OddRunCount(r));
    }
    let den = stats.diff_variance();
    if !(den > 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    let rf = r as f64;
    let r_eff = rf * stats.sum_variance() / den;
    let gap = (stats.sigma1 - stats.sigma0).abs() / stats.sigma1.max(stats.sigma0);
    let simplified = (gap <= SIGMA_EQUALITY_TOL && stats.rho < 1.0).then(|| rf / (1.0 - stats.rho));
    Ok(EssResult {
        r,
        r_eff,
        ratio: r_eff / rf,
        simplified,
    })
}

/// Estimator variance for a budget of `r` runs (`r/2` seeds per regime).
pub fn variance_in_runs(design: Design, r: usize, stats: &DesignStats) -> Result<f64> {
    if r == 0 || !r.is_multiple_of(2) {
        return Err(Error::OddRunCount(r));
    }
    let seeds = (r / 2) as f64;
    Ok(match design {
        Design::Paired => stats.diff_variance() / seeds,
        Design::Independent => stats.sum_variance() / seeds,
    })
}
