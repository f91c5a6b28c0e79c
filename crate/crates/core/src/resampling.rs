//! Monte Carlo subsampling curves over evaluation budgets.
//!
//! For each budget of `r` runs (`n = r/2` seeds) the engine draws
//! `replicates` subsets of seeds without replacement and re-estimates the
//! effect under both designs. The spread of those estimates gives the
//! standard-error curve; interval, power and sign-agreement curves are
//! derived from the same draws.
//!
//! The independent design is emulated from paired data by drawing two
//! disjoint seed subsets per replicate, one supplying treatment outcomes and
//! the other control outcomes, so no within-seed correlation leaks in. That
//! needs `2n` distinct seeds; budgets above the available seed count get no
//! independent point. [`IndependentMode::Analytic`] instead uses the
//! closed-form unpaired SE for sensitivity checks.
//!
//! Replicate `k` at grid index `g` always reads random stream `(g, k)` under
//! `rng_seed`, so curves are bit-identical regardless of thread count.

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::PairedDataset;
use crate::error::{Error, Result};
use crate::inference::special::{check_alpha, normal_cdf, two_sided_z};
use crate::rng::{replicate_stream_id, stream};
use crate::stats::{estimate_paired, mean, power_normal_approx, sample_variance, Design};

pub const DEFAULT_REPLICATES: usize = 1000;

/// Power level whose first crossing is reported by [`power_curve`].
pub const POWER_TARGET: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependentMode {
    /// Disjoint treatment and control seed subsets per replicate.
    #[default]
    Disjoint,
    /// `sqrt((s₁² + s₀²) / n)` from the full-sample column variances.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleConfig {
    pub replicates: usize,
    pub rng_seed: u64,
    /// Run budgets `r` (even, strictly increasing). Empty means
    /// [`default_grid`].
    pub grid: Vec<usize>,
    pub alpha: f64,
    /// Minimum detectable effect for power curves.
    pub mde: f64,
    #[serde(default)]
    pub independent: IndependentMode,
}

impl Default for SubsampleConfig {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            rng_seed: 0,
            grid: Vec::new(),
            alpha: 0.05,
            mde: 0.0,
            independent: IndependentMode::Disjoint,
        }
    }
}

/// `r ∈ {4, 8, …}` up to `2·⌊n_available/2⌋`, feasible for both designs.
pub fn default_grid(n_available: usize) -> Vec<usize> {
    let cap = 2 * (n_available / 2);
    (1..).map(|k| 4 * k).take_while(|r| *r <= cap).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Se,
    CiHalfWidth,
    Power,
    SignAgreement,
}

impl Statistic {
    pub fn as_str(self) -> &'static str {
        match self {
            Statistic::Se => "se",
            Statistic::CiHalfWidth => "ci_half_width",
            Statistic::Power => "power",
            Statistic::SignAgreement => "sign_agreement",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "se" => Some(Statistic::Se),
            "ci_half_width" => Some(Statistic::CiHalfWidth),
            "power" => Some(Statistic::Power),
            "sign_agreement" => Some(Statistic::SignAgreement),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Total runs.
    pub r: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub statistic: Statistic,
    pub design: Design,
    pub points: Vec<CurvePoint>,
}

impl CurveSeries {
    pub fn value_at(&self, r: usize) -> Option<f64> {
        self.points.iter().find(|p| p.r == r).map(|p| p.value)
    }

    pub fn runs(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.r).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    fn map(&self, statistic: Statistic, f: impl Fn(usize, f64) -> f64) -> Self {
        Self {
            statistic,
            design: self.design,
            points: self
                .points
                .iter()
                .map(|p| CurvePoint {
                    r: p.r,
                    value: f(p.r, p.value),
                })
                .collect(),
        }
    }
}

/// Paired and independent series for one statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePair {
    pub paired: CurveSeries,
    pub independent: CurveSeries,
}

impl CurvePair {
    pub fn series(&self) -> [&CurveSeries; 2] {
        [&self.paired, &self.independent]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurves {
    pub curves: CurvePair,
    /// Smallest grid budget with power ≥ [`POWER_TARGET`].
    pub paired_crossing: Option<usize>,
    pub independent_crossing: Option<usize>,
}

// ---------------------------------------------------------------------------
// Replicate draws

struct GridDraws {
    r: usize,
    paired: Vec<f64>,
    /// `None` when the budget exceeds what disjoint subsets allow, or in
    /// analytic mode.
    independent: Option<Vec<f64>>,
}

/// Checks `cfg` against a dataset of `n_available` seeds and returns the
/// effective grid.
pub fn validate_config(cfg: &SubsampleConfig, n_available: usize) -> Result<Vec<usize>> {
    if n_available < 2 {
        return Err(Error::TooFewSeeds {
            needed: 2,
            available: n_available,
        });
    }
    check_alpha(cfg.alpha)?;
    if cfg.replicates < 2 {
        return Err(Error::InvalidConfig(format!(
            "replicates must be at least 2, got {}",
            cfg.replicates
        )));
    }
    if !(cfg.mde >= 0.0 && cfg.mde.is_finite()) {
        return Err(Error::InvalidConfig(format!("mde must be finite and ≥ 0, got {}", cfg.mde)));
    }
    let grid = if cfg.grid.is_empty() {
        default_grid(n_available)
    } else {
        cfg.grid.clone()
    };
    if grid.is_empty() {
        return Err(Error::GridInfeasible(format!(
            "no feasible default budgets for {n_available} seeds"
        )));
    }
    for (i, &r) in grid.iter().enumerate() {
        if r == 0 || r % 2 != 0 {
            return Err(Error::GridInfeasible(format!("budget {r} is not a positive even run count")));
        }
        if i > 0 && r <= grid[i - 1] {
            return Err(Error::GridInfeasible("budgets must be strictly increasing".into()));
        }
    }
    let max = *grid.last().expect("non-empty");
    if max > 2 * n_available {
        return Err(Error::GridInfeasible(format!(
            "budget {max} runs needs {} seeds, only {n_available} available",
            max / 2
        )));
    }
    Ok(grid)
}

/// Draws a uniformly random subset of `amount` distinct indices in random order.
pub fn draw_subset<R: rand::Rng + ?Sized>(rng: &mut R, length: usize, amount: usize) -> Vec<usize> {
    index::sample(rng, length, amount).into_vec()
}

fn subset_delta(data: &PairedDataset, treated: &[usize], control: &[usize]) -> f64 {
    let a: Vec<f64> = treated.iter().map(|&i| data.y1()[i]).collect();
    let b: Vec<f64> = control.iter().map(|&i| data.y0()[i]).collect();
    mean(&a) - mean(&b)
}

fn draw_all(data: &PairedDataset, cfg: &SubsampleConfig) -> Result<Vec<GridDraws>> {
    let total = data.len();
    let grid = validate_config(cfg, total)?;
    let disjoint = cfg.independent == IndependentMode::Disjoint;
    Ok(grid
        .iter()
        .enumerate()
        .map(|(g, &r)| {
            let n = r / 2;
            let with_independent = disjoint && 2 * n <= total;
            let pairs: Vec<(f64, Option<f64>)> = (0..cfg.replicates)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream(cfg.rng_seed, replicate_stream_id(g, k));
                    if with_independent {
                        let idx = draw_subset(&mut rng, total, 2 * n);
                        let (first, second) = idx.split_at(n);
                        (
                            subset_delta(data, first, first),
                            Some(subset_delta(data, first, second)),
                        )
                    } else {
                        let idx = draw_subset(&mut rng, total, n);
                        (subset_delta(data, &idx, &idx), None)
                    }
                })
                .collect();
            let (paired, independent): (Vec<f64>, Vec<Option<f64>>) = pairs.into_iter().unzip();
            GridDraws {
                r,
                paired,
                independent: if with_independent {
                    Some(independent.into_iter().map(|v| v.expect("drawn")).collect())
                } else {
                    None
                },
            }
        })
        .collect())
}

fn spread(values: &[f64]) -> f64 {
    sample_variance(values).sqrt()
}

fn agreement(values: &[f64], reference: f64) -> f64 {
    let hits = values.iter().filter(|v| **v * reference > 0.0).count();
    hits as f64 / values.len() as f64
}

fn analytic_independent_se(data: &PairedDataset, n: usize) -> f64 {
    ((sample_variance(data.y1()) + sample_variance(data.y0())) / n as f64).sqrt()
}

fn series(statistic: Statistic, design: Design, points: Vec<CurvePoint>) -> CurveSeries {
    CurveSeries {
        statistic,
        design,
        points,
    }
}

// ---------------------------------------------------------------------------
// Curves

/// Subsampling standard error of `Δ̂` at every budget, for both designs.
pub fn se_curve(data: &PairedDataset, cfg: &SubsampleConfig) -> Result<CurvePair> {
    let draws = draw_all(data, cfg)?;
    let paired = draws
        .iter()
        .map(|d| CurvePoint {
            r: d.r,
            value: spread(&d.paired),
        })
        .collect();
    let independent = match cfg.independent {
        IndependentMode::Disjoint => draws
            .iter()
            .filter_map(|d| {
                d.independent.as_ref().map(|v| CurvePoint {
                    r: d.r,
                    value: spread(v),
                })
            })
            .collect(),
        IndependentMode::Analytic => draws
            .iter()
            .map(|d| CurvePoint {
                r: d.r,
                value: analytic_independent_se(data, d.r / 2),
            })
            .collect(),
    };
    Ok(CurvePair {
        paired: series(Statistic::Se, Design::Paired, paired),
        independent: series(Statistic::Se, Design::Independent, independent),
    })
}

/// Confidence-interval half-width, `z_{1−α/2}` times the SE curve.
pub fn ci_curve(data: &PairedDataset, cfg: &SubsampleConfig) -> Result<CurvePair> {
    let se = se_curve(data, cfg)?;
    let z = two_sided_z(cfg.alpha)?;
    Ok(CurvePair {
        paired: se.paired.map(Statistic::CiHalfWidth, |_, v| z * v),
        independent: se.independent.map(Statistic::CiHalfWidth, |_, v| z * v),
    })
}

/// Normal-approximation power to detect `cfg.mde` given the SE curve.
///
/// A zero subsampling SE (every subset gives the same estimate) is treated as
/// the limit of the power formula: 1 for a positive MDE, `α/2` for zero.
pub fn power_curve(data: &PairedDataset, cfg: &SubsampleConfig) -> Result<PowerCurves> {
    let se = se_curve(data, cfg)?;
    let power = |se: f64| -> f64 {
        if se > 0.0 {
            power_normal_approx(cfg.mde, se, cfg.alpha).expect("validated inputs")
        } else if cfg.mde > 0.0 {
            1.0
        } else {
            cfg.alpha / 2.0
        }
    };
    let paired = se.paired.map(Statistic::Power, |_, v| power(v));
    let independent = se.independent.map(Statistic::Power, |_, v| power(v));
    let crossing = |s: &CurveSeries| s.points.iter().find(|p| p.value >= POWER_TARGET).map(|p| p.r);
    Ok(PowerCurves {
        paired_crossing: crossing(&paired),
        independent_crossing: crossing(&independent),
        curves: CurvePair { paired, independent },
    })
}

/// Probability that a subsample estimate has the same sign as the
/// full-sample paired estimate. A zero subsample estimate counts as a
/// disagreement.
pub fn sign_stability_curve(data: &PairedDataset, cfg: &SubsampleConfig) -> Result<CurvePair> {
    validate_config(cfg, data.len())?;
    let reference = estimate_paired(data, cfg.alpha)?.delta;
    if reference == 0.0 {
        return Err(Error::SignReferenceUndefined);
    }
    let draws = draw_all(data, cfg)?;
    let paired = draws
        .iter()
        .map(|d| CurvePoint {
            r: d.r,
            value: agreement(&d.paired, reference),
        })
        .collect();
    let independent = match cfg.independent {
        IndependentMode::Disjoint => draws
            .iter()
            .filter_map(|d| {
                d.independent.as_ref().map(|v| CurvePoint {
                    r: d.r,
                    value: agreement(v, reference),
                })
            })
            .collect(),
        IndependentMode::Analytic => draws
            .iter()
            .map(|d| {
                let se = analytic_independent_se(data, d.r / 2);
                let value = if se > 0.0 { normal_cdf(reference.abs() / se) } else { 1.0 };
                CurvePoint { r: d.r, value }
            })
            .collect(),
    };
    Ok(CurvePair {
        paired: series(Statistic::SignAgreement, Design::Paired, paired),
        independent: series(Statistic::SignAgreement, Design::Independent, independent),
    })
}
