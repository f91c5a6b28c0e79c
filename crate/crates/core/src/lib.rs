//! Paired seed evaluation.
//!
//! Estimates the effect of switching a stochastic simulator between two
//! regimes when both regimes are run under the same random seeds, and
//! quantifies how much the shared randomness buys: variance reduction,
//! tighter intervals, power, sign stability and effective sample size.
//!
//! - [`stats`]: estimators and closed-form design quantities
//! - [`inference`]: paired t, Wilcoxon signed-rank, Pearson tests
//! - [`resampling`]: Monte Carlo subsampling curves over run budgets
//! - [`synthetic`]: a common-random-numbers simulator with known moments
//! - [`io`]: run files, pairing, reports and curve files
//! - [`cli`]: the `pairseed` command line

pub mod cli;
pub mod data;
pub mod error;
pub mod inference;
pub mod io;
pub mod resampling;
pub mod rng;
pub mod stats;
pub mod synthetic;

pub use data::{PairedDataset, Regime, RunRecord};
pub use error::{Error, Result};
pub use stats::{
    ci_half_width, design_stats, effective_sample_size, estimate_independent, estimate_paired,
    paired_se_from_independent, power_normal_approx, variance_decomposition, variance_in_runs,
    variance_reduction, Design, DesignStats, EffectEstimate, EssResult, IntervalKind,
    VarianceDecomposition,
};
