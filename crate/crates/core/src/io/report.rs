//! Per-metric analysis bundle and its serialized forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::pairing::PairingReport;
use crate::data::PairedDataset;
use crate::error::{Error, Result};
use crate::inference::{paired_t_test, pearson_test, wilcoxon_signed_rank, TestResult};
use crate::stats::{
    design_stats, effective_sample_size, estimate_independent_with, estimate_paired_with,
    variance_decomposition, variance_reduction, DesignStats, EffectEstimate, EssResult,
    IntervalKind, VarianceDecomposition,
};

pub const REPORT_VERSION: u32 = 1;

/// Result of a hypothesis test that may not be computable on the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestOutcome {
    Computed(TestResult),
    /// `|ρ̂| = 1`: the t statistic is infinite and the p-value is 0.
    PerfectCorrelation { rho: f64, p_value: f64 },
    Unavailable { reason: String },
}

impl TestOutcome {
    fn from_result(r: Result<TestResult>) -> Self {
        match r {
            Ok(t) => TestOutcome::Computed(t),
            Err(Error::PerfectCorrelation { rho }) => TestOutcome::PerfectCorrelation { rho, p_value: 0.0 },
            Err(e) => TestOutcome::Unavailable { reason: e.to_string() },
        }
    }

    pub fn p_value(&self) -> Option<f64> {
        match self {
            TestOutcome::Computed(t) => Some(t.p_value),
            TestOutcome::PerfectCorrelation { p_value, .. } => Some(*p_value),
            TestOutcome::Unavailable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EssSummary {
    Finite(EssResult),
    /// Paired variance is zero; any number of independent runs falls short.
    Unbounded { r: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: String,
    pub n: usize,
    pub delta: f64,
    pub paired: EffectEstimate,
    pub independent: EffectEstimate,
    pub design_stats: Option<DesignStats>,
    pub variance_decomposition: Option<VarianceDecomposition>,
    pub variance_reduction: Option<f64>,
    pub ess: Option<EssSummary>,
    pub paired_t: TestOutcome,
    pub wilcoxon: TestOutcome,
    pub pearson: TestOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<PairingReport>,
    #[serde(default)]
    pub advisories: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: u32,
    pub alpha: f64,
    pub interval: IntervalKind,
    #[serde(default)]
    pub provenance: BTreeMap<String, Value>,
    pub results: Vec<MetricReport>,
}

impl AnalysisReport {
    pub fn new(alpha: f64, interval: IntervalKind) -> Self {
        Self {
            version: REPORT_VERSION,
            alpha,
            interval,
            provenance: BTreeMap::new(),
            results: Vec::new(),
        }
    }
}

pub const NO_ADVANTAGE_ADVISORY: &str = "pairing offers no advantage";

/// Runs every estimator and test on one paired dataset.
///
/// Only the two effect estimates are mandatory; design statistics and tests
/// that are undefined on the data are recorded as unavailable.
pub fn analyze_metric(
    data: &PairedDataset,
    alpha: f64,
    interval: IntervalKind,
) -> Result<MetricReport> {
    let paired = estimate_paired_with(data, alpha, interval)?;
    let independent = estimate_independent_with(data.y1(), data.y0(), alpha, interval)?;
    let mut advisories = Vec::new();

    let stats = design_stats(data);
    let (design_stats, decomposition, reduction, ess, pearson) = match &stats {
        Ok(s) => {
            let ess = match effective_sample_size(2 * s.n, s) {
                Ok(e) => Some(EssSummary::Finite(e)),
                Err(Error::DegenerateDenominator) => Some(EssSummary::Unbounded { r: 2 * s.n }),
                Err(e) => return Err(e),
            };
            if s.rho <= 0.0 {
                advisories.push(format!(
                    "{NO_ADVANTAGE_ADVISORY}: seed-level correlation is {:.3}; \
                     the paired runs can be treated as independent",
                    s.rho
                ));
            }
            (
                Some(*s),
                Some(variance_decomposition(s)),
                Some(variance_reduction(s)),
                ess,
                TestOutcome::from_result(pearson_test(s)),
            )
        }
        Err(e) => {
            advisories.push(format!("seed-level correlation unavailable: {e}"));
            (None, None, None, None, TestOutcome::Unavailable { reason: e.to_string() })
        }
    };

    Ok(MetricReport {
        metric: data.metric().to_owned(),
        n: data.len(),
        delta: paired.delta,
        paired,
        independent,
        design_stats,
        variance_decomposition: decomposition,
        variance_reduction: reduction,
        ess,
        paired_t: TestOutcome::from_result(paired_t_test(data)),
        wilcoxon: TestOutcome::from_result(wilcoxon_signed_rank(data)),
        pearson,
        pairing: None,
        advisories,
    })
}

/// Pretty JSON with a fixed key order.
pub fn serialize_report(report: &AnalysisReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
    out.push(b'\n');
    out
}

pub fn parse_report(bytes: &[u8]) -> Result<AnalysisReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::MalformedInput {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

/// One line of the effects table: point estimate with both intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectRow {
    pub metric: String,
    pub delta: f64,
    pub paired_ci: (f64, f64),
    pub independent_ci: (f64, f64),
}

impl From<&MetricReport> for EffectRow {
    fn from(m: &MetricReport) -> Self {
        Self {
            metric: m.metric.clone(),
            delta: m.delta,
            paired_ci: (m.paired.ci_lower, m.paired.ci_upper),
            independent_ci: (m.independent.ci_lower, m.independent.ci_upper),
        }
    }
}

/// Plain-text table of effects with paired and independent intervals.
pub fn render_effects_table(rows: &[EffectRow], decimals: usize) -> String {
    let header = [
        "Metric",
        "Delta",
        "Paired lower",
        "Paired upper",
        "Independent lower",
        "Independent upper",
    ];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            let f = |v: f64| format!("{v:.decimals$}");
            [
                r.metric.clone(),
                f(r.delta),
                f(r.paired_ci.0),
                f(r.paired_ci.1),
                f(r.independent_ci.0),
                f(r.independent_ci.1),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, row: &[String]| {
        let mut parts = Vec::with_capacity(row.len());
        for (i, (c, w)) in row.iter().zip(&widths).enumerate() {
            parts.push(if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") });
        }
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &header.map(String::from));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(&mut out, &rule);
    for row in &cells {
        line(&mut out, row);
    }
    out
}
