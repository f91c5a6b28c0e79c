use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::runfile::RunFile;
use crate::data::{PairedDataset, Regime};
use crate::error::{Error, Result};

/// What to do with seeds observed under only one regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingPolicy {
    /// Any orphan seed is an error.
    Strict,
    /// Orphans are excluded and listed in the [`PairingReport`].
    #[default]
    DropOrphans,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingReport {
    pub metric: String,
    pub paired_seeds: usize,
    pub orphan_seeds_regime1: Vec<String>,
    pub orphan_seeds_regime0: Vec<String>,
    /// Metrics in the file observed under both regimes.
    pub metrics: Vec<String>,
}

impl PairingReport {
    /// Metrics in `file` observed under both regimes.
    pub fn metrics_in(file: &RunFile) -> Vec<String> {
        paired_metrics(file)
    }

    pub fn orphan_count(&self) -> usize {
        self.orphan_seeds_regime1.len() + self.orphan_seeds_regime0.len()
    }
}

/// Aligns treatment and control outcomes of `metric` by seed.
///
/// Seeds come out in lexicographic order, so the dataset does not depend on
/// the order of records in the file.
pub fn build_paired_dataset(
    file: &RunFile,
    metric: &str,
    policy: PairingPolicy,
) -> Result<(PairedDataset, PairingReport)> {
    let mut by_seed: BTreeMap<&str, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for rec in file.records.iter().filter(|r| r.metric == metric) {
        let slot = by_seed.entry(rec.seed.as_str()).or_default();
        match rec.regime {
            Regime::Treatment => slot.0 = Some(rec.value),
            Regime::Control => slot.1 = Some(rec.value),
        }
    }
    if by_seed.is_empty() {
        return Err(Error::UnknownMetric(metric.to_owned()));
    }

    let mut seeds = Vec::new();
    let (mut y1, mut y0) = (Vec::new(), Vec::new());
    let (mut orphan1, mut orphan0) = (Vec::new(), Vec::new());
    for (seed, pair) in by_seed {
        match pair {
            (Some(a), Some(b)) => {
                seeds.push(seed.to_owned());
                y1.push(a);
                y0.push(b);
            }
            (Some(_), None) => orphan1.push(seed.to_owned()),
            (None, Some(_)) => orphan0.push(seed.to_owned()),
            (None, None) => unreachable!("entry created by a record"),
        }
    }

    if policy == PairingPolicy::Strict && !(orphan1.is_empty() && orphan0.is_empty()) {
        let mut all: Vec<String> = orphan1.into_iter().chain(orphan0).collect();
        all.sort();
        return Err(Error::OrphanSeeds(all));
    }
    if seeds.is_empty() {
        return Err(Error::EmptyAfterPairing(metric.to_owned()));
    }

    let report = PairingReport {
        metric: metric.to_owned(),
        paired_seeds: seeds.len(),
        orphan_seeds_regime1: orphan1,
        orphan_seeds_regime0: orphan0,
        metrics: paired_metrics(file),
    };
    Ok((PairedDataset::new(metric, seeds, y1, y0)?, report))
}

fn paired_metrics(file: &RunFile) -> Vec<String> {
    let mut seen: BTreeMap<&str, (bool, bool)> = BTreeMap::new();
    for r in &file.records {
        let e = seen.entry(r.metric.as_str()).or_default();
        match r.regime {
            Regime::Treatment => e.0 = true,
            Regime::Control => e.1 = true,
        }
    }
    seen.into_iter()
        .filter(|(_, (a, b))| *a && *b)
        .map(|(m, _)| m.to_owned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
