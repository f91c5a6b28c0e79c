//! Run records and seed-aligned paired datasets.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Binary treatment indicator `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// `d = 0`, the baseline.
    Control,
    /// `d = 1`, the alternative.
    Treatment,
}

impl Regime {
    pub fn as_u8(self) -> u8 {
        match self {
            Regime::Control => 0,
            Regime::Treatment => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Regime::Control),
            1 => Some(Regime::Treatment),
            _ => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Regime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Regime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Regime::from_u8(v)
            .ok_or_else(|| serde::de::Error::custom(format!("regime must be 0 or 1, got {v}")))
    }
}

/// One simulator outcome `Y(d, s)` for a single metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: String,
    pub regime: Regime,
    pub metric: String,
    pub value: f64,
}

/// Outcomes of both regimes for one metric, positionally aligned by seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedDataset {
    metric: String,
    seeds: Vec<String>,
    y1: Vec<f64>,
    y0: Vec<f64>,
}

impl PairedDataset {
    /// Validates the pairing invariants: equal non-zero lengths, unique seeds,
    /// finite values.
    pub fn new(
        metric: impl Into<String>,
        seeds: Vec<String>,
        y1: Vec<f64>,
        y0: Vec<f64>,
    ) -> Result<Self> {
        if seeds.is_empty() && y1.is_empty() && y0.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if seeds.len() != y1.len() || seeds.len() != y0.len() {
            return Err(Error::InvalidDataset(format!(
                "length mismatch: {} seeds, {} treatment values, {} control values",
                seeds.len(),
                y1.len(),
                y0.len()
            )));
        }
        let mut seen = HashSet::with_capacity(seeds.len());
        for s in &seeds {
            if !seen.insert(s.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate seed {s:?}")));
            }
        }
        for (i, (a, b)) in y1.iter().zip(&y0).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFiniteValue {
                    location: format!("seed {:?}", seeds[i]),
                });
            }
        }
        Ok(Self {
            metric: metric.into(),
            seeds,
            y1,
            y0,
        })
    }

    /// Builds a dataset with generated seed ids `s0`, `s1`, ...
    pub fn from_columns(metric: impl Into<String>, y1: Vec<f64>, y0: Vec<f64>) -> Result<Self> {
        let seeds = (0..y1.len()).map(|i| format!("s{i}")).collect();
        Self::new(metric, seeds, y1, y0)
    }

    pub fn metric(&self) -> &str {
        &self.metric
    }

    pub fn seeds(&self) -> &[String] {
        &self.seeds
    }

    /// Treatment outcomes `Y(1, s_i)`.
    pub fn y1(&self) -> &[f64] {
        &self.y1
    }

    /// Control outcomes `Y(0, s_i)`.
    pub fn y0(&self) -> &[f64] {
        &self.y0
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Within-seed differences `Y(1, s_i) - Y(0, s_i)`.
    pub fn differences(&self) -> Vec<f64> {
        self.y1.iter().zip(&self.y0).map(|(a, b)| a - b).collect()
    }

    /// Reorders seeds (jointly with both columns) by the given permutation.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::InvalidDataset("permutation length mismatch".into()));
        }
        Self::new(
            self.metric.clone(),
            order.iter().map(|&i| self.seeds[i].clone()).collect(),
            order.iter().map(|&i| self.y1[i]).collect(),
            order.iter().map(|&i| self.y0[i]).collect(),
        )
    }

    /// Converts back into run records, treatment before control for each seed.
    pub fn to_records(&self) -> Vec<RunRecord> {
        let mut out = Vec::with_capacity(2 * self.len());
        for (i, seed) in self.seeds.iter().enumerate() {
            for (regime, value) in [(Regime::Treatment, self.y1[i]), (Regime::Control, self.y0[i])] {
                out.push(RunRecord {
                    seed: seed.clone(),
                    regime,
                    metric: self.metric.clone(),
                    value,
                });
            }
        }
        out
    }
}
