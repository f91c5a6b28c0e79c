use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data::{Regime, RunRecord};
use crate::error::{Error, Result};

pub const RUN_HEADER: [&str; 4] = ["seed", "regime", "metric", "value"];

/// A collection of run outcomes plus free-form provenance.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunFile {
    #[serde(default)]
    pub provenance: BTreeMap<String, Value>,
    pub records: Vec<RunRecord>,
}

impl RunFile {
    pub fn new(records: Vec<RunRecord>) -> Self {
        Self {
            provenance: BTreeMap::new(),
            records,
        }
    }

    /// Distinct metric names, sorted.
    pub fn metrics(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.records.iter().map(|r| r.metric.as_str()).collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Comma-separated form. Provenance has no place in this layout and is
    /// not written.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(RUN_HEADER).expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.seed.as_str(),
                if r.regime == Regime::Treatment { "1" } else { "0" },
                r.metric.as_str(),
                &format!("{:?}", r.value),
            ])
            .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    /// Structured form with `provenance` and `records`.
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("run file serializes");
        out.push(b'\n');
        out
    }
}

/// Parses either the tabular or the structured layout; the structured one is
/// recognised by a leading `{`.
pub fn parse_run_file(bytes: &[u8]) -> Result<RunFile> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::MalformedInput {
        location: format!("byte {}", e.valid_up_to()),
        message: "input is not valid UTF-8".into(),
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let file = if text.trim_start().starts_with('{') {
        parse_json(text)?
    } else {
        parse_csv(text)?
    };
    Ok(file)
}

fn malformed(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::MalformedInput {
        location: location.into(),
        message: message.into(),
    }
}

struct DuplicateGuard {
    seen: HashMap<(String, Regime, String), String>,
}

impl DuplicateGuard {
    fn new() -> Self {
        Self { seen: HashMap::new() }
    }

    fn check(&mut self, rec: &RunRecord, location: &str) -> Result<()> {
        let key = (rec.seed.clone(), rec.regime, rec.metric.clone());
        if let Some(first) = self.seen.get(&key) {
            return Err(Error::DuplicateRecord {
                seed: rec.seed.clone(),
                regime: rec.regime.as_u8(),
                metric: rec.metric.clone(),
                location: format!("{location} (first at {first})"),
            });
        }
        self.seen.insert(key, location.to_owned());
        Ok(())
    }
}

fn parse_regime(raw: &str, location: &str) -> Result<Regime> {
    match raw {
        "0" => Ok(Regime::Control),
        "1" => Ok(Regime::Treatment),
        other => Err(malformed(location, format!("regime must be 0 or 1, got {other:?}"))),
    }
}

fn parse_value(raw: &str, location: &str) -> Result<f64> {
    let v: f64 = raw
        .parse()
        .map_err(|_| malformed(location, format!("value {raw:?} is not a number")))?;
    if !v.is_finite() {
        return Err(Error::NonFiniteValue {
            location: location.to_owned(),
        });
    }
    Ok(v)
}

fn parse_csv(text: &str) -> Result<RunFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| malformed("line 1", e.to_string()))?
        .clone();
    if header.len() == 1 && header.get(0) == Some("") {
        return Err(malformed("line 1", "missing header `seed,regime,metric,value`"));
    }
    if header.iter().collect::<Vec<_>>() != RUN_HEADER {
        return Err(malformed(
            "line 1",
            format!(
                "expected header `seed,regime,metric,value`, got `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut records = Vec::new();
    let mut guard = DuplicateGuard::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            malformed(format!("line {line}"), e.to_string())
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let location = format!("line {line}");
        if row.len() == 1 && row.get(0) == Some("") {
            continue;
        }
        if row.len() != RUN_HEADER.len() {
            return Err(malformed(
                &location,
                format!("expected 4 fields, found {}", row.len()),
            ));
        }
        for (name, cell) in RUN_HEADER.iter().zip(row.iter()) {
            if cell.is_empty() {
                return Err(malformed(&location, format!("missing {name}")));
            }
        }
        let rec = RunRecord {
            seed: row[0].to_owned(),
            regime: parse_regime(&row[1], &location)?,
            metric: row[2].to_owned(),
            value: parse_value(&row[3], &location)?,
        };
        guard.check(&rec, &location)?;
        records.push(rec);
    }
    Ok(RunFile::new(records))
}

#[derive(Deserialize)]
struct RawFile {
    #[serde(default)]
    provenance: BTreeMap<String, Value>,
    records: Vec<BTreeMap<String, Value>>,
}

fn parse_json(text: &str) -> Result<RunFile> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| {
        malformed(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    let mut records = Vec::with_capacity(raw.records.len());
    let mut guard = DuplicateGuard::new();
    for (i, fields) in raw.records.iter().enumerate() {
        let location = format!("records[{i}]");
        let get = |name: &str| {
            fields
                .get(name)
                .filter(|v| !v.is_null())
                .ok_or_else(|| malformed(&location, format!("missing {name}")))
        };
        let seed = match get("seed")? {
            Value::String(s) if !s.is_empty() => s.clone(),
            Value::Number(n) => n.to_string(),
            other => return Err(malformed(&location, format!("seed must be a string, got {other}"))),
        };
        let regime = match get("regime")? {
            Value::Number(n) => parse_regime(&n.to_string(), &location)?,
            Value::String(s) => parse_regime(s, &location)?,
            other => return Err(malformed(&location, format!("regime must be 0 or 1, got {other}"))),
        };
        let metric = match get("metric")? {
            Value::String(s) if !s.is_empty() => s.clone(),
            other => return Err(malformed(&location, format!("metric must be a string, got {other}"))),
        };
        let value = match get("value")? {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| malformed(&location, "value is not representable"))?,
            Value::String(s) => parse_value(s, &location)?,
            other => return Err(malformed(&location, format!("value must be a number, got {other}"))),
        };
        if !value.is_finite() {
            return Err(Error::NonFiniteValue { location });
        }
        let rec = RunRecord {
            seed,
            regime,
            metric,
            value,
        };
        guard.check(&rec, &location)?;
        records.push(rec);
    }
    Ok(RunFile {
        provenance: raw.provenance,
        records,
    })
}
