use crate::error::{Error, Result};
use crate::resampling::{CurvePoint, CurveSeries, Statistic};
use crate::stats::Design;

pub const CURVE_HEADER: [&str; 4] = ["statistic", "design", "r", "value"];

/// Writes curve series as `statistic,design,r,value` rows.
pub fn write_curves<'a>(series: impl IntoIterator<Item = &'a CurveSeries>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CURVE_HEADER).expect("in-memory write");
    for s in series {
        for p in &s.points {
            w.write_record([
                s.statistic.as_str(),
                s.design.as_str(),
                &p.r.to_string(),
                &format!("{:?}", p.value),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

/// Reads curve rows back, one series per `(statistic, design)` in order of
/// first appearance.
pub fn parse_curves(bytes: &[u8]) -> Result<Vec<CurveSeries>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let bad = |line: u64, msg: String| Error::MalformedInput {
        location: format!("line {line}"),
        message: msg,
    };
    let header = reader.headers().map_err(|e| bad(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != CURVE_HEADER {
        return Err(bad(1, "expected header `statistic,design,r,value`".into()));
    }
    let mut out: Vec<CurveSeries> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| bad(e.position().map(|p| p.line()).unwrap_or(0), e.to_string()))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != 4 {
            return Err(bad(line, format!("expected 4 fields, found {}", row.len())));
        }
        let statistic = Statistic::parse(&row[0])
            .ok_or_else(|| bad(line, format!("unknown statistic {:?}", &row[0])))?;
        let design = match &row[1] {
            "paired" => Design::Paired,
            "independent" => Design::Independent,
            other => return Err(bad(line, format!("unknown design {other:?}"))),
        };
        let r: usize = row[2].parse().map_err(|_| bad(line, format!("bad run count {:?}", &row[2])))?;
        let value: f64 = row[3].parse().map_err(|_| bad(line, format!("bad value {:?}", &row[3])))?;
        if !value.is_finite() {
            return Err(Error::NonFiniteValue { location: format!("line {line}") });
        }
        let point = CurvePoint { r, value };
        match out.iter_mut().find(|s| s.statistic == statistic && s.design == design) {
            Some(s) => s.points.push(point),
            None => out.push(CurveSeries {
                statistic,
                design,
                points: vec![point],
            }),
        }
    }
    Ok(out)
}
