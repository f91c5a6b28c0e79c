//! Parses a run file with an orphan seed, pairs it, and prints the JSON
//! report together with the effects table.

use pairseed::io::{
    analyze_metric, build_paired_dataset, parse_run_file, render_effects_table,
    serialize_report, AnalysisReport, EffectRow, PairingPolicy,
};
use pairseed::IntervalKind;

const RUNS: &str = "\
seed,regime,metric,value
a,1,wealth_gini,0.401
a,0,wealth_gini,0.442
b,1,wealth_gini,0.389
b,0,wealth_gini,0.425
c,1,wealth_gini,0.415
c,0,wealth_gini,0.461
d,1,wealth_gini,0.377
d,0,wealth_gini,0.409
e,1,wealth_gini,0.398
e,0,wealth_gini,0.440
f,1,wealth_gini,0.420
";

fn main() -> pairseed::Result<()> {
    let file = parse_run_file(RUNS.as_bytes())?;

    let strict = build_paired_dataset(&file, "wealth_gini", PairingPolicy::Strict);
    println!("strict pairing: {}", strict.unwrap_err());

    let (data, pairing) = build_paired_dataset(&file, "wealth_gini", PairingPolicy::DropOrphans)?;
    println!("paired {} seeds, dropped {:?}\n", data.len(), pairing.orphan_seeds_regime1);

    let mut metric = analyze_metric(&data, 0.05, IntervalKind::Normal)?;
    metric.pairing = Some(pairing);
    let mut report = AnalysisReport::new(0.05, IntervalKind::Normal);
    report.results.push(metric);

    let rows: Vec<EffectRow> = report.results.iter().map(EffectRow::from).collect();
    println!("{}", render_effects_table(&rows, 3));
    print!("{}", String::from_utf8_lossy(&serialize_report(&report)));
    Ok(())
}
