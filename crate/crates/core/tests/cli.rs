use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pairseed::cli::{self, EXIT_CONFIG, EXIT_OK, EXIT_PAIRING};
use pairseed::io::{
    build_paired_dataset, parse_report, parse_run_file, render_effects_table, serialize_report,
    AnalysisReport, EffectRow, PairingPolicy,
};
use pairseed::IntervalKind;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pairseed-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairseed")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["pairseed", "simulate", "--out", s(&out)];
    args.extend_from_slice(extra);
    assert_eq!(cli::run_from(args), EXIT_OK);
    out
}

#[test]
fn simulate_22_seeds_writes_44_records() {
    let dir = scratch("sim44");
    let csv = simulate(&dir, "a.csv", &["--runs", "44", "--rho", "0.5", "--master-seed", "9"]);
    let json = simulate(&dir, "a.json", &["--runs", "44", "--rho", "0.5", "--master-seed", "9"]);
    let from_csv = parse_run_file(&fs::read(&csv).unwrap()).unwrap();
    let from_json = parse_run_file(&fs::read(&json).unwrap()).unwrap();
    assert_eq!(from_csv.records.len(), 44);
    assert_eq!(from_csv.records, from_json.records);
    assert_eq!(from_json.provenance["rho"], "0.5");

    let again = simulate(&dir, "b.csv", &["--runs", "44", "--rho", "0.5", "--master-seed", "9"]);
    assert_eq!(fs::read(&csv).unwrap(), fs::read(&again).unwrap());

    let (data, report) = build_paired_dataset(&from_csv, "outcome", PairingPolicy::Strict).unwrap();
    assert_eq!(data.len(), 22);
    assert_eq!(report.orphan_count(), 0);
}

#[test]
fn simulate_rejects_bad_specs() {
    let dir = scratch("badspec");
    let out = dir.join("x.csv");
    let r = bin(&["simulate", "--rho", "1.5", "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(cli::EXIT_SPEC));
    let r = bin(&["simulate", "--runs", "7", "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(cli::EXIT_SPEC));
}

#[test]
fn analyze_paired_interval_nested_at_high_rho() {
    let dir = scratch("nested");
    let input = simulate(&dir, "runs.csv", &["--runs", "44", "--rho", "0.9", "--delta", "0.3"]);
    let out = dir.join("report.json");
    let r = bin(&["analyze", "--input", s(&input), "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(EXIT_OK));
    let report = parse_report(&fs::read(&out).unwrap()).unwrap();
    let m = &report.results[0];
    assert_eq!(m.n, 22);
    assert!(m.independent.ci_lower < m.paired.ci_lower);
    assert!(m.paired.ci_upper < m.independent.ci_upper);
    assert!(m.advisories.is_empty());
    // analysis is repeatable byte for byte
    let out2 = dir.join("report2.json");
    bin(&["analyze", "--input", s(&input), "--out", s(&out2)]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn analyze_advises_when_correlation_nonpositive() {
    let dir = scratch("advisory");
    let input = dir.join("runs.csv");
    fs::write(
        &input,
        "seed,regime,metric,value\na,1,m,1\na,0,m,3\nb,1,m,2\nb,0,m,2\nc,1,m,3\nc,0,m,1\n",
    )
    .unwrap();
    let out = dir.join("r.json");
    let r = bin(&["analyze", "--input", s(&input), "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(EXIT_OK));
    let report = parse_report(&fs::read(&out).unwrap()).unwrap();
    let advisories = &report.results[0].advisories;
    assert_eq!(advisories.len(), 1);
    assert!(advisories[0].starts_with("pairing offers no advantage"));
    assert!(String::from_utf8_lossy(&r.stderr).contains("pairing offers no advantage"));
}

#[test]
fn analyze_unknown_metric_and_strict_orphans() {
    let dir = scratch("pairing");
    let input = dir.join("runs.csv");
    fs::write(
        &input,
        "seed,regime,metric,value\ns1,1,m,1.5\ns1,0,m,1.0\ns2,1,m,2.5\ns2,0,m,2.25\ns3,1,m,0.5\ns3,0,m,0.1\ns7,1,m,9\n",
    )
    .unwrap();
    let r = bin(&["analyze", "--input", s(&input), "--metric", "nope"]);
    assert_eq!(r.status.code(), Some(EXIT_PAIRING));
    let r = bin(&["analyze", "--input", s(&input), "--pairing", "strict"]);
    assert_eq!(r.status.code(), Some(EXIT_PAIRING));
    assert!(String::from_utf8_lossy(&r.stderr).contains("s7"));

    let r = bin(&["analyze", "--input", s(&input)]);
    assert_eq!(r.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&r.stderr).contains("orphan"));
    let report = parse_report(&r.stdout).unwrap();
    let pairing = report.results[0].pairing.as_ref().unwrap();
    assert_eq!(pairing.orphan_seeds_regime1, vec!["s7".to_string()]);
    assert_eq!(report.results[0].n, 3);
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = scratch("codes");
    let missing = dir.join("missing.csv");
    assert_eq!(bin(&["analyze", "--input", s(&missing)]).status.code(), Some(cli::EXIT_IO));
    let bad = dir.join("bad.csv");
    fs::write(&bad, "seed,regime,metric,value\na,2,m,1\n").unwrap();
    assert_eq!(bin(&["analyze", "--input", s(&bad)]).status.code(), Some(cli::EXIT_INPUT));
    let one = dir.join("one.csv");
    fs::write(&one, "seed,regime,metric,value\na,1,m,1\na,0,m,0\n").unwrap();
    assert_eq!(bin(&["analyze", "--input", s(&one)]).status.code(), Some(cli::EXIT_DEGENERATE));
    assert_eq!(bin(&["analyze", "--input", s(&one), "--alpha", "1.5"]).status.code(), Some(EXIT_CONFIG));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(cli::EXIT_USAGE));
}

#[test]
fn curves_grid_and_mde_errors() {
    let dir = scratch("curveerr");
    let input = simulate(&dir, "runs.csv", &["--runs", "44", "--rho", "0.9"]);
    let out = dir.join("c.csv");
    let r = bin(&["curves", "--input", s(&input), "--statistic", "se", "--grid", "4,100", "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&r.stderr).contains("grid infeasible"));
    let r = bin(&["curves", "--input", s(&input), "--statistic", "power", "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&r.stderr).contains("--mde"));
}

#[test]
fn power_crossing_paired_before_independent() {
    let dir = scratch("crossing");
    let input = simulate(
        &dir,
        "runs.csv",
        &["--runs", "800", "--rho", "0.9", "--delta", "0.2", "--master-seed", "5"],
    );
    let out = dir.join("power.csv");
    let grid: Vec<String> = (1..=25).map(|k| (32 * k).to_string()).collect();
    let grid = grid.join(",");
    let r = bin(&[
        "curves", "--input", s(&input), "--statistic", "power", "--mde", "0.2", "--grid", &grid,
        "--replicates", "200", "--independent", "analytic", "--out", s(&out),
    ]);
    assert_eq!(r.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&r.stderr));
    let line = String::from_utf8(r.stdout).unwrap();
    let grab = |key: &str| -> usize {
        let tail = &line[line.find(key).unwrap() + key.len()..];
        tail.split_whitespace().next().unwrap().parse().unwrap()
    };
    let (paired, independent) = (grab("paired="), grab("independent="));
    assert!(paired < independent, "{line}");
}

#[test]
fn zero_effect_interval_coverage() {
    let dir = scratch("coverage");
    let mut covered = 0;
    for seed in 0..100u64 {
        let seed = seed.to_string();
        let input = simulate(&dir, "runs.csv", &["--runs", "60", "--rho", "0.6", "--master-seed", &seed]);
        let out = dir.join("r.json");
        assert_eq!(cli::run_from(["pairseed", "analyze", "--input", s(&input), "--out", s(&out)]), EXIT_OK);
        let report = parse_report(&fs::read(&out).unwrap()).unwrap();
        if report.results[0].paired.covers(0.0) {
            covered += 1;
        }
    }
    assert!(covered >= 90, "covered {covered}/100");
}

#[test]
fn effects_table_formatting_fixture() {
    let row = EffectRow {
        metric: "Wealth Gini".into(),
        delta: -0.039,
        paired_ci: (-0.052, -0.027),
        independent_ci: (-0.097, 0.018),
    };
    let table = render_effects_table(&[row], 3);
    let last = table.lines().last().unwrap();
    let cells: Vec<&str> = last.split("  ").map(str::trim).filter(|c| !c.is_empty()).collect();
    assert_eq!(cells, ["Wealth Gini", "-0.039", "-0.052", "-0.027", "-0.097", "0.018"]);
}

#[test]
fn empty_report_is_valid() {
    let report = AnalysisReport::new(0.05, IntervalKind::Normal);
    let bytes = serialize_report(&report);
    let back = parse_report(&bytes).unwrap();
    assert!(back.results.is_empty());
    assert_eq!(back, report);
}
