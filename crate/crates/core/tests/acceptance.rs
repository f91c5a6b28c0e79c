//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use pairseed::inference::{pearson_test, two_sided_z, wilcoxon_signed_rank};
use pairseed::resampling::{se_curve, sign_stability_curve, SubsampleConfig};
use pairseed::synthetic::{generate, SyntheticSpec};
use pairseed::{
    design_stats, effective_sample_size, estimate_independent, estimate_paired,
    paired_se_from_independent, power_normal_approx, variance_decomposition, variance_reduction,
    DesignStats, PairedDataset,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64()))
    }
}

fn random_corpus(count: usize) -> Vec<PairedDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=200usize);
            let y1 = (0..n).map(|_| rng.random_range(-1e3..=1e3)).collect();
            let y0 = (0..n).map(|_| rng.random_range(-1e3..=1e3)).collect();
            PairedDataset::from_columns("x", y1, y0).unwrap()
        })
        .collect()
}

fn variance_identity() -> Outcome {
    let start = Instant::now();
    let corpus = random_corpus(10_000);
    let mut worst = 0.0f64;
    for data in &corpus {
        let n = data.len() as f64;
        let var_pair = estimate_paired(data, 0.05).unwrap().se.powi(2);
        let var_ind = estimate_independent(data.y1(), data.y0(), 0.05).unwrap().se.powi(2);
        let cov = design_stats(data).unwrap().cov;
        let err = (var_ind - var_pair - 2.0 * cov / n).abs() / var_ind.max(1.0);
        worst = worst.max(err);
    }
    within(start.elapsed(), 5.0)?;
    check(worst <= 1e-10, format!("10000 datasets, worst scaled error {worst:.2e}"))
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn cross_consistency() -> Outcome {
    let (mut worst_red, mut worst_se) = (0.0f64, 0.0f64);
    for data in &random_corpus(10_000) {
        let stats = design_stats(data).unwrap();
        let parts = variance_decomposition(&stats);
        worst_red = worst_red.max(rel(variance_reduction(&stats), parts.reduction));
        let se_ind = estimate_independent(data.y1(), data.y0(), 0.05).unwrap().se;
        let var_pair = estimate_paired(data, 0.05).unwrap().se.powi(2);
        let se_pair = paired_se_from_independent(se_ind, &stats).unwrap();
        worst_se = worst_se.max(rel(se_pair * se_pair, var_pair));
    }
    check(
        worst_red <= 1e-10 && worst_se <= 1e-10,
        format!("reduction rel err {worst_red:.2e}, paired variance rel err {worst_se:.2e}"),
    )
}

fn moment_recovery() -> Outcome {
    let start = Instant::now();
    let spec = SyntheticSpec {
        delta: 0.5,
        rho: 0.9,
        n_seeds: 100_000,
        master_seed: 1,
        ..SyntheticSpec::default()
    };
    let data = generate(&spec).map_err(|e| e.to_string())?;
    let stats = design_stats(&data).map_err(|e| e.to_string())?;
    let ess = effective_sample_size(2 * data.len(), &stats).map_err(|e| e.to_string())?;
    within(start.elapsed(), 10.0)?;
    check(
        (stats.rho - 0.9).abs() <= 0.01 && (9.0..=11.0).contains(&ess.ratio),
        format!("rho_hat {:.4}, ESS ratio {:.3}", stats.rho, ess.ratio),
    )
}

/// Φ by its Maclaurin series `1/2 + φ(x) Σ x^(2k+1) / (2k+1)!!`.
fn phi_series(x: f64) -> f64 {
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let (mut term, mut sum, mut k) = (x, x, 0.0);
    while term.abs() > 1e-17 * sum.abs().max(1e-300) {
        k += 1.0;
        term *= x * x / (2.0 * k + 1.0);
        sum += term;
    }
    0.5 + pdf * sum
}

fn power_fidelity() -> Outcome {
    const Z975: f64 = 1.959963984540054;
    let cases = [(0.0, 0.025), (1.0, 0.169), (1.959964, 0.5), (2.8016, 0.80)];
    let mut lines = Vec::new();
    let mut ok = true;
    for (ratio, nominal) in cases {
        let got = power_normal_approx(ratio, 1.0, 0.05).map_err(|e| e.to_string())?;
        let oracle = phi_series(ratio - Z975);
        ok &= (got - oracle).abs() <= 1e-3 && (got - nominal).abs() <= 1e-3;
        lines.push(format!("{ratio}->{got:.4}"));
    }
    check(ok, lines.join(", "))
}

fn power_calibration() -> Outcome {
    let start = Instant::now();
    let z = two_sided_z(0.05).unwrap();
    let n = 200;
    let se = (0.2f64 / n as f64).sqrt();
    let reps = 10_000u64;
    let mut lines = Vec::new();
    let mut ok = true;
    for (op, target) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let delta = se * (z + pairseed::inference::normal_quantile(target).unwrap());
        let predicted = power_normal_approx(delta, se, 0.05).unwrap();
        let mut rejected = 0u64;
        for k in 0..reps {
            let spec = SyntheticSpec {
                delta,
                rho: 0.9,
                n_seeds: n,
                master_seed: (op as u64) << 32 | k,
                ..SyntheticSpec::default()
            };
            let est = estimate_paired(&generate(&spec).unwrap(), 0.05).unwrap();
            if !est.covers(0.0) {
                rejected += 1;
            }
        }
        let observed = rejected as f64 / reps as f64;
        ok &= (observed - predicted).abs() <= 0.02;
        lines.push(format!("predicted {predicted:.3} observed {observed:.3}"));
    }
    within(start.elapsed(), 60.0)?;
    check(ok, lines.join("; "))
}

fn sign_stability() -> Outcome {
    let data = generate(&SyntheticSpec {
        delta: 0.2,
        rho: 0.9,
        n_seeds: 400,
        master_seed: 3,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let cfg = SubsampleConfig {
        replicates: 1000,
        rng_seed: 17,
        grid: vec![4, 8, 16, 32, 64, 128, 256, 400],
        ..SubsampleConfig::default()
    };
    let curves = sign_stability_curve(&data, &cfg).map_err(|e| e.to_string())?;
    let slack = 3.0 / (cfg.replicates as f64).sqrt();
    let mut ok = true;
    for p in &curves.paired.points {
        if let Some(ind) = curves.independent.value_at(p.r) {
            ok &= p.value >= ind - slack;
        }
    }
    let paired = curves.paired.values();
    ok &= paired.windows(2).all(|w| w[1] >= w[0] - slack);
    let show = |v: Vec<f64>| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ");
    check(
        ok,
        format!("paired [{}] independent [{}]", show(paired), show(curves.independent.values())),
    )
}

/// Two-sided exact p from the signed-rank null distribution built by
/// dynamic programming over doubled midranks.
fn recursive_signed_rank_p(d: &[f64]) -> f64 {
    let nz: Vec<f64> = d.iter().copied().filter(|x| *x != 0.0).collect();
    let m = nz.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| nz[a].abs().total_cmp(&nz[b].abs()));
    let mut ranks = vec![0u64; m];
    let mut i = 0;
    while i < m {
        let mut j = i;
        while j + 1 < m && nz[order[j + 1]].abs() == nz[order[i]].abs() {
            j += 1;
        }
        for &o in &order[i..=j] {
            ranks[o] = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    let observed: u64 = (0..m).filter(|&k| nz[k] > 0.0).map(|k| ranks[k]).sum();
    let total: u64 = ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    for &r in &ranks {
        for s in (r as usize..=total as usize).rev() {
            counts[s] += counts[s - r as usize];
        }
    }
    let le: u64 = counts[..=observed as usize].iter().sum();
    let ge: u64 = counts[observed as usize..].iter().sum();
    (2.0 * le.min(ge) as f64 / (1u64 << m) as f64).min(1.0)
}

fn wilcoxon_oracle() -> Outcome {
    let value = prop_oneof![
        3 => (-4i32..=4).prop_map(|v| v as f64 * 0.5),
        2 => -10.0f64..10.0,
    ];
    let diffs = proptest::collection::vec(value, 1..=14).prop_filter("1..=10 non-zero", |d| {
        let m = d.iter().filter(|x| **x != 0.0).count();
        (1..=10).contains(&m)
    });
    let mut runner = TestRunner::new(Config {
        cases: 2000,
        failure_persistence: None,
        ..Config::default()
    });
    let result = runner.run(&diffs, |d| {
        let y0 = vec![0.0; d.len()];
        let data = PairedDataset::from_columns("d", d.clone(), y0).unwrap();
        let p = wilcoxon_signed_rank(&data).unwrap().p_value;
        prop_assert_eq!(p, recursive_signed_rank_p(&d));
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    let three = PairedDataset::from_columns("d", vec![1.0, 2.0, 3.0], vec![0.0; 3]).unwrap();
    let p3 = wilcoxon_signed_rank(&three).unwrap().p_value;
    check(p3 == 0.25, format!("2000 generated cases agree, m=3 all positive p = {p3}"))
}

fn pearson_reference_values() -> Outcome {
    let p = |rho: f64| pearson_test(&DesignStats::from_moments(22, 1.0, 1.0, rho).unwrap()).unwrap();
    let (a, b) = (p(0.917), p(0.993));
    check(
        a.p_value < 0.05 && b.p_value < 1e-10,
        format!(
            "rho 0.917: t {:.2} p {:.2e}; rho 0.993: t {:.2} p {:.2e}",
            a.statistic, a.p_value, b.statistic, b.p_value
        ),
    )
}

fn curves_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("pairseed-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_pairseed");
    let input = dir.join("runs.csv");
    let status = Command::new(bin)
        .args(["simulate", "--runs", "400", "--rho", "0.8", "--delta", "0.1", "--master-seed", "4"])
        .arg("--out")
        .arg(&input)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("simulate exited with {status}"));
    }
    let mut outputs = Vec::new();
    for (stat, threads) in [("se", "1"), ("se", "4"), ("se", "4"), ("sign", "1"), ("sign", "3")] {
        let out = dir.join(format!("{stat}-{threads}-{}.csv", outputs.len()));
        let status = Command::new(bin)
            .args(["curves", "--statistic", stat, "--replicates", "300", "--rng-seed", "99"])
            .args(["--threads", threads, "--input"])
            .arg(&input)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("curves exited with {status}"));
        }
        outputs.push(fs::read(&out).map_err(|e| e.to_string())?);
    }
    let _ = fs::remove_dir_all(&dir);
    check(
        outputs[0] == outputs[1] && outputs[1] == outputs[2] && outputs[3] == outputs[4],
        "se and sign curves byte-identical across runs and thread counts 1/3/4".into(),
    )
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn se_scaling() -> Outcome {
    let data = generate(&SyntheticSpec {
        delta: 0.5,
        rho: 0.9,
        n_seeds: 10_000,
        master_seed: 10,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let cfg = SubsampleConfig {
        replicates: 1000,
        rng_seed: 5,
        grid: vec![20, 40, 80, 160, 320, 640, 1280],
        ..SubsampleConfig::default()
    };
    let curves = se_curve(&data, &cfg).map_err(|e| e.to_string())?;
    let fit = |s: &pairseed::resampling::CurveSeries| {
        let xs: Vec<f64> = s.runs().iter().map(|r| (*r as f64).ln()).collect();
        let ys: Vec<f64> = s.values().iter().map(|v| v.ln()).collect();
        slope(&xs, &ys)
    };
    let (p, i) = (fit(&curves.paired), fit(&curves.independent));
    let band = -0.6..=-0.4;
    check(
        band.contains(&p) && band.contains(&i),
        format!("log-log slope paired {p:.3}, independent {i:.3}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("variance identity", variance_identity),
        ("reduction and paired SE cross-consistency", cross_consistency),
        ("oracle moment recovery", moment_recovery),
        ("power formula fidelity", power_fidelity),
        ("empirical power calibration", power_calibration),
        ("sign-stability ordering", sign_stability),
        ("exact Wilcoxon oracle equivalence", wilcoxon_oracle),
        ("Pearson test on reference correlations", pearson_reference_values),
        ("curve determinism", curves_determinism),
        ("SE scaling in runs", se_scaling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
