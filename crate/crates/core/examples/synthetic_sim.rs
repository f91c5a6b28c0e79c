//! Generates a common-random-numbers dataset and compares sample moments
//! with the analytic ones.

use pairseed::io::RunFile;
use pairseed::synthetic::{analytic_moments, generate, SyntheticSpec};
use pairseed::{design_stats, estimate_paired};

fn main() -> pairseed::Result<()> {
    let spec = SyntheticSpec {
        delta: 0.5,
        mu0: 3.0,
        sigma1: 1.2,
        sigma0: 1.0,
        rho: 0.8,
        n_seeds: 20_000,
        master_seed: 2024,
        metric_name: "latency".into(),
    };
    let data = generate(&spec)?;
    let truth = analytic_moments(&spec);
    let sample = design_stats(&data)?;
    let est = estimate_paired(&data, 0.05)?;

    println!("          analytic   sample");
    println!("delta     {:8.4} {:8.4}", truth.delta, est.delta);
    println!("sigma1    {:8.4} {:8.4}", truth.sigma1, sample.sigma1);
    println!("sigma0    {:8.4} {:8.4}", truth.sigma0, sample.sigma0);
    println!("rho       {:8.4} {:8.4}", truth.rho, sample.rho);
    println!("cov       {:8.4} {:8.4}", truth.cov, sample.cov);

    // Same spec, fewer seeds: a prefix of the larger run.
    let small = generate(&SyntheticSpec { n_seeds: 3, ..spec.clone() })?;
    let file = RunFile::new(small.to_records());
    print!("\n{}", String::from_utf8_lossy(&file.to_csv()));
    Ok(())
}
