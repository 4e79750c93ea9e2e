//! Optimality gaps of the binary-search heuristic on one slice of the 8-period test bed.
//!
//! cargo run --release --example testbed_slice [PATTERN] [seed]

use sspolicy::testbed::{build_instances, run_benchmark, BenchmarkConfig, BenchmarkOptions, Method};

fn main() -> sspolicy::Result<()> {
    let mut args = std::env::args().skip(1);
    let pattern = args.next().unwrap_or_else(|| "STA".into()).parse()?;
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    let mut config = BenchmarkConfig::bundled(8)?;
    config.patterns = vec![pattern];
    config.methods = vec![Method::Bs];
    let instances = build_instances(&config)?;
    let report = run_benchmark(&config, &instances, &BenchmarkOptions { seed, jobs: None, detail_path: None })?;

    for row in &report.details {
        println!(
            "{:28} oracle {:9.3}  simulated {:9.3}  gap {:6.3}%",
            row.instance_id,
            row.oracle_cost.unwrap_or(f64::NAN),
            row.mean.unwrap_or(f64::NAN),
            row.gap_pct.unwrap_or(f64::NAN)
        );
    }
    for s in report.summary.iter().filter(|s| s.dimension != "pattern") {
        println!(
            "{:8} {:5} mean {:.3}%  median {:.3}%",
            s.dimension,
            s.level,
            s.mean_gap_pct.unwrap_or(f64::NAN),
            s.median_gap_pct.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
