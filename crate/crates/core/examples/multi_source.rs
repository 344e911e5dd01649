// Two multi-source bounds on the same draws: the mixture-based bound and the
// peer-evaluated bound, plus a sweep over the self-trust weight μ.
//
// cargo run --release --example multi_source

use tlbounds::erm::alpha_mu_weights;
use tlbounds::harness::compare_multisource;
use tlbounds::harness::output::parse_config;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/three_source_asymmetric.json");
    let mut config = parse_config(&std::fs::read_to_string(path)?, path)?;
    config.trials = 50;

    println!("lambda weights at mu=0.6: {:?}", alpha_mu_weights(&[0.6, 0.2, 0.2], 0.6)?);
    let report = compare_multisource(&config)?;
    println!(
        "peer bound tighter in {}/{} trials ({} ties); lambda_alpha={:.4}, lambda_alpha_mu={:.4}",
        report.thm7_tighter_count, report.trials, report.ties, report.lambda_alpha, report.lambda_alpha_mu
    );
    for row in report.rows.iter().take(5) {
        println!("  trial {:>2}: mixture {:.4}  peer {:.4}", row.trial, row.thm3_rhs, row.thm7_rhs);
    }
    for s in &report.mu_sweep {
        println!(
            "  mu={:.1}: mean peer rhs {:.4} vs mixture {:.4}, tighter in {:.0}%",
            s.mu,
            s.mean_thm7_rhs,
            s.mean_thm3_rhs,
            100.0 * s.fraction_thm7_tighter
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
