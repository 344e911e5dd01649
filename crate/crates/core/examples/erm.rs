// Exact ERM over thresholds: plain, α-weighted across two samples, and the
// ideal joint risk λ.
//
// cargo run --example erm

use tlbounds::bounds::alpha_weighted_spec;
use tlbounds::domains::{expected_risk, sample_labeled};
use tlbounds::erm::{erm, ideal_risk, WeightedRiskSpec};
use tlbounds::harness::config::GeneratorSpec;
use tlbounds::hypothesis::make_threshold_class;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let source = GeneratorSpec { n: 25, center: 0.4, spread: 0.2, label_threshold: 0.45, label_disagreement: 0.0, seed: 0 }.build()?;
    let target = GeneratorSpec { n: 25, center: 0.6, spread: 0.2, label_threshold: 0.7, label_disagreement: 0.04, seed: 3 }.build()?;
    let class = make_threshold_class(source.ground().clone())?;

    let s = sample_labeled(&source, 200, 1)?;
    let t = sample_labeled(&target, 60, 2)?;

    let plain = erm(&WeightedRiskSpec::new().empirical(1.0, &s)?, &class)?;
    println!(
        "source-only ERM: member {} (train {:.3}, {} tied), target risk {:.4}",
        plain.index,
        plain.objective,
        plain.tie_count,
        expected_risk(&target, &plain.hypothesis, None)?
    );

    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let h = erm(&alpha_weighted_spec(alpha, &t, &s)?, &class)?;
        println!("alpha={alpha:.2}: member {:>2}, target risk {:.4}", h.index, expected_risk(&target, &h.hypothesis, None)?);
    }

    let lambda = ideal_risk(&[(1.0, &source), (1.0, &target)], &class)?;
    println!("lambda = {:.4} (attained by member {})", lambda.objective, lambda.index);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
