// Seeded Monte Carlo coverage: how often does a bound fail over repeated
// draws, compared with δ plus binomial slack?
//
// cargo run --release --example coverage

use tlbounds::bounds::TheoremId;
use tlbounds::harness::output::parse_config;
use tlbounds::harness::verify_bound;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("benign_shift.json", TheoremId::Thm1),
        ("benign_shift.json", TheoremId::Thm2),
        ("hostile_shift.json", TheoremId::Thm2),
        ("three_source_asymmetric.json", TheoremId::Thm7),
    ];
    for (name, theorem) in cases {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        let mut config = parse_config(&std::fs::read_to_string(&path)?, &path)?;
        config.trials = 100;
        let report = verify_bound(&config, Some(theorem))?;
        let slack: f64 = report.per_trial.iter().map(|t| t.rhs - t.lhs).sum::<f64>() / report.trials as f64;
        println!(
            "{name:<30} {:<6} violations {}/{} (allowed rate {:.3}), mean slack {slack:.3}",
            theorem.as_str(),
            report.violations,
            report.trials,
            report.max_allowed_rate
        );
        assert!(report.within_allowance);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
