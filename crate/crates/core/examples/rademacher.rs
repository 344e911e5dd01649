// Empirical Rademacher complexity: exact sign enumeration against the
// Monte Carlo estimate.
//
// cargo run --example rademacher

use tlbounds::divergence::{rademacher, RademacherMode};
use tlbounds::domains::UnlabeledSample;
use tlbounds::hypothesis::{make_finite_class, make_threshold_class, GroundSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ground = GroundSet::from_scalars(&[0.0, 0.25, 0.5, 0.75, 1.0])?;
    let thresholds = make_threshold_class(ground.clone())?;
    let zero = make_finite_class(ground.clone(), vec![vec![0.0; 5]], 1)?;

    for m in [2usize, 6, 12] {
        let sample = UnlabeledSample::from_indices(ground.clone(), (0..m).map(|i| i % 5))?;
        let exact = rademacher(&thresholds, &sample, RademacherMode::Exact)?;
        let mc = rademacher(&thresholds, &sample, RademacherMode::MonteCarlo { draws: 10_000, seed: 7 })?;
        println!(
            "m={m:>2}  exact={:.5}  monte_carlo={:.5} ± {:.5}  ({} sign vectors)",
            exact.value, mc.value, mc.std_error, exact.sign_vectors
        );
        assert!((exact.value - mc.value).abs() <= 3.0 * mc.std_error + 1e-12);
        assert_eq!(rademacher(&zero, &sample, RademacherMode::Exact)?.value, 0.0);
    }

    let big = UnlabeledSample::from_indices(ground, (0..21).map(|i| i % 5))?;
    assert!(rademacher(&thresholds, &big, RademacherMode::Exact).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
