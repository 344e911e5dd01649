// The synthetic covariate-shift generator: Gaussian-shaped weights on an
// even grid, threshold labels and optional label noise. Prints how λ and
// the divergence respond to the shift.
//
// cargo run --example covariate_shift

use tlbounds::divergence::hdh_divergence;
use tlbounds::erm::ideal_risk;
use tlbounds::harness::config::GeneratorSpec;
use tlbounds::hypothesis::make_threshold_class;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let source = GeneratorSpec { n: 40, center: 0.3, spread: 0.1, label_threshold: 0.5, label_disagreement: 0.0, seed: 0 }.build()?;
    let class = make_threshold_class(source.ground().clone())?;
    println!("{:>6} {:>6} {:>10} {:>8}", "center", "noise", "divergence", "lambda");
    for (center, noise) in [(0.3, 0.0), (0.5, 0.0), (0.7, 0.0), (0.7, 0.1), (0.9, 0.2)] {
        let target = GeneratorSpec { n: 40, center, spread: 0.1, label_threshold: 0.5, label_disagreement: noise, seed: 5 }.build()?;
        let div = hdh_divergence(&class, &(&source).into(), &(&target).into())?;
        let lambda = ideal_risk(&[(1.0, &source), (1.0, &target)], &class)?.objective;
        println!("{center:>6.1} {noise:>6.2} {div:>10.4} {lambda:>8.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
