// H∆H-divergence, discrepancy and the empirical divergence between two
// shifted synthetic domains.
//
// cargo run --example divergence

use tlbounds::divergence::{discrepancy, hdh_divergence, hdh_divergence_detail, key_inequality_check, LossSpec, Measure};
use tlbounds::domains::sample_unlabeled;
use tlbounds::harness::config::GeneratorSpec;
use tlbounds::hypothesis::make_threshold_class;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let generator = |center: f64| GeneratorSpec {
        n: 30,
        center,
        spread: 0.15,
        label_threshold: 0.5,
        label_disagreement: 0.0,
        seed: 0,
    };
    let source = generator(0.35).build()?;
    let class = make_threshold_class(source.ground().clone())?;

    println!("{:>8} {:>10} {:>10} {:>10} {:>12}", "center", "hdh", "disc_01", "disc_sq", "hdh_sample");
    for center in [0.35, 0.45, 0.55, 0.65, 0.8] {
        let target = generator(center).build()?;
        let (p, q) = (Measure::from(&source), Measure::from(&target));
        let detail = hdh_divergence_detail(&class, &p, &q)?;
        let d01 = discrepancy(&class, LossSpec::ZERO_ONE, &p, &q)?;
        let dsq = discrepancy(&class, LossSpec::SQUARED, &p, &q)?;
        let us = Measure::from_sample(&sample_unlabeled(&source, 500, 1)?)?;
        let ut = Measure::from_sample(&sample_unlabeled(&target, 500, 2)?)?;
        let empirical = hdh_divergence(&class, &us, &ut)?;
        println!("{center:>8.2} {:>10.4} {d01:>10.4} {dsq:>10.4} {empirical:>12.4}", detail.value);
        assert_eq!(d01, 0.5 * detail.value);

        let key = key_inequality_check(&class, &source, &target)?;
        assert!(key.max_violation <= 1e-12);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
