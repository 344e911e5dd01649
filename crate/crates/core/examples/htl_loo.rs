// Hypothesis transfer by ridge regression on source residuals: training,
// truncated prediction, leave-one-out risk two ways, and the stability gap.
//
// cargo run --release --example htl_loo

use tlbounds::htl::*;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let xs: Vec<Vec<f64>> = (0..21).map(|i| vec![-1.0 + 0.1 * i as f64]).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 0.8 * (std::f64::consts::PI * x[0]).sin()).collect();
    let n = xs.len();
    let target = RegressionDomain::new(xs, vec![1.0 / n as f64; n], ys, 1.0)?;
    let source = SourcePredictor::linear(vec![0.5], 0.0, 0.5);

    let sample = target.sample(40, 3)?;
    let model = train_htl(&sample, &source, 1.0 / 40.0, 1.5)?;
    println!("w = {:?}; f(0.5) = {:.4}; f'(0.5) = {:.4}", model.w, htl_predict(&model, &[0.5])?, source.eval(&[0.5]));
    println!("target risk: transfer {:.4}, source alone {:.4}", target.risk(&model), target.risk(&source));

    let naive = loo_risk(&sample, |s| train_htl(s, &source, 1.0 / 40.0, 1.5))?;
    let fast = htl_loo_closed_form(&sample, &source, 1.0 / 40.0, 1.5)?;
    println!("LOO: retrained {naive:.12}, closed form {fast:.12}");

    for m in [20, 40, 80] {
        let est = estimate_stability_gap(
            &StabilityConfig { target: target.clone(), source: source.clone(), m, lambda_reg: 1.0 / m as f64, c: 1.5 },
            100,
            9,
        )?;
        println!("m={m:>2}: E[(risk - loo)^2] = {:.5} ± {:.5}", est.mean_sq_gap, est.stderr);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
