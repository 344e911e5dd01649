// Per-term right-hand sides for the single-source bounds, and the α that
// minimizes the mixed-sample bound.
//
// cargo run --example bound_calculator

use tlbounds::bounds::{complexity_term, lemma1_rhs, thm4_rhs, BoundReport, ComplexityKind, TheoremId};
use tlbounds::divergence::LossSpec;
use tlbounds::harness::output::parse_config;
use tlbounds::harness::Experiment;

fn show(r: &BoundReport) {
    let terms: Vec<String> = r.terms.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
    println!(
        "{:<6} rhs={:.4} lhs={:.4} holds={:?}  [{}]",
        r.theorem_id.as_str(),
        r.rhs_total,
        r.lhs_realized.unwrap_or(f64::NAN),
        r.holds,
        terms.join(", ")
    );
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for m in [100, 1_000, 10_000] {
        println!(
            "m={m:>6}: A={:.4} B={:.4} C={:.4}",
            complexity_term(ComplexityKind::A, m, 2, 0.1)?,
            complexity_term(ComplexityKind::B, m, 2, 0.1)?,
            complexity_term(ComplexityKind::C, m, 2, 0.1)?
        );
    }

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/benign_shift.json");
    let config = parse_config(&std::fs::read_to_string(path)?, path)?;
    let exp = Experiment::new(config)?;
    let seed = 11;
    for theorem in [TheoremId::Thm1, TheoremId::Thm2] {
        show(&exp.bound_for_trial(theorem, seed)?);
    }

    let (best_alpha, best) = (0..=100)
        .map(|i| i as f64 / 100.0)
        .map(|a| exp.thm2_at(a, seed).map(|r| (a, r.rhs_total)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("grid is non-empty");
    println!("best alpha on the grid: {best_alpha:.2} (rhs {best:.4})");

    let (source, target) = (exp.resolved.source()?, exp.resolved.target()?);
    let class = &exp.resolved.class;
    show(&lemma1_rhs(class, class.member(3), source, target)?);
    show(&thm4_rhs(class, LossSpec::ZERO_ONE, class.member(3), source, target)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
