//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::time::{Duration, Instant};

use common::*;
use tlbounds::bounds::{lemma1_rhs, thm4_rhs, TheoremId};
use tlbounds::divergence::{discrepancy, hdh_divergence, key_inequality_check, rademacher, LossSpec, Measure, RademacherMode};
use tlbounds::domains::{sample_labeled, sample_unlabeled};
use tlbounds::erm::{erm, ideal_risk, WeightedRiskSpec};
use tlbounds::harness::output::parse_config;
use tlbounds::harness::{compare_multisource, run_command, verify_bound, Command, Experiment, ExperimentConfig, Overrides};
use tlbounds::htl::*;

/// Exact-arithmetic comparisons.
const EXACT_TOL: f64 = 1e-12;
const KEY_TOL: f64 = 1e-12;
const COVERAGE_DELTA: f64 = 0.1;
const COVERAGE_TRIALS: usize = 500;
const COVERAGE_TIME_LIMIT: Duration = Duration::from_secs(60);
const RADEMACHER_DRAWS: usize = 10_000;
const RADEMACHER_SIGMAS: f64 = 3.0;
const GRADIENT_TOL: f64 = 1e-8;
const FD_REL_TOL: f64 = 1e-6;
const LOO_TOL: f64 = 1e-10;

fn fixture(name: &str) -> ExperimentConfig {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_config(&std::fs::read_to_string(&path).unwrap(), &path).unwrap()
}

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let pr = random_problem(1_000_000 + seed, 32, 64);
        let (p, q) = (pr.source_probs(), pr.target_probs());
        let (mp, mq) = (Measure::from(&pr.source), Measure::from(&pr.target));
        worst = worst.max((hdh_divergence(&pr.class, &mp, &mq).unwrap() - oracle_hdh(&pr.members, p, q)).abs());
        for (loss, squared) in [(LossSpec::ZERO_ONE, false), (LossSpec::SQUARED, true)] {
            let d = discrepancy(&pr.class, loss, &mp, &mq).unwrap();
            worst = worst.max((d - oracle_discrepancy(&pr.members, p, q, squared)).abs());
        }
        let s = sample_labeled(&pr.source, 1 + (seed as usize % 40), seed).unwrap();
        let got = erm(&WeightedRiskSpec::new().empirical(1.0, &s).unwrap(), &pr.class).unwrap();
        let (idx, min) = oracle_argmin(&pr.members, |h| oracle_empirical(s.entries(), h));
        if got.index != idx {
            return Err(format!("erm index {} vs oracle {idx} (seed {seed})", got.index));
        }
        worst = worst.max((got.objective - min).abs());
        let lam = ideal_risk(&[(1.0, &pr.source), (1.0, &pr.target)], &pr.class).unwrap();
        let (fs, ft) = (pr.source.label_fn().outputs(), pr.target.label_fn().outputs());
        let (idx, min) = oracle_argmin(&pr.members, |h| oracle_abs_mass(p, h, fs) + oracle_abs_mass(q, h, ft));
        if lam.index != idx {
            return Err(format!("ideal_risk index {} vs oracle {idx} (seed {seed})", lam.index));
        }
        worst = worst.max((lam.objective - min).abs());
    }
    check(worst <= EXACT_TOL, format!("100 configs, max |lib - oracle| = {worst:e} (tol {EXACT_TOL:e})"))
}

fn c2_key_inequality() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..200u64 {
        let pr = random_problem(2_000_000 + seed, 32, 64);
        worst = worst.max(key_inequality_check(&pr.class, &pr.source, &pr.target).unwrap().max_violation);
    }
    check(worst <= KEY_TOL, format!("200 configs, max violation = {worst:e} (tol {KEY_TOL:e})"))
}

fn c3_deterministic_bounds() -> Outcome {
    let (mut lemma_checked, mut thm4_checked) = (0, 0);
    for seed in 0..500u64 {
        let pr = random_problem(3_000_000 + seed, 16, 32);
        for h in pr.class.members() {
            let l = lemma1_rhs(&pr.class, h, &pr.source, &pr.target).unwrap();
            let t = thm4_rhs(&pr.class, LossSpec::ZERO_ONE, h, &pr.source, &pr.target).unwrap();
            if l.holds != Some(true) || t.holds != Some(true) {
                return Err(format!("violation at seed {seed}"));
            }
            lemma_checked += 1;
            thm4_checked += 1;
        }
    }
    Ok(format!("500 configs, every member: lemma1 {lemma_checked} holds, thm4 {thm4_checked} holds"))
}

fn c4_discrepancy_identity() -> Outcome {
    for seed in 0..100u64 {
        let pr = random_problem(4_000_000 + seed, 32, 64);
        let (p, q) = (Measure::from(&pr.source), Measure::from(&pr.target));
        let d = discrepancy(&pr.class, LossSpec::ZERO_ONE, &p, &q).unwrap();
        let h = hdh_divergence(&pr.class, &p, &q).unwrap();
        if d != 0.5 * h {
            return Err(format!("seed {seed}: disc {d} != hdh/2 {}", 0.5 * h));
        }
    }
    Ok("100 configs, disc == hdh/2 bit-exactly".into())
}

fn c5_coverage() -> Outcome {
    let runs = [
        (TheoremId::Thm1, vec!["benign_shift.json", "hostile_shift.json"]),
        (TheoremId::Thm2, vec!["benign_shift.json", "hostile_shift.json"]),
        (TheoremId::Thm3, vec!["three_source_asymmetric.json"]),
        (TheoremId::Thm7, vec!["three_source_asymmetric.json"]),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (theorem, files) in runs {
        let start = Instant::now();
        for file in files {
            let mut cfg = fixture(file);
            cfg.trials = COVERAGE_TRIALS;
            cfg.params.delta = COVERAGE_DELTA;
            let r = verify_bound(&cfg, Some(theorem)).unwrap();
            ok &= r.within_allowance && r.trials == COVERAGE_TRIALS;
            parts.push(format!("{theorem}/{}: {}/{} (max {:.4})", file.trim_end_matches(".json"), r.violations, r.trials, r.max_allowed_rate));
        }
        let elapsed = start.elapsed();
        ok &= elapsed <= COVERAGE_TIME_LIMIT;
        parts.push(format!("{theorem} {:.2}s", elapsed.as_secs_f64()));
    }
    check(ok, parts.join("; "))
}

fn c6_alpha_tradeoff() -> Outcome {
    let mut cases = 0;
    for file in ["benign_shift.json", "hostile_shift.json"] {
        let exp = Experiment::new(fixture(file)).unwrap();
        for trial in 0..20 {
            let seed = tlbounds::harness::experiment::trial_seed(exp.config.seed, trial);
            let grid: Vec<f64> = (0..=100).map(|i| exp.thm2_at(i as f64 / 100.0, seed).unwrap().rhs_total).collect();
            let best = grid.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(best <= grid[0].min(grid[100])) {
                return Err(format!("{file} trial {trial}: grid min {best} > endpoint min"));
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} fixture draws, grid-optimal rhs <= min(rhs at 0, rhs at 1)"))
}

fn c7_multi_source() -> Outcome {
    let mut cfg = fixture("three_source_asymmetric.json");
    cfg.trials = 500;
    let a = compare_multisource(&cfg).unwrap();
    let b = compare_multisource(&cfg).unwrap();
    let same = serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap();
    check(
        a.fraction_thm7_tighter >= 0.5 && same,
        format!("thm7 tighter in {}/{} trials ({:.3}); rerun identical: {same}", a.thm7_tighter_count, a.trials, a.fraction_thm7_tighter),
    )
}

fn c8_rademacher() -> Outcome {
    let mut worst_z: f64 = 0.0;
    for k in 0..20u64 {
        let pr = random_problem(8_000_000 + k, 12, 64);
        let m = 1 + (k as usize % 12);
        let s = sample_unlabeled(&pr.source, m, k).unwrap();
        let exact = rademacher(&pr.class, &s, RademacherMode::Exact).unwrap();
        let mc = rademacher(&pr.class, &s, RademacherMode::MonteCarlo { draws: RADEMACHER_DRAWS, seed: k }).unwrap();
        let diff = (exact.value - mc.value).abs();
        if mc.std_error == 0.0 {
            if diff > EXACT_TOL {
                return Err(format!("class {k}: zero-variance estimate off by {diff}"));
            }
        } else {
            worst_z = worst_z.max(diff / mc.std_error);
        }
    }
    check(worst_z <= RADEMACHER_SIGMAS, format!("20 classes, m <= 12, max |exact - mc| / se = {worst_z:.3} (limit {RADEMACHER_SIGMAS})"))
}

fn c9_htl_numerics() -> Outcome {
    let mut r = rng(9);
    use rand::Rng;
    let (mut g_worst, mut fd_worst, mut loo_worst): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for t in 0..20 {
        let dim = 1 + t % 4;
        let m = 5 + 3 * t;
        let xs: Vec<Vec<f64>> = (0..m).map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let ys: Vec<f64> = (0..m).map(|_| r.random_range(-1.0..1.0)).collect();
        let s = RegressionSample::new(xs, ys, 1.0).unwrap();
        let f = SourcePredictor::linear(vec![0.2; dim], 0.05, 0.2 * dim as f64 + 0.05);
        let lambda = 0.01 + 0.02 * t as f64;
        let model = train_htl(&s, &f, lambda, f64::INFINITY).unwrap();
        let g = htl_gradient(&s, &f, lambda, &model.w).unwrap();
        g_worst = g_worst.max(g.iter().map(|v| v * v).sum::<f64>().sqrt());

        let u: Vec<f64> = (0..dim).map(|_| r.random_range(-2.0..2.0)).collect();
        let g = htl_gradient(&s, &f, lambda, &u).unwrap();
        for j in 0..dim {
            let (mut up, mut dn) = (u.clone(), u.clone());
            up[j] += 1e-5;
            dn[j] -= 1e-5;
            let fd = (htl_objective(&s, &f, lambda, &up).unwrap() - htl_objective(&s, &f, lambda, &dn).unwrap()) / 2e-5;
            fd_worst = fd_worst.max((fd - g[j]).abs() / g[j].abs().max(1.0));
        }
        for c in [f64::INFINITY, 0.3] {
            let naive = loo_risk(&s, |x| train_htl(x, &f, lambda, c)).unwrap();
            let fast = htl_loo_closed_form(&s, &f, lambda, c).unwrap();
            loo_worst = loo_worst.max((naive - fast).abs());
        }
    }
    let hand = RegressionSample::new(vec![vec![1.0]], vec![1.0], 1.0).unwrap();
    let w = train_htl(&hand, &SourcePredictor::zero(), 1.0, f64::INFINITY).unwrap().w;
    check(
        g_worst <= GRADIENT_TOL && fd_worst <= FD_REL_TOL && loo_worst <= LOO_TOL && w == vec![0.5],
        format!("|grad| {g_worst:e}, fd rel {fd_worst:e}, loo diff {loo_worst:e}, hand w = {w:?}"),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn c10_stability_scaling() -> Outcome {
    let cfg = fixture("htl_stability.json");
    let reg = cfg.domains.regression.clone().unwrap();
    let c = cfg.params.truncation.unwrap_or(f64::INFINITY);
    let trials = cfg.trials;
    let gap = |m: usize, lambda_reg: f64| -> f64 {
        median(
            (0..10u64)
                .map(|s| {
                    let sc = StabilityConfig { target: reg.target.clone(), source: reg.source.build(), m, lambda_reg, c };
                    estimate_stability_gap(&sc, trials, cfg.seed + s).unwrap().mean_sq_gap
                })
                .collect(),
        )
    };
    let m0 = 20;
    let by_m: Vec<f64> = [20, 40, 80].iter().map(|&m| gap(m, 1.0 / m0 as f64)).collect();
    let mut ok = by_m.windows(2).all(|w| w[1] < w[0]);
    let mut parts = vec![format!("lambda=1/{m0}: m 20/40/80 -> {:.3e}/{:.3e}/{:.3e}", by_m[0], by_m[1], by_m[2])];
    for m in [20usize, 40, 80] {
        let by_l: Vec<f64> = [1.0, 3.0, 10.0].iter().map(|k| gap(m, k / m as f64)).collect();
        ok &= by_l.windows(2).all(|w| w[1] < w[0]);
        parts.push(format!("m={m}: lambda 1,3,10/m -> {:.3e}/{:.3e}/{:.3e}", by_l[0], by_l[1], by_l[2]));
    }
    check(ok, parts.join("; "))
}

fn c11_determinism() -> Outcome {
    let cases = [
        (Command::Verify, "benign_shift.json", Some(TheoremId::Thm2), 200),
        (Command::Verify, "three_source_asymmetric.json", Some(TheoremId::Thm7), 100),
        (Command::Compare, "three_source_asymmetric.json", None, 100),
        (Command::Htl, "htl_stability.json", None, 50),
        (Command::Divergence, "hostile_shift.json", None, 1),
    ];
    for (command, file, theorem, trials) in cases {
        let overrides = Overrides { theorem, trials: Some(trials), ..Overrides::default() };
        let mut outputs = Vec::new();
        for workers in [Some(1), Some(4), None, Some(4)] {
            let out = run_command(command, fixture(file), &overrides, workers).unwrap();
            outputs.push((out.report_json(), out.csv_string().unwrap()));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{} on {file} differs across runs", command.as_str()));
        }
    }
    let dirs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let cfg = format!("{}/fixtures/three_source_asymmetric.json", env!("CARGO_MANIFEST_DIR"));
    for (dir, workers) in dirs.iter().zip(["1", "4"]) {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_tlbounds"))
            .args(["compare", "--config", &cfg, "--trials", "50", "--workers", workers, "--output"])
            .arg(dir.path())
            .output()
            .unwrap();
        if !out.status.success() {
            return Err("cli run failed".into());
        }
    }
    for f in ["report.json", "trials.csv"] {
        if std::fs::read(dirs[0].path().join(f)).unwrap() != std::fs::read(dirs[1].path().join(f)).unwrap() {
            return Err(format!("cli {f} differs between worker counts"));
        }
    }
    Ok("5 library runs x 4 repeats (workers 1/4/default) and CLI files byte-identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("exact-oracle equivalence", c1_oracle_equivalence),
        ("key inequality", c2_key_inequality),
        ("deterministic bounds hold", c3_deterministic_bounds),
        ("discrepancy identity", c4_discrepancy_identity),
        ("coverage at delta=0.1", c5_coverage),
        ("alpha trade-off", c6_alpha_tradeoff),
        ("peer bound vs mixture bound", c7_multi_source),
        ("rademacher cross-check", c8_rademacher),
        ("htl numerics", c9_htl_numerics),
        ("stability scaling", c10_stability_scaling),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
