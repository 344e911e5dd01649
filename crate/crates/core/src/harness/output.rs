//! Command dispatch, override handling and the `report.json` / `trials.csv` writers.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bounds::{lemma1_rhs, thm4_rhs, BoundReport, TheoremId};
use crate::divergence::{discrepancy, hdh_divergence, hdh_divergence_detail, key_inequality_check, LossSpec, Measure};
use crate::domains::{expected_risk, sample_unlabeled, DiscreteDomain};
use crate::error::Error;
use crate::rng::{derive_seed, ALGORITHM_ID};

use super::compare::compare_multisource;
use super::config::{ExperimentConfig, Scenario};
use super::coverage::verify_experiment;
use super::experiment::{trial_seed, Experiment};
use super::stability::stability_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Divergence,
    Erm,
    Bound,
    Verify,
    Compare,
    Htl,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Divergence => "divergence",
            Command::Erm => "erm",
            Command::Bound => "bound",
            Command::Verify => "verify",
            Command::Compare => "compare",
            Command::Htl => "htl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub theorem: Option<TheoremId>,
    pub trials: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(t) = self.trials {
            config.trials = t;
        }
        if let Some(d) = self.delta {
            config.params.delta = d;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
    }
}

/// Failures reported by the command-line front end.
#[derive(Debug, Clone, PartialEq)]
pub enum HarnessError {
    /// Malformed or inconsistent configuration.
    Schema(String),
    /// Failure while computing or writing results.
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Schema(_) => 2,
            HarnessError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Schema(m) => write!(f, "schema error: {m}"),
            HarnessError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for HarnessError {}

fn schema(e: impl fmt::Display) -> HarnessError {
    HarnessError::Schema(e.to_string())
}

fn runtime(e: impl fmt::Display) -> HarnessError {
    HarnessError::Runtime(e.to_string())
}

/// Parses a config, reporting syntax and shape errors with their position.
pub fn parse_config(text: &str, origin: &str) -> Result<ExperimentConfig, HarnessError> {
    ExperimentConfig::from_json_str(text).map_err(|e| {
        HarnessError::Schema(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

/// A finished command: the JSON report and the rows for `trials.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Value,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
}

impl RunOutput {
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report is plain JSON");
        s.push('\n');
        s
    }

    pub fn csv_string(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.csv_header).map_err(runtime)?;
        for r in &self.csv_rows {
            w.write_record(r).map_err(runtime)?;
        }
        let bytes = w.into_inner().map_err(runtime)?;
        String::from_utf8(bytes).map_err(runtime)
    }

    /// Writes `report.json` and/or `trials.csv` into `dir`; `None` writes both.
    pub fn write(&self, dir: &Path, format: Option<OutputFormat>) -> Result<Vec<PathBuf>, HarnessError> {
        std::fs::create_dir_all(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        if format != Some(OutputFormat::Csv) {
            let p = dir.join("report.json");
            std::fs::write(&p, self.report_json()).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
            written.push(p);
        }
        if format != Some(OutputFormat::Json) {
            let p = dir.join("trials.csv");
            std::fs::write(&p, self.csv_string()?).map_err(|e| runtime(format!("{}: {e}", p.display())))?;
            written.push(p);
        }
        Ok(written)
    }
}

/// Applies overrides and runs `command`, optionally on a dedicated pool of `workers` threads.
pub fn run_command(
    command: Command,
    mut config: ExperimentConfig,
    overrides: &Overrides,
    workers: Option<usize>,
) -> Result<RunOutput, HarnessError> {
    overrides.apply(&mut config);
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(runtime)?;
            pool.install(|| dispatch(command, config, overrides.theorem))
        }
        None => dispatch(command, config, overrides.theorem),
    }
}

fn dispatch(command: Command, config: ExperimentConfig, theorem: Option<TheoremId>) -> Result<RunOutput, HarnessError> {
    if command == Command::Htl {
        if config.scenario != Scenario::HtlStability {
            return Err(schema("the htl command needs an htl_stability config"));
        }
        let report = stability_grid(&config).map_err(classify)?;
        let rows = report
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.m.to_string(),
                    r.lambda_reg.to_string(),
                    if r.c.is_finite() { r.c.to_string() } else { "inf".into() },
                    r.trials.to_string(),
                    r.mean_sq_gap.to_string(),
                    r.stderr.to_string(),
                    r.seed.to_string(),
                ]
            })
            .collect();
        return Ok(RunOutput {
            report: tagged(command, &report),
            csv_header: ["m", "lambda_reg", "C", "trials", "mean_sq_gap", "stderr", "seed"].map(String::from).to_vec(),
            csv_rows: rows,
        });
    }

    let exp = Experiment::new(config).map_err(schema)?;
    if exp.config.scenario == Scenario::HtlStability {
        return Err(schema(format!("the {} command needs a classification config", command.as_str())));
    }
    if let Some(t) = theorem {
        if !exp.supports(t) {
            return Err(schema(format!("{t} cannot be evaluated on a {} config", exp.config.scenario.as_str())));
        }
    }
    match command {
        Command::Divergence => divergence_command(&exp),
        Command::Erm => erm_command(&exp),
        Command::Bound => bound_command(&exp, theorem.unwrap_or_else(|| exp.default_theorem())),
        Command::Verify => {
            if exp.config.trials == 0 {
                return Err(schema("trials must be positive"));
            }
            let t = theorem.unwrap_or_else(|| exp.default_theorem());
            if !t.is_probabilistic() {
                return Err(schema(format!("{t} is deterministic; use the bound command")));
            }
            let report = verify_experiment(&exp, Some(t)).map_err(classify)?;
            let term_names: Vec<String> = report.per_trial.first().map(|r| r.terms.keys().cloned().collect()).unwrap_or_default();
            let mut header = ["trial", "seed", "lhs", "rhs", "holds"].map(String::from).to_vec();
            header.extend(term_names);
            let rows = report
                .per_trial
                .iter()
                .map(|r| {
                    let mut row = vec![r.trial.to_string(), r.seed.to_string(), r.lhs.to_string(), r.rhs.to_string(), r.holds.to_string()];
                    row.extend(r.terms.values().map(f64::to_string));
                    row
                })
                .collect();
            Ok(RunOutput {
                report: tagged(command, &report),
                csv_header: header,
                csv_rows: rows,
            })
        }
        Command::Compare => {
            if exp.config.scenario != Scenario::MultiSource || !exp.supports(TheoremId::Thm7) {
                return Err(schema("compare needs a multi_source config with at least two sources, m_prime and mu"));
            }
            let report = compare_multisource(&exp.config).map_err(classify)?;
            let rows = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.trial.to_string(),
                        r.seed.to_string(),
                        r.thm3_rhs.to_string(),
                        r.thm7_rhs.to_string(),
                        r.thm3_lhs.to_string(),
                        r.thm7_lhs.to_string(),
                        r.thm7_tighter.to_string(),
                    ]
                })
                .collect();
            Ok(RunOutput {
                report: tagged(command, &report),
                csv_header: ["trial", "seed", "thm3_rhs", "thm7_rhs", "thm3_lhs", "thm7_lhs", "thm7_tighter"]
                    .map(String::from)
                    .to_vec(),
                csv_rows: rows,
            })
        }
        Command::Htl => unreachable!("handled above"),
    }
}

/// Errors raised after validation are runtime failures unless they name a bad input.
fn classify(e: Error) -> HarnessError {
    match e {
        Error::InvalidParameter { .. } | Error::UnsupportedClass(_) => schema(e),
        other => runtime(other),
    }
}

fn tagged<T: Serialize>(command: Command, body: &T) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), json!(command.as_str()));
    match serde_json::to_value(body).expect("reports serialize") {
        Value::Object(inner) => map.extend(inner),
        other => {
            map.insert("result".into(), other);
        }
    }
    Value::Object(map)
}

fn domain_pairs(exp: &Experiment) -> Vec<(String, &DiscreteDomain, &DiscreteDomain)> {
    let r = &exp.resolved;
    let mut pairs = Vec::new();
    if let (Some(s), Some(t)) = (&r.source, &r.target) {
        pairs.push(("source|target".to_string(), s, t));
    }
    if let Some(t) = &r.target {
        for (j, s) in r.sources.iter().enumerate() {
            pairs.push((format!("source{j}|target"), s, t));
        }
        if let Some(mix) = &exp.mixture {
            pairs.push(("mixture|target".to_string(), mix, t));
        }
    }
    pairs
}

#[derive(Serialize)]
struct DivergenceRow {
    pair: String,
    hdh_divergence: f64,
    argmax_pair: (usize, usize),
    discrepancy_zero_one: f64,
    discrepancy_squared: f64,
    key_inequality_max_violation: f64,
    empirical_hdh_divergence: Option<f64>,
}

fn divergence_command(exp: &Experiment) -> Result<RunOutput, HarnessError> {
    let class = &exp.resolved.class;
    let seed = trial_seed(exp.config.seed, 0);
    let mut rows = Vec::new();
    for (j, (name, s, t)) in domain_pairs(exp).into_iter().enumerate() {
        let (p, q) = (Measure::from(s), Measure::from(t));
        let detail = hdh_divergence_detail(class, &p, &q).map_err(classify)?;
        let key = key_inequality_check(class, s, t).map_err(classify)?;
        let empirical = match exp.config.params.m_prime {
            Some(mp) => {
                let us = sample_unlabeled(s, mp, derive_seed(seed, 2 * j as u64)).map_err(classify)?;
                let ut = sample_unlabeled(t, mp, derive_seed(seed, 2 * j as u64 + 1)).map_err(classify)?;
                let (ps, pt) = (Measure::from_sample(&us).map_err(classify)?, Measure::from_sample(&ut).map_err(classify)?);
                Some(hdh_divergence(class, &ps, &pt).map_err(classify)?)
            }
            None => None,
        };
        rows.push(DivergenceRow {
            pair: name,
            hdh_divergence: detail.value,
            argmax_pair: detail.argmax_pair,
            discrepancy_zero_one: discrepancy(class, LossSpec::ZERO_ONE, &p, &q).map_err(classify)?,
            discrepancy_squared: discrepancy(class, LossSpec::SQUARED, &p, &q).map_err(classify)?,
            key_inequality_max_violation: key.max_violation,
            empirical_hdh_divergence: empirical,
        });
    }
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.pair.clone(),
                r.hdh_divergence.to_string(),
                r.discrepancy_zero_one.to_string(),
                r.discrepancy_squared.to_string(),
                r.key_inequality_max_violation.to_string(),
                r.empirical_hdh_divergence.map(|v| v.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let body = json!({
        "rng_algorithm": ALGORITHM_ID,
        "master_seed": exp.config.seed,
        "class_size": class.len(),
        "vc_dim": class.vc_dim(),
        "pairs": rows,
        "config": exp.config,
    });
    Ok(RunOutput {
        report: tagged(Command::Divergence, &body),
        csv_header: ["pair", "hdh_divergence", "discrepancy_zero_one", "discrepancy_squared", "key_inequality_max_violation", "empirical_hdh_divergence"]
            .map(String::from)
            .to_vec(),
        csv_rows,
    })
}

fn erm_command(exp: &Experiment) -> Result<RunOutput, HarnessError> {
    let seed = trial_seed(exp.config.seed, 0);
    let target = exp.resolved.target.as_ref();
    let mut results: Vec<(String, crate::erm::ErmResult)> = Vec::new();
    results.push(("weighted_erm".into(), exp.weighted_erm(seed).map_err(classify)?));
    if exp.config.scenario == Scenario::MultiSource {
        let draw = exp.draw_multi_source(seed).map_err(classify)?;
        for (j, r) in exp.per_source_erm(&draw).map_err(classify)?.into_iter().enumerate() {
            results.push((format!("source{j}_erm"), r));
        }
    }
    if let Some(l) = &exp.lambda {
        results.push(("lambda".into(), l.clone()));
    }
    if let Some(l) = &exp.lambda_alpha {
        results.push(("lambda_alpha".into(), l.clone()));
    }
    if let (Some(mu), true) = (exp.config.params.mu, exp.resolved.sources.len() >= 2) {
        results.push(("lambda_alpha_mu".into(), exp.lambda_alpha_mu(mu).map_err(classify)?));
    }
    let mut entries = Vec::new();
    let mut csv_rows = Vec::new();
    for (name, r) in &results {
        let target_risk = match target {
            Some(t) => Some(expected_risk(t, &r.hypothesis, None).map_err(classify)?),
            None => None,
        };
        csv_rows.push(vec![
            name.clone(),
            r.index.to_string(),
            r.objective.to_string(),
            r.tie_count.to_string(),
            target_risk.map(|v| v.to_string()).unwrap_or_default(),
        ]);
        let mut v = serde_json::to_value(r).expect("erm result serializes");
        if let Value::Object(m) = &mut v {
            m.insert("name".into(), json!(name));
            m.insert("target_risk".into(), json!(target_risk));
        }
        entries.push(v);
    }
    let body = json!({
        "rng_algorithm": ALGORITHM_ID,
        "master_seed": exp.config.seed,
        "trial_seed": seed,
        "results": entries,
        "config": exp.config,
    });
    Ok(RunOutput {
        report: tagged(Command::Erm, &body),
        csv_header: ["name", "index", "objective", "tie_count", "target_risk"].map(String::from).to_vec(),
        csv_rows,
    })
}

fn bound_command(exp: &Experiment, theorem: TheoremId) -> Result<RunOutput, HarnessError> {
    if !exp.supports(theorem) {
        return Err(schema(format!("{theorem} cannot be evaluated on a {} config", exp.config.scenario.as_str())));
    }
    let seed = trial_seed(exp.config.seed, 0);
    let reports: Vec<(Option<usize>, BoundReport)> = match theorem {
        TheoremId::Lemma1 | TheoremId::Thm4 => {
            let (s, t) = (exp.resolved.source().map_err(schema)?, exp.resolved.target().map_err(schema)?);
            exp.resolved
                .class
                .members()
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let r = if theorem == TheoremId::Lemma1 {
                        lemma1_rhs(&exp.resolved.class, h, s, t)
                    } else {
                        thm4_rhs(&exp.resolved.class, LossSpec::ZERO_ONE, h, s, t)
                    };
                    r.map(|r| (Some(i), r)).map_err(classify)
                })
                .collect::<Result<_, _>>()?
        }
        _ => vec![(None, exp.bound_for_trial(theorem, seed).map_err(classify)?)],
    };
    let mut csv_header = vec!["member".to_string()];
    csv_header.extend(reports[0].1.csv_header());
    let csv_rows = reports
        .iter()
        .map(|(i, r)| {
            let mut row = vec![i.map(|i| i.to_string()).unwrap_or_default()];
            row.extend(r.csv_record());
            row
        })
        .collect();
    let body = json!({
        "theorem_id": theorem,
        "rng_algorithm": ALGORITHM_ID,
        "master_seed": exp.config.seed,
        "trial_seed": seed,
        "reports": reports.iter().map(|(_, r)| r).collect::<Vec<_>>(),
        "config": exp.config,
    });
    Ok(RunOutput {
        report: tagged(Command::Bound, &body),
        csv_header,
        csv_rows,
    })
}
