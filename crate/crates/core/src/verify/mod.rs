//! Exhaustive small-model harnesses. Each harness expands a [`SweepSpec`]
//! into independent cases, runs them in parallel and collects a
//! [`Report`] whose failures carry serialized counterexamples.

mod corpus;
mod enumerate;
mod equivalences;
mod maximal;
mod report;
mod semantics;

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use corpus::{
    corpus_vars, dep_corpus, exhaustive, fo_corpus, fo_leaves, fo_pool, random_formulas, AtomFamily,
    SIGNATURE,
};
pub use enumerate::{enumerate_models, enumerate_relations, enumerate_teams, ENUM_LIMIT};
pub use report::{Artifact, CaseResult, Engine, Report, Verdict};

use crate::deps::DepError;
use crate::eval::EvalError;
use crate::model::ModelError;
use crate::syntax::{FormulaError, ParseError};
use crate::transforms::TransformError;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown harness `{0}`")]
    UnknownHarness(String),
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("enumeration of {count} {what} exceeds the guard")]
    Guard { what: &'static str, count: u128 },
    #[error("bad sweep parameter: {0}")]
    Spec(String),
    #[error("report line {line}: {msg}")]
    Report { line: usize, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Dependency(#[from] DepError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Parameters of a sweep. `None` bounds fall back to each harness's
/// default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub max_domain: Option<usize>,
    pub max_rows: Option<usize>,
    pub seed: u64,
    /// Number of seeded random formulas added to exhaustive corpora.
    pub random: usize,
    /// Dependencies (builtin names) for the harnesses that take one.
    pub deps: Vec<String>,
    /// Cap on the number of cases run.
    pub budget: Option<usize>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            max_domain: None,
            max_rows: None,
            seed: 42,
            random: 200,
            deps: Vec::new(),
            budget: None,
        }
    }
}

impl SweepSpec {
    pub fn domain(&self, default: usize) -> usize {
        self.max_domain.unwrap_or(default)
    }

    pub fn rows(&self, default: usize) -> usize {
        self.max_rows.unwrap_or(default)
    }

    fn describe(&self) -> String {
        let opt = |o: Option<usize>| o.map_or("default".to_string(), |n| n.to_string());
        format!(
            "max-domain={} max-rows={} seed={} random={} deps={} budget={}",
            opt(self.max_domain),
            opt(self.max_rows),
            self.seed,
            self.random,
            if self.deps.is_empty() { "default".to_string() } else { self.deps.join(",") },
            opt(self.budget)
        )
    }
}

/// A verdict or evaluation error as recorded in an artifact.
pub(crate) fn show(r: &Result<bool, EvalError>) -> String {
    match r {
        Ok(b) => b.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

pub(crate) enum Outcome {
    Pass,
    Fail(Artifact),
    NotApplicable(String),
}

type Check = Box<dyn Fn() -> Result<Outcome, VerifyError> + Send + Sync>;

pub(crate) struct Case {
    pub id: String,
    pub check: Check,
}

impl Case {
    pub fn new(id: String, check: impl Fn() -> Result<Outcome, VerifyError> + Send + Sync + 'static) -> Case {
        Case {
            id,
            check: Box::new(check),
        }
    }

    fn run(&self) -> CaseResult {
        let (verdict, artifact, reason) = match (self.check)() {
            Ok(Outcome::Pass) => (Verdict::Pass, None, String::new()),
            Ok(Outcome::Fail(a)) => (Verdict::Fail, Some(a), String::new()),
            Ok(Outcome::NotApplicable(r)) => (Verdict::NotApplicable, None, r),
            Err(e) => (Verdict::Fail, None, format!("error: {e}")),
        };
        CaseResult {
            id: self.id.clone(),
            verdict,
            artifact,
            reason,
        }
    }
}

/// The named harnesses, in the order the CLI lists them.
pub const HARNESSES: [&str; 18] = [
    "flatness",
    "locality",
    "closure-transfer",
    "sugar-selimp",
    "sugar-booldisj",
    "positive-upwards",
    "extraction",
    "singleocc",
    "dep-union",
    "qfree-putback",
    "putback-sentence",
    "pipeline",
    "phiR",
    "thetaT",
    "eq1",
    "nt-relativized",
    "closed-world-relativize",
    "const-not-flat",
];

/// Which operations each harness exercises against an independent oracle.
pub const COVERAGE: [(&str, &[&str]); 18] = [
    ("flatness", &["team_eval", "sentence_true", "tarski_eval", "to_nnf"]),
    ("locality", &["team_eval", "free_vars", "restrict_team"]),
    ("closure-transfer", &["team_eval", "check_closure", "dep_holds"]),
    ("sugar-selimp", &["desugar", "select_team", "team_eval"]),
    ("sugar-booldisj", &["desugar", "team_eval"]),
    ("positive-upwards", &["check_positive", "team_eval"]),
    ("extraction", &["extract_atoms", "dep_holds"]),
    ("singleocc", &["split_occurrences", "tarski_eval"]),
    ("dep-union", &["build_dep_union", "select_team", "project_team"]),
    ("qfree-putback", &["put_back_qfree", "enumerate_lax_supplements"]),
    ("putback-sentence", &["assemble_putback", "to_prenex", "split_occurrences"]),
    ("pipeline", &["safety_pipeline", "extract_atoms", "to_prenex", "sentence_true"]),
    ("phiR", &["build_phi_R", "compute_dmax", "dep_holds"]),
    ("thetaT", &["build_theta_T", "compute_dmax"]),
    ("eq1", &["build_eq1", "substitute_relation", "fo_dependency"]),
    ("nt-relativized", &["build_nt_relativized", "relativized_holds"]),
    ("closed-world-relativize", &["relativize_closed_world", "check_closed_world", "relativized_holds"]),
    ("const-not-flat", &["team_eval", "tarski_eval"]),
];

fn cases(name: &str, spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let mut cases = match name {
        "flatness" => semantics::flatness(spec)?,
        "locality" => semantics::locality(spec)?,
        "closure-transfer" => semantics::closure_transfer(spec)?,
        "sugar-selimp" => semantics::sugar_selimp(spec)?,
        "sugar-booldisj" => semantics::sugar_booldisj(spec)?,
        "positive-upwards" => semantics::positive_upwards(spec)?,
        "const-not-flat" => semantics::const_not_flat(spec)?,
        "extraction" => equivalences::extraction(spec)?,
        "singleocc" => equivalences::singleocc(spec)?,
        "dep-union" => equivalences::dep_union(spec)?,
        "qfree-putback" => equivalences::qfree_putback(spec)?,
        "putback-sentence" => equivalences::putback_sentence(spec)?,
        "pipeline" => equivalences::pipeline(spec)?,
        "phiR" => maximal::phi_r(spec)?,
        "thetaT" => maximal::theta_t(spec)?,
        "eq1" => maximal::eq1(spec)?,
        "nt-relativized" => maximal::nt_relativized(spec)?,
        "closed-world-relativize" => maximal::closed_world_relativize(spec)?,
        _ => return Err(VerifyError::UnknownHarness(name.to_string())),
    };
    if let Some(b) = spec.budget {
        cases.truncate(b);
    }
    Ok(cases)
}

/// Run every case of the harness `name`.
pub fn run_harness(name: &str, spec: &SweepSpec) -> Result<Report, VerifyError> {
    let start = Instant::now();
    let cases = cases(name, spec)?;
    let mut results: Vec<CaseResult> = cases.par_iter().map(Case::run).collect();
    results.sort_by(|a, b| report::natural(&a.id).cmp(&report::natural(&b.id)));
    Ok(Report {
        harness: name.to_string(),
        spec: spec.describe(),
        cases: results,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Re-run the single case `id` of a harness.
pub fn rerun_case(name: &str, spec: &SweepSpec, id: &str) -> Result<CaseResult, VerifyError> {
    let spec = SweepSpec {
        budget: None,
        ..spec.clone()
    };
    cases(name, &spec)?
        .into_iter()
        .find(|c| c.id == id)
        .map(|c| c.run())
        .ok_or_else(|| VerifyError::UnknownCase(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_manifest() {
        // operations with a stated semantic contract, plus the primitives
        // they rest on
        let required = [
            "free_vars",
            "to_nnf",
            "check_positive",
            "substitute_relation",
            "to_prenex",
            "select_team",
            "tarski_eval",
            "team_eval",
            "sentence_true",
            "desugar",
            "relativized_holds",
            "check_closure",
            "check_closed_world",
            "relativize_closed_world",
            "compute_dmax",
            "extract_atoms",
            "split_occurrences",
            "build_dep_union",
            "put_back_qfree",
            "assemble_putback",
            "safety_pipeline",
            "build_phi_R",
            "build_theta_T",
            "build_eq1",
            "build_nt_relativized",
        ];
        for op in required {
            assert!(COVERAGE.iter().any(|(_, ops)| ops.contains(&op)), "{op} is not covered");
        }
        let named: Vec<&str> = COVERAGE.iter().map(|(h, _)| *h).collect();
        assert_eq!(named, HARNESSES);
    }

    #[test]
    fn every_harness_runs_small() {
        let spec = SweepSpec {
            random: 8,
            budget: Some(6),
            ..SweepSpec::default()
        };
        for h in HARNESSES {
            let r = run_harness(h, &spec).unwrap();
            assert!(!r.cases.is_empty(), "{h}");
            assert!(r.passed(), "{h}: {}", r.summary());
        }
    }

    #[test]
    fn rerun_matches_run() {
        let spec = SweepSpec {
            random: 4,
            ..SweepSpec::default()
        };
        let r = run_harness("nt-relativized", &spec).unwrap();
        let again = rerun_case("nt-relativized", &spec, "nt-relativized/m2/p0").unwrap();
        let first = r.cases.iter().find(|c| c.id == again.id).unwrap();
        assert_eq!(first.verdict, again.verdict);
        assert_eq!(again.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn unknown_names() {
        let spec = SweepSpec::default();
        assert!(matches!(run_harness("nope", &spec), Err(VerifyError::UnknownHarness(_))));
        assert!(matches!(rerun_case("eq1", &spec, "eq1/none"), Err(VerifyError::UnknownCase(_))));
    }
}
