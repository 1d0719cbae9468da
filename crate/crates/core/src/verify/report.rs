use std::fmt::{self, Write as _};

use super::VerifyError;
use crate::deps::Registry;
use crate::eval::{team_eval, Disjunction, EvalConfig, Existential};
use crate::model::{parse_model, parse_team, write_model, write_team, Structure, Team};
use crate::syntax::{parse_formula, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Fail,
    /// Outside the hypotheses of the property under test.
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "n/a",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        match s {
            "pass" => Some(Verdict::Pass),
            "fail" => Some(Verdict::Fail),
            "n/a" => Some(Verdict::NotApplicable),
            _ => None,
        }
    }
}

/// Evaluator settings recorded with an artifact, so a recheck runs the
/// same search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Naive,
    Fast,
    Structural,
    /// Structural, with teams kept at their full width.
    Wide,
    /// The literal rules (every cover, no closure-based pruning) with
    /// memoisation; used where a closure property is under test.
    Plain,
}

impl Engine {
    pub fn config(self) -> EvalConfig {
        match self {
            Engine::Naive => EvalConfig::naive(),
            Engine::Fast => EvalConfig::fast(),
            Engine::Structural => EvalConfig::structural(),
            Engine::Wide => EvalConfig {
                memo: false,
                ..EvalConfig::structural()
            },
            Engine::Plain => EvalConfig {
                memo: true,
                disjunction: Disjunction::Naive,
                existential: Existential::PerRowH,
                pruning: false,
                flat_shortcut: false,
                trace: false,
            },
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Engine::Naive => "naive",
            Engine::Fast => "fast",
            Engine::Structural => "structural",
            Engine::Wide => "wide",
            Engine::Plain => "plain",
        }
    }

    fn parse(s: &str) -> Option<Engine> {
        [Engine::Naive, Engine::Fast, Engine::Structural, Engine::Wide, Engine::Plain]
            .into_iter()
            .find(|e| e.as_str() == s)
    }
}

/// A counterexample: `formula` evaluated on `team` in `model` gave
/// `actual` where the oracle says `expected`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub model: String,
    pub team: String,
    pub formula: String,
    pub engine: Engine,
    pub expected: bool,
    pub actual: String,
    pub note: String,
}

impl Artifact {
    pub fn new(m: &Structure, x: &Team, f: &Formula, engine: Engine, expected: bool, actual: &str) -> Artifact {
        Artifact {
            model: write_model(m),
            team: write_team(x, m),
            formula: f.to_string(),
            engine,
            expected,
            actual: actual.to_string(),
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Artifact {
        self.note = note.into();
        self
    }

    /// Re-evaluate the serialized formula on the serialized model and team.
    /// Returns the fresh verdict; a reproduced mismatch is `Ok(v)` with
    /// `v != expected`.
    pub fn recheck(&self, registry: &Registry) -> Result<bool, VerifyError> {
        let m = parse_model(&self.model)?;
        let x = parse_team(&self.team, &m)?;
        let f = parse_formula(&self.formula)?;
        Ok(team_eval(&m, registry, &x, &f, &self.engine.config())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseResult {
    pub id: String,
    pub verdict: Verdict,
    pub artifact: Option<Artifact>,
    /// Why a case is not applicable.
    pub reason: String,
}

/// Outcome of one harness run. Cases are sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub harness: String,
    pub spec: String,
    pub cases: Vec<CaseResult>,
    pub wall_ms: u128,
}

impl Report {
    pub fn count(&self, v: Verdict) -> usize {
        self.cases.iter().filter(|c| c.verdict == v).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> + '_ {
        self.cases.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    /// Merge another run of the same harness, keeping the canonical order.
    pub fn merge(mut self, other: Report) -> Report {
        self.cases.extend(other.cases);
        self.cases.sort_by(|a, b| natural(&a.id).cmp(&natural(&b.id)));
        self.wall_ms += other.wall_ms;
        self
    }

    /// One summary line.
    pub fn summary(&self) -> String {
        format!(
            "{} {}: {} cases, {} pass, {} fail, {} n/a, {} ms",
            self.harness,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases.len(),
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::NotApplicable),
            self.wall_ms
        )
    }

    /// Line-delimited machine format; see [`Report::parse`].
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "HARNESS {}", self.harness);
        let _ = writeln!(out, "SPEC {}", self.spec);
        let _ = writeln!(out, "TIME {}", self.wall_ms);
        for c in &self.cases {
            if c.reason.is_empty() {
                let _ = writeln!(out, "CASE {} {}", c.id, c.verdict.as_str());
            } else {
                let _ = writeln!(out, "CASE {} {} {}", c.id, c.verdict.as_str(), c.reason);
            }
        }
        for c in &self.cases {
            let Some(a) = &c.artifact else { continue };
            let _ = writeln!(out, "ARTIFACT {}", c.id);
            let _ = writeln!(out, "engine {}", a.engine.as_str());
            let _ = writeln!(out, "formula {}", a.formula);
            let _ = writeln!(out, "expected {}", a.expected);
            let _ = writeln!(out, "actual {}", a.actual);
            if !a.note.is_empty() {
                let _ = writeln!(out, "note {}", a.note);
            }
            for l in a.model.lines() {
                let _ = writeln!(out, "model {l}");
            }
            for l in a.team.lines() {
                let _ = writeln!(out, "team {l}");
            }
            out.push_str("END\n");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report, VerifyError> {
        let bad = |line: usize, msg: &str| VerifyError::Report {
            line,
            msg: msg.to_string(),
        };
        let mut report = Report {
            harness: String::new(),
            spec: String::new(),
            cases: Vec::new(),
            wall_ms: 0,
        };
        let mut current: Option<(usize, Artifact)> = None;
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            if let Some((_, a)) = current.as_mut() {
                match key {
                    "engine" => a.engine = Engine::parse(rest).ok_or_else(|| bad(n, "unknown engine"))?,
                    "formula" => a.formula = rest.to_string(),
                    "expected" => a.expected = rest.parse().map_err(|_| bad(n, "bad expected verdict"))?,
                    "actual" => a.actual = rest.to_string(),
                    "note" => a.note = rest.to_string(),
                    "model" => {
                        a.model.push_str(rest);
                        a.model.push('\n');
                    }
                    "team" => {
                        a.team.push_str(rest);
                        a.team.push('\n');
                    }
                    "END" => {
                        let (idx, a) = current.take().expect("inside artifact");
                        report.cases[idx].artifact = Some(a);
                    }
                    _ => return Err(bad(n, "unexpected line inside artifact")),
                }
                continue;
            }
            match key {
                "HARNESS" => report.harness = rest.to_string(),
                "SPEC" => report.spec = rest.to_string(),
                "TIME" => report.wall_ms = rest.parse().map_err(|_| bad(n, "bad time"))?,
                "CASE" => {
                    let mut parts = rest.splitn(3, ' ');
                    let id = parts.next().filter(|s| !s.is_empty()).ok_or_else(|| bad(n, "missing case id"))?;
                    let verdict = parts
                        .next()
                        .and_then(Verdict::parse)
                        .ok_or_else(|| bad(n, "bad verdict"))?;
                    report.cases.push(CaseResult {
                        id: id.to_string(),
                        verdict,
                        artifact: None,
                        reason: parts.next().unwrap_or("").to_string(),
                    });
                }
                "ARTIFACT" => {
                    let idx = report
                        .cases
                        .iter()
                        .position(|c| c.id == rest)
                        .ok_or_else(|| bad(n, "artifact for an unknown case"))?;
                    current = Some((
                        idx,
                        Artifact {
                            model: String::new(),
                            team: String::new(),
                            formula: String::new(),
                            engine: Engine::Fast,
                            expected: false,
                            actual: String::new(),
                            note: String::new(),
                        },
                    ));
                }
                "" => {}
                _ => return Err(bad(n, "unexpected line")),
            }
        }
        if current.is_some() {
            return Err(bad(text.lines().count(), "artifact is missing END"));
        }
        Ok(report)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary())?;
        writeln!(f, "  spec: {}", self.spec)?;
        let na: Vec<&CaseResult> = self.cases.iter().filter(|c| c.verdict == Verdict::NotApplicable).collect();
        if let Some(c) = na.first() {
            writeln!(f, "  n/a: {} cases, e.g. {}: {}", na.len(), c.id, c.reason)?;
        }
        for c in self.failures() {
            writeln!(f, "  FAIL {}", c.id)?;
            if let Some(a) = &c.artifact {
                writeln!(f, "    formula: {}", a.formula)?;
                writeln!(f, "    expected {}, got {}", a.expected, a.actual)?;
                if !a.note.is_empty() {
                    writeln!(f, "    {}", a.note)?;
                }
                for l in a.model.lines().chain(a.team.lines()) {
                    writeln!(f, "    | {l}")?;
                }
            }
        }
        Ok(())
    }
}

/// Sort key that orders numeric id segments numerically.
pub(crate) fn natural(id: &str) -> Vec<(u64, String)> {
    id.split('/')
        .map(|s| match s.parse::<u64>() {
            Ok(n) => (n, String::new()),
            Err(_) => (u64::MAX, s.to_string()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vars;

    fn sample() -> Report {
        let mut m = Structure::canonical(2).unwrap();
        m.add_predicate("P", [1]).unwrap();
        m.add_relation("_W", crate::model::Relation::from_tuples(2, [vec![0, 1]]).unwrap()).unwrap();
        let x = Team::new(vars(&["x", "y"]), vec![vec![0, 1], vec![1, 1]]).unwrap();
        let f = parse_formula("P(x) | #const(y)").unwrap();
        Report {
            harness: "demo".into(),
            spec: "max-domain=2".into(),
            cases: vec![
                CaseResult {
                    id: "demo/0".into(),
                    verdict: Verdict::Pass,
                    artifact: None,
                    reason: String::new(),
                },
                CaseResult {
                    id: "demo/1".into(),
                    verdict: Verdict::Fail,
                    artifact: Some(Artifact::new(&m, &x, &f, Engine::Structural, false, "true").with_note("for show")),
                    reason: String::new(),
                },
                CaseResult {
                    id: "demo/2".into(),
                    verdict: Verdict::NotApplicable,
                    artifact: None,
                    reason: "one-element domain".into(),
                },
            ],
            wall_ms: 17,
        }
    }

    #[test]
    fn round_trip() {
        let r = sample();
        let text = r.serialize();
        assert!(text.contains("CASE demo/1 fail\n"));
        let back = Report::parse(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.serialize(), text);
        assert!(!back.passed());
        assert_eq!(back.count(Verdict::NotApplicable), 1);
    }

    #[test]
    fn artifact_recheck_reproduces() {
        let r = sample();
        let a = r.cases[1].artifact.as_ref().unwrap();
        // P(1) holds on the second row and the first row has constant y
        assert!(a.recheck(&Registry::standard()).unwrap());
    }

    #[test]
    fn rejects_garbage() {
        assert!(Report::parse("CASE x maybe").is_err());
        assert!(Report::parse("ARTIFACT nowhere\nEND").is_err());
        assert!(Report::parse("HARNESS a\nCASE a/0 fail\nARTIFACT a/0\nformula x = x").is_err());
    }

    #[test]
    fn natural_order() {
        let mut ids = vec!["h/10", "h/9", "h/etp", "h/1/m2"];
        ids.sort_by_key(|s| natural(s));
        assert_eq!(ids, vec!["h/1/m2", "h/9", "h/10", "h/etp"]);
    }
}
