use std::fmt::{self, Write};

use super::{select_team, team_eval, EvalConfig};
use crate::deps::Registry;
use crate::model::{Interpretation, Relation, Team, Var};
use crate::syntax::Formula;

/// What justified a node's verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceWitness {
    None,
    /// Index of a row violating a first-order literal.
    FailingRow(usize),
    /// `X(t)` for a dependency atom.
    Projection(Relation),
    Cover(Team, Team),
    Supplement(Vec<Var>, Team),
    Duplication(Vec<Var>, Team),
    Selection(Team),
}

/// Explanation tree: each node records the subformula, the team it was
/// evaluated on, the verdict and the witnesses that justify it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalTrace {
    pub formula: Formula,
    pub team: Team,
    pub verdict: bool,
    pub witness: TraceWitness,
    pub children: Vec<EvalTrace>,
}

impl EvalTrace {
    pub(crate) fn with_child(mut self, child: EvalTrace) -> Self {
        self.children.push(child);
        self
    }

    fn write(&self, out: &mut String, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        let v = if self.verdict { "true" } else { "false" };
        writeln!(out, "{pad}{v}: {}", self.formula)?;
        writeln!(out, "{pad}  team {:?}", self.team)?;
        match &self.witness {
            TraceWitness::None => {}
            TraceWitness::FailingRow(i) => writeln!(out, "{pad}  fails at row {i}")?,
            TraceWitness::Projection(r) => writeln!(out, "{pad}  projection {r:?}")?,
            TraceWitness::Cover(y, z) => writeln!(out, "{pad}  cover {y:?} | {z:?}")?,
            TraceWitness::Supplement(_, y) => writeln!(out, "{pad}  supplement {y:?}")?,
            TraceWitness::Duplication(..) => {}
            TraceWitness::Selection(_) => {}
        }
        for c in &self.children {
            c.write(out, depth + 1)?;
        }
        Ok(())
    }

    /// Check every witness in the tree: covers really cover, supplements
    /// project back onto the team, duplications and selections are the
    /// right teams, children's verdicts combine to the parent's, and leaf
    /// verdicts agree with an independent naive evaluation.
    pub fn recheck(&self, m: &dyn Interpretation, registry: &Registry) -> Result<(), String> {
        let fail = |msg: &str| Err(format!("{msg} at `{}`", self.formula));
        // Children may be evaluated on the restriction to their free variables.
        let on = |c: &EvalTrace, t: &Team| t.restrict(c.team.vars()).is_ok_and(|r| r == c.team);
        let child = |i: usize| self.children.get(i);
        for c in &self.children {
            c.recheck(m, registry)?;
        }
        match (&self.formula, &self.witness) {
            (Formula::Rel { .. } | Formula::Eq { .. } | Formula::Dep(_), _) => {
                let naive = team_eval(m, registry, &self.team, &self.formula, &EvalConfig::naive())
                    .map_err(|e| e.to_string())?;
                if naive != self.verdict {
                    return fail("leaf verdict disagrees with naive evaluation");
                }
            }
            (Formula::And(..), _) | (Formula::BoolDisj(..), _) => {
                let (Some(a), Some(b)) = (child(0), child(1)) else {
                    return fail("missing children");
                };
                let expect = if matches!(self.formula, Formula::And(..)) {
                    a.verdict && b.verdict
                } else {
                    a.verdict || b.verdict
                };
                if expect != self.verdict || !on(a, &self.team) || !on(b, &self.team) {
                    return fail("children do not combine to the verdict");
                }
            }
            (Formula::Or(..), TraceWitness::Cover(y, z)) => {
                let (Some(a), Some(b)) = (child(0), child(1)) else {
                    return fail("missing children");
                };
                let covered = y.union(z).map_err(|e| e.to_string())?;
                if !self.verdict || covered != self.team || !on(a, y) || !on(b, z) {
                    return fail("cover does not match the team");
                }
                if !a.verdict || !b.verdict {
                    return fail("cover parts are not both satisfied");
                }
            }
            (Formula::Exists(..), TraceWitness::Supplement(vs, y)) => {
                let keep: Vec<Var> = self
                    .team
                    .vars()
                    .iter()
                    .filter(|v| !vs.contains(v))
                    .cloned()
                    .collect();
                let back = y.restrict(&keep).map_err(|e| e.to_string())?;
                let base = self.team.restrict(&keep).map_err(|e| e.to_string())?;
                let fits = y.vars().iter().all(|v| vs.contains(v) || self.team.column(v).is_some());
                if back != base || !fits || y.is_empty() != self.team.is_empty() {
                    return fail("supplement does not extend the team");
                }
                match child(0) {
                    Some(c) if c.verdict && on(c, y) && self.verdict => {}
                    _ => return fail("supplement is not satisfied"),
                }
            }
            (Formula::Forall(..), TraceWitness::Duplication(vs, y)) => {
                let dup = self
                    .team
                    .duplicate(vs, m.universe())
                    .map_err(|e| e.to_string())?;
                match child(0) {
                    Some(c) if &dup == y && on(c, y) && c.verdict == self.verdict => {}
                    _ => return fail("duplication mismatch"),
                }
            }
            (Formula::SelImp(t, _), TraceWitness::Selection(y)) => {
                let sel = select_team(&self.team, t, m).map_err(|e| e.to_string())?;
                match child(0) {
                    Some(c) if &sel == y && on(c, y) && c.verdict == self.verdict => {}
                    _ => return fail("selection mismatch"),
                }
            }
            (Formula::Or(..) | Formula::Exists(..), TraceWitness::None) if !self.verdict => {}
            _ => return fail("unexpected witness"),
        }
        Ok(())
    }
}

impl fmt::Display for EvalTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s, 0)?;
        f.write_str(&s)
    }
}
