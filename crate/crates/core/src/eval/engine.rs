//! Lax team semantics.
//!
//! A formula is compiled into an arena of nodes, each annotated with its
//! free variables and with closure properties derived from the certificates
//! of its dependency atoms. The naive configuration follows the rules
//! literally (all covers, all supplementations). The fast configuration
//! restricts teams to free variables, memoises, and cuts the search using
//! downward closure (single-row candidates, partial teams as prune points),
//! upward closure (the duplication is the only supplement worth trying)
//! and flatness of first-order subformulas.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use super::tarski::{holds, Env};
use super::trace::{EvalTrace, TraceWitness};
use super::EvalError;
use crate::deps::{Dependency, Property, Registry};
use crate::model::team::fill;
use crate::model::{all_tuples, enumerate_covers, enumerate_lax_supplements, Elem, Interpretation, Team, Var};
use crate::syntax::{free_vars, relation_symbols, to_classical, Classical, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disjunction {
    /// Every cover `Y ∪ Z = X`: `3^n` candidates.
    Naive,
    /// Disjoint splits only: `2^n` candidates. Sound only when both
    /// disjuncts are downwards closed, and rejected otherwise.
    Partition,
    /// Partition where admissible, otherwise satisfying-subset tables.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existential {
    /// Subsets of `X[M/v]` whose projection back to the old variables is
    /// all of `X`.
    SubsetOfDuplication,
    /// Functions `H: X → P(M^k) \ {∅}` enumerated row by row.
    PerRowH,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub memo: bool,
    pub disjunction: Disjunction,
    pub existential: Existential,
    /// Use certified closure properties to cut searches.
    pub pruning: bool,
    /// Evaluate first-order subformulas row by row.
    pub flat_shortcut: bool,
    pub trace: bool,
}

impl EvalConfig {
    /// The rules read literally.
    pub fn naive() -> Self {
        EvalConfig {
            memo: false,
            disjunction: Disjunction::Naive,
            existential: Existential::SubsetOfDuplication,
            pruning: false,
            flat_shortcut: false,
            trace: false,
        }
    }

    pub fn fast() -> Self {
        EvalConfig {
            memo: true,
            disjunction: Disjunction::Adaptive,
            existential: Existential::PerRowH,
            pruning: true,
            flat_shortcut: true,
            trace: false,
        }
    }

    /// Fast search, but first-order subformulas still go through the team
    /// rules. Used when flatness itself is under test.
    pub fn structural() -> Self {
        EvalConfig {
            flat_shortcut: false,
            ..EvalConfig::fast()
        }
    }

    pub fn with_trace(self) -> Self {
        EvalConfig { trace: true, ..self }
    }
}

/// Largest team a cover or subset search will enumerate.
const MAX_SEARCH_ROWS: usize = 20;
/// Largest number of supplementations a general existential search tries.
const MAX_SUPPLEMENTS: f64 = 16_777_216.0;

type NodeId = usize;

#[derive(Debug)]
enum Kind {
    Lit(Classical),
    Dep { dep: Dependency, args: Vec<Var> },
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    BoolDisj(NodeId, NodeId),
    Exists(Vec<Var>, NodeId),
    Forall(Vec<Var>, NodeId),
    SelImp(Classical, NodeId),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    formula: Formula,
    free: Vec<Var>,
    /// First-order reading, when the subformula has one.
    classical: Option<Classical>,
    dc: bool,
    uc: bool,
    etp: bool,
}

/// A formula prepared for evaluation. Independent of the model, so one
/// compilation serves a whole sweep.
#[derive(Debug)]
pub struct Compiled {
    nodes: Vec<Node>,
    root: NodeId,
    cfg: EvalConfig,
    symbols: Vec<(String, usize)>,
    free: Vec<Var>,
}

/// Verdict plus, when requested, an explanation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: bool,
    pub trace: Option<EvalTrace>,
}

/// `∃v (θ ~> φ)` becomes `θ ~> ∃v φ` when `θ` does not mention `v`; both
/// are satisfied by `X` exactly when `X↾θ` satisfies `∃v φ`.
fn hoist(f: &Formula) -> Formula {
    match f {
        Formula::Exists(v, b) => match hoist(b) {
            Formula::SelImp(t, inner) if !crate::syntax::free_vars_classical(&t).contains(v) => {
                Formula::SelImp(t, Box::new(hoist(&Formula::Exists(v.clone(), inner))))
            }
            b => Formula::exists(v.clone(), b),
        },
        Formula::Forall(v, b) => Formula::forall(v.clone(), hoist(b)),
        Formula::And(a, b) => Formula::and(hoist(a), hoist(b)),
        Formula::Or(a, b) => Formula::or(hoist(a), hoist(b)),
        Formula::BoolDisj(a, b) => Formula::bool_disj(hoist(a), hoist(b)),
        Formula::SelImp(t, b) => Formula::sel_imp(t.clone(), hoist(b)),
        atom => atom.clone(),
    }
}

fn sorted(set: BTreeSet<Var>) -> Vec<Var> {
    set.into_iter().collect()
}

impl Compiled {
    pub fn new(phi: &Formula, registry: &Registry, cfg: EvalConfig) -> Result<Compiled, EvalError> {
        let phi = if cfg.pruning { hoist(phi) } else { phi.clone() };
        let symbols = relation_symbols(&phi)
            .map_err(|e| EvalError::Formula(e.to_string()))?
            .into_iter()
            .collect();
        let mut c = Compiled {
            nodes: Vec::new(),
            root: 0,
            cfg,
            symbols,
            free: sorted(free_vars(&phi)),
        };
        c.root = c.compile(&phi, registry)?;
        if cfg.disjunction == Disjunction::Partition {
            for n in &c.nodes {
                if let Kind::Or(a, b) = n.kind {
                    for side in [a, b] {
                        if !c.nodes[side].dc {
                            return Err(EvalError::PartitionNotAdmissible(
                                c.nodes[side].formula.to_string(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(c)
    }

    fn push(&mut self, kind: Kind, formula: &Formula, dc: bool, uc: bool, etp: bool) -> NodeId {
        self.nodes.push(Node {
            kind,
            classical: to_classical(formula),
            free: sorted(free_vars(formula)),
            formula: formula.clone(),
            dc,
            uc,
            etp,
        });
        self.nodes.len() - 1
    }

    fn compile(&mut self, f: &Formula, registry: &Registry) -> Result<NodeId, EvalError> {
        let flags = |c: &Compiled, id: NodeId| (c.nodes[id].dc, c.nodes[id].uc, c.nodes[id].etp);
        Ok(match f {
            Formula::Rel { .. } | Formula::Eq { .. } => {
                let lit = to_classical(f).expect("literal");
                self.push(Kind::Lit(lit), f, true, false, true)
            }
            Formula::Dep(atom) => {
                let dep = registry.resolve(atom)?;
                let (dc, uc, etp) = (
                    dep.certified(Property::Downwards),
                    dep.certified(Property::Upwards),
                    dep.certified(Property::EmptyTeam),
                );
                self.push(
                    Kind::Dep {
                        dep,
                        args: atom.tuple(),
                    },
                    f,
                    dc,
                    uc,
                    etp,
                )
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::BoolDisj(a, b) => {
                let (ia, ib) = (self.compile(a, registry)?, self.compile(b, registry)?);
                let (da, ua, ea) = flags(self, ia);
                let (db, ub, eb) = flags(self, ib);
                let kind = match f {
                    Formula::And(..) => Kind::And(ia, ib),
                    Formula::Or(..) => Kind::Or(ia, ib),
                    _ => Kind::BoolDisj(ia, ib),
                };
                let etp = if matches!(kind, Kind::BoolDisj(..)) { ea || eb } else { ea && eb };
                self.push(kind, f, da && db, ua && ub, etp)
            }
            Formula::Exists(..) | Formula::Forall(..) => {
                let exists = matches!(f, Formula::Exists(..));
                let mut vs = Vec::new();
                let mut body = f;
                loop {
                    match (body, exists) {
                        (Formula::Exists(v, b), true) | (Formula::Forall(v, b), false) if !vs.contains(v) => {
                            vs.push(v.clone());
                            body = b;
                        }
                        _ => break,
                    }
                }
                let ib = self.compile(body, registry)?;
                let (d, u, e) = flags(self, ib);
                let kind = if exists { Kind::Exists(vs, ib) } else { Kind::Forall(vs, ib) };
                self.push(kind, f, d, u, e)
            }
            Formula::SelImp(t, b) => {
                let ib = self.compile(b, registry)?;
                let (d, u, e) = flags(self, ib);
                self.push(Kind::SelImp(t.clone(), ib), f, d, u, e)
            }
        })
    }

    fn check_model(&self, m: &dyn Interpretation) -> Result<(), EvalError> {
        for (sym, k) in &self.symbols {
            let rel = m.relation(sym).ok_or_else(|| EvalError::UnknownSymbol(sym.clone()))?;
            if rel.arity() != *k {
                return Err(EvalError::Arity {
                    sym: sym.clone(),
                    expected: rel.arity(),
                    got: *k,
                });
            }
        }
        Ok(())
    }

    fn check_team(&self, x: &Team) -> Result<(), EvalError> {
        let missing: Vec<Var> = self
            .free
            .iter()
            .filter(|v| x.column(v).is_none())
            .cloned()
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(EvalError::FreeVariables(missing))
        }
    }

    /// Whether `x` satisfies the formula in `m`.
    pub fn eval(&self, m: &dyn Interpretation, x: &Team) -> Result<bool, EvalError> {
        self.check_model(m)?;
        self.check_team(x)?;
        Search::new(self, m).eval(self.root, x)
    }

    /// Verdict with an explanation tree.
    pub fn explain(&self, m: &dyn Interpretation, x: &Team) -> Result<EvalTrace, EvalError> {
        self.check_model(m)?;
        self.check_team(x)?;
        Search::new(self, m).explain(self.root, x)
    }

    pub fn run(&self, m: &dyn Interpretation, x: &Team) -> Result<Outcome, EvalError> {
        if self.cfg.trace {
            let t = self.explain(m, x)?;
            Ok(Outcome {
                verdict: t.verdict,
                trace: Some(t),
            })
        } else {
            Ok(Outcome {
                verdict: self.eval(m, x)?,
                trace: None,
            })
        }
    }
}

/// One evaluation: model, memo table and the compiled formula.
struct Search<'a> {
    c: &'a Compiled,
    m: &'a dyn Interpretation,
    universe: Vec<Elem>,
    memo: RefCell<HashMap<(NodeId, Team), bool>>,
}

enum Split {
    Found(Team, Team),
    None,
}

impl<'a> Search<'a> {
    fn new(c: &'a Compiled, m: &'a dyn Interpretation) -> Self {
        Search {
            c,
            m,
            universe: m.universe().to_vec(),
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn cfg(&self) -> &EvalConfig {
        &self.c.cfg
    }

    fn node(&self, id: NodeId) -> &'a Node {
        &self.c.nodes[id]
    }

    /// The team a node is actually evaluated on: its restriction to the
    /// node's free variables when locality is exploited.
    fn local(&self, id: NodeId, x: &Team) -> Team {
        if self.cfg().memo {
            x.restrict_unchecked(&self.node(id).free)
        } else {
            x.clone()
        }
    }

    fn eval(&self, id: NodeId, x: &Team) -> Result<bool, EvalError> {
        if !self.cfg().memo {
            return self.eval_here(id, x);
        }
        let local = self.local(id, x);
        let key = (id, local);
        if let Some(&v) = self.memo.borrow().get(&key) {
            return Ok(v);
        }
        let v = self.eval_here(id, &key.1)?;
        self.memo.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn rowwise(&self, c: &Classical, x: &Team) -> Result<bool, EvalError> {
        Ok(self.failing_row(c, x)?.is_none())
    }

    fn failing_row(&self, c: &Classical, x: &Team) -> Result<Option<usize>, EvalError> {
        let mut env: Env = x.vars().iter().map(|v| (v.clone(), 0)).collect();
        for (i, row) in x.rows().iter().enumerate() {
            for (slot, &e) in env.iter_mut().zip(row) {
                slot.1 = e;
            }
            if !holds(self.m, &mut env, c)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn select(&self, theta: &Classical, x: &Team) -> Result<Team, EvalError> {
        super::tarski::select_team(x, theta, self.m)
    }

    fn eval_here(&self, id: NodeId, x: &Team) -> Result<bool, EvalError> {
        let node = self.node(id);
        let cfg = *self.cfg();
        if cfg.pruning && x.is_empty() && node.etp {
            return Ok(true);
        }
        if cfg.flat_shortcut {
            if let Some(c) = &node.classical {
                return self.rowwise(c, x);
            }
        }
        match &node.kind {
            Kind::Lit(c) => self.rowwise(c, x),
            Kind::Dep { dep, args } => self.dep_holds(dep, args, x),
            Kind::And(a, b) => Ok(self.eval(*a, x)? && self.eval(*b, x)?),
            Kind::BoolDisj(a, b) => Ok(self.eval(*a, x)? || self.eval(*b, x)?),
            Kind::Or(a, b) => Ok(matches!(self.split(*a, *b, x)?, Split::Found(..))),
            Kind::Forall(vs, b) => self.eval(*b, &x.duplicate(vs, &self.universe)?),
            Kind::SelImp(t, b) => self.eval(*b, &self.select(t, x)?),
            Kind::Exists(vs, b) => Ok(self.supplement(vs, *b, x)?.is_some()),
        }
    }

    fn dep_holds(&self, dep: &Dependency, args: &[Var], x: &Team) -> Result<bool, EvalError> {
        let rel = x.project(args)?;
        Ok(dep.holds(&self.universe, &rel)?)
    }

    // ---- disjunction ----

    fn split(&self, a: NodeId, b: NodeId, x: &Team) -> Result<Split, EvalError> {
        let cfg = *self.cfg();
        let (na, nb) = (self.node(a), self.node(b));
        match cfg.disjunction {
            Disjunction::Naive => self.split_naive(a, b, x),
            Disjunction::Partition if !cfg.pruning => self.split_partition(a, b, x),
            Disjunction::Partition => self.split_dc(a, b, x),
            Disjunction::Adaptive => {
                if cfg.flat_shortcut && cfg.pruning {
                    if let Some(c) = &na.classical {
                        return self.split_flat(c, b, x, false);
                    }
                    if let Some(c) = &nb.classical {
                        return self.split_flat(c, a, x, true);
                    }
                }
                if na.dc && nb.dc {
                    if cfg.pruning {
                        self.split_dc(a, b, x)
                    } else {
                        self.split_partition(a, b, x)
                    }
                } else {
                    self.split_tables(a, b, x)
                }
            }
        }
    }

    fn guard_rows(&self, x: &Team, what: &'static str) -> Result<(), EvalError> {
        if x.len() > MAX_SEARCH_ROWS {
            return Err(EvalError::SearchTooLarge { what, rows: x.len() });
        }
        Ok(())
    }

    fn split_naive(&self, a: NodeId, b: NodeId, x: &Team) -> Result<Split, EvalError> {
        self.guard_rows(x, "cover")?;
        for (y, z) in enumerate_covers(x) {
            if self.eval(a, &y)? && self.eval(b, &z)? {
                return Ok(Split::Found(y, z));
            }
        }
        Ok(Split::None)
    }

    fn split_partition(&self, a: NodeId, b: NodeId, x: &Team) -> Result<Split, EvalError> {
        self.guard_rows(x, "partition")?;
        let full = (1u64 << x.len()) - 1;
        for mask in 0..=full {
            let (y, z) = (x.submask(mask), x.submask(full & !mask));
            if self.eval(a, &y)? && self.eval(b, &z)? {
                return Ok(Split::Found(y, z));
            }
        }
        Ok(Split::None)
    }

    /// One side is first-order with classical reading `c`; its satisfying
    /// rows `S` can take any part of the team, so the other side must cover
    /// at least `X \ S`.
    fn split_flat(&self, c: &Classical, other: NodeId, x: &Team, flat_right: bool) -> Result<Split, EvalError> {
        let mut env: Env = x.vars().iter().map(|v| (v.clone(), 0)).collect();
        let mut good = Vec::with_capacity(x.len());
        for row in x.rows() {
            for (slot, &e) in env.iter_mut().zip(row) {
                slot.1 = e;
            }
            good.push(holds(self.m, &mut env, c)?);
        }
        let flat_part = x.subteam(|i| good[i]);
        let order = |flat: Team, rest: Team| if flat_right { (rest, flat) } else { (flat, rest) };
        let on = self.node(other);
        let forced = x.subteam(|i| !good[i]);
        if on.dc || self.cfg().pruning && on.uc {
            let z = if on.dc { forced } else { x.clone() };
            if self.eval(other, &z)? {
                let (l, r) = order(flat_part, z);
                return Ok(Split::Found(l, r));
            }
            return Ok(Split::None);
        }
        let optional: Vec<usize> = (0..x.len()).filter(|&i| good[i]).collect();
        if optional.len() > MAX_SEARCH_ROWS {
            return Err(EvalError::SearchTooLarge {
                what: "cover",
                rows: optional.len(),
            });
        }
        for mask in 0u64..1 << optional.len() {
            let mut take = good.iter().map(|g| !g).collect::<Vec<bool>>();
            for (j, &i) in optional.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    take[i] = true;
                }
            }
            let z = x.subteam(|i| take[i]);
            if self.eval(other, &z)? {
                let (l, r) = order(flat_part, z);
                return Ok(Split::Found(l, r));
            }
        }
        Ok(Split::None)
    }

    /// Both sides downwards closed: rows are assigned to one side each, and
    /// a partial assignment is abandoned as soon as either side fails.
    fn split_dc(&self, a: NodeId, b: NodeId, x: &Team) -> Result<Split, EvalError> {
        let n = x.len();
        let mut can = Vec::with_capacity(n);
        for i in 0..n {
            let single = x.subteam(|j| j == i);
            let l = self.eval(a, &single)?;
            let r = self.eval(b, &single)?;
            if !l && !r {
                return Ok(Split::None);
            }
            can.push((l, r));
        }
        // Greedy tries: everything that may go left goes left, or right.
        let left_all = x.subteam(|i| can[i].0);
        let right_rest = x.subteam(|i| !can[i].0);
        if self.eval(a, &left_all)? && self.eval(b, &right_rest)? {
            return Ok(Split::Found(left_all, right_rest));
        }
        let right_all = x.subteam(|i| can[i].1);
        let left_rest = x.subteam(|i| !can[i].1);
        if self.eval(a, &left_rest)? && self.eval(b, &right_all)? {
            return Ok(Split::Found(left_rest, right_all));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| can[i].0 && can[i].1);
        let mut side = vec![None::<bool>; n];
        if self.assign_rows(a, b, x, &can, &order, 0, &mut side)? {
            let y = x.subteam(|i| side[i] == Some(true));
            let z = x.subteam(|i| side[i] == Some(false));
            return Ok(Split::Found(y, z));
        }
        Ok(Split::None)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign_rows(
        &self,
        a: NodeId,
        b: NodeId,
        x: &Team,
        can: &[(bool, bool)],
        order: &[usize],
        at: usize,
        side: &mut Vec<Option<bool>>,
    ) -> Result<bool, EvalError> {
        if at == order.len() {
            return Ok(true);
        }
        let i = order[at];
        for (left, allowed, node) in [(true, can[i].0, a), (false, can[i].1, b)] {
            if !allowed {
                continue;
            }
            side[i] = Some(left);
            let part = x.subteam(|j| side[j] == Some(left));
            if self.eval(node, &part)? && self.assign_rows(a, b, x, can, order, at + 1, side)? {
                return Ok(true);
            }
            side[i] = None;
        }
        Ok(false)
    }

    /// General disjunction: tabulate which subteams satisfy each side, close
    /// the right table downwards ("is contained in a satisfying subteam")
    /// and look for a left subteam whose complement is covered.
    fn split_tables(&self, a: NodeId, b: NodeId, x: &Team) -> Result<Split, EvalError> {
        let n = x.len();
        if n > 16 {
            return Err(EvalError::SearchTooLarge { what: "cover", rows: n });
        }
        let size = 1usize << n;
        let full = (size - 1) as u64;
        let mut right = vec![false; size];
        for (mask, slot) in right.iter_mut().enumerate() {
            *slot = self.eval(b, &x.submask(mask as u64))?;
        }
        // within[m]: some satisfying right subteam contains m.
        let mut within = right.clone();
        for mask in (0..size).rev() {
            if within[mask] {
                continue;
            }
            within[mask] = (0..n).any(|i| mask >> i & 1 == 0 && within[mask | 1 << i]);
        }
        for mask in 0..size as u64 {
            let rest = (full & !mask) as usize;
            if within[rest] && self.eval(a, &x.submask(mask))? {
                // Pick a concrete right subteam containing the rest.
                let z = (0..size)
                    .find(|&s| right[s] && s & rest == rest)
                    .expect("within implies a witness");
                return Ok(Split::Found(x.submask(mask), x.submask(z as u64)));
            }
        }
        Ok(Split::None)
    }

    // ---- existential ----

    /// A supplementation `X[H/v]` satisfying the body, if any.
    fn supplement(&self, vs: &[Var], body: NodeId, x: &Team) -> Result<Option<Team>, EvalError> {
        let cfg = *self.cfg();
        let nb = self.node(body);
        if cfg.pruning {
            let forced = self.forced_constant(body, vs);
            if !forced.is_empty() {
                return self.supplement_constant(&forced, vs, body, x);
            }
        }
        if cfg.pruning && nb.uc {
            let dup = x.duplicate(vs, &self.universe)?;
            return Ok(self.eval(body, &dup)?.then_some(dup));
        }
        if cfg.pruning && nb.dc {
            return self.supplement_dc(vs, body, x);
        }
        match cfg.existential {
            Existential::SubsetOfDuplication => self.supplement_subsets(vs, body, x),
            Existential::PerRowH => self.supplement_per_row(vs, body, x),
        }
    }

    /// Quantified variables `v` with a conjunct `=(v)` in the body: every
    /// satisfying supplementation gives them a single value.
    fn forced_constant(&self, body: NodeId, vs: &[Var]) -> Vec<Var> {
        let mut out = Vec::new();
        let mut stack = vec![body];
        while let Some(id) = stack.pop() {
            match &self.node(id).kind {
                Kind::And(a, b) => stack.extend([*a, *b]),
                Kind::Dep { dep, args } if dep.name() == "const/1" && vs.contains(&args[0]) => {
                    if !out.contains(&args[0]) {
                        out.push(args[0].clone());
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn supplement_constant(
        &self,
        forced: &[Var],
        vs: &[Var],
        body: NodeId,
        x: &Team,
    ) -> Result<Option<Team>, EvalError> {
        let rest: Vec<Var> = vs.iter().filter(|v| !forced.contains(v)).cloned().collect();
        for t in all_tuples(&self.universe, forced.len()) {
            let y = x.supplement_const(&t, forced)?;
            let found = if rest.is_empty() {
                self.eval(body, &y)?.then_some(y)
            } else {
                self.supplement(&rest, body, &y)?
            };
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn supplement_subsets(&self, vs: &[Var], body: NodeId, x: &Team) -> Result<Option<Team>, EvalError> {
        let dup = x.duplicate(vs, &self.universe)?;
        self.guard_rows(&dup, "supplement")?;
        let keep: Vec<Var> = x.vars().iter().filter(|v| !vs.contains(v)).cloned().collect();
        let base = x.restrict_unchecked(&keep);
        for mask in 1u64..1 << dup.len() {
            let y = dup.submask(mask);
            if y.restrict_unchecked(&keep) == base && self.eval(body, &y)? {
                return Ok(Some(y));
            }
        }
        if x.is_empty() && self.eval(body, &dup)? {
            return Ok(Some(dup));
        }
        Ok(None)
    }

    fn supplement_per_row(&self, vs: &[Var], body: NodeId, x: &Team) -> Result<Option<Team>, EvalError> {
        let per_row = (2f64.powi(self.universe.len().pow(vs.len() as u32) as i32) - 1.0).max(1.0);
        if per_row.powi(x.len() as i32) > MAX_SUPPLEMENTS {
            return Err(EvalError::SearchTooLarge {
                what: "supplement",
                rows: x.len(),
            });
        }
        for y in enumerate_lax_supplements(x, vs, &self.universe)? {
            if self.eval(body, &y)? {
                return Ok(Some(y));
            }
        }
        Ok(None)
    }

    /// Downwards-closed body: every row of a satisfying supplementation is a
    /// satisfying singleton, so each row's candidate values are filtered
    /// first; then one value per row is chosen with backtracking, pruning
    /// partial teams that already fail.
    fn supplement_dc(&self, vs: &[Var], body: NodeId, x: &Team) -> Result<Option<Team>, EvalError> {
        let tuples = all_tuples(&self.universe, vs.len());
        let (single, slots) = x.extension_layout(vs)?;
        let mut cands: Vec<Vec<Vec<Elem>>> = Vec::with_capacity(x.len());
        for row in x.rows() {
            let mut ok = Vec::new();
            for t in &tuples {
                let team = Team::from_canonical_parts(single.clone(), vec![fill(&slots, row, t)]);
                if self.eval(body, &team)? {
                    ok.push(fill(&slots, row, t));
                }
            }
            if ok.is_empty() {
                return Ok(None);
            }
            cands.push(ok);
        }
        if x.len() == 1 {
            return Ok(Some(Team::from_canonical_parts(single, vec![cands[0][0].clone()])));
        }
        let widest = Team::from_canonical_parts(single.clone(), cands.iter().flatten().cloned().collect());
        if self.eval(body, &widest)? {
            return Ok(Some(widest));
        }
        if cands.iter().all(|c| c.len() == 1) {
            return Ok(None);
        }
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by_key(|&i| cands[i].len());
        let mut chosen: Vec<Vec<Elem>> = Vec::with_capacity(x.len());
        if self.choose_rows(body, &single, &cands, &order, &mut chosen)? {
            return Ok(Some(Team::from_canonical_parts(single, chosen)));
        }
        Ok(None)
    }

    fn choose_rows(
        &self,
        body: NodeId,
        vars: &[Var],
        cands: &[Vec<Vec<Elem>>],
        order: &[usize],
        chosen: &mut Vec<Vec<Elem>>,
    ) -> Result<bool, EvalError> {
        let Some((&i, rest)) = order.split_first() else {
            return Ok(true);
        };
        for c in &cands[i] {
            chosen.push(c.clone());
            let team = Team::from_canonical_parts(vars.to_vec(), chosen.clone());
            if self.eval(body, &team)? && self.choose_rows(body, vars, cands, rest, chosen)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    // ---- explanation ----

    fn explain(&self, id: NodeId, x: &Team) -> Result<EvalTrace, EvalError> {
        let node = self.node(id);
        let team = self.local(id, x);
        let leaf = |verdict: bool, witness: TraceWitness| EvalTrace {
            formula: node.formula.clone(),
            team: team.clone(),
            verdict,
            witness,
            children: vec![],
        };
        Ok(match &node.kind {
            Kind::Lit(c) => {
                let bad = self.failing_row(c, &team)?;
                leaf(bad.is_none(), bad.map_or(TraceWitness::None, TraceWitness::FailingRow))
            }
            Kind::Dep { dep, args } => {
                let rel = team.project(args)?;
                leaf(dep.holds(&self.universe, &rel)?, TraceWitness::Projection(rel))
            }
            Kind::And(a, b) | Kind::BoolDisj(a, b) => {
                let (ta, tb) = (self.explain(*a, &team)?, self.explain(*b, &team)?);
                let verdict = if matches!(node.kind, Kind::And(..)) {
                    ta.verdict && tb.verdict
                } else {
                    ta.verdict || tb.verdict
                };
                EvalTrace {
                    children: vec![ta, tb],
                    ..leaf(verdict, TraceWitness::None)
                }
            }
            Kind::Or(a, b) => match self.split(*a, *b, &team)? {
                Split::Found(y, z) => EvalTrace {
                    children: vec![self.explain(*a, &y)?, self.explain(*b, &z)?],
                    ..leaf(true, TraceWitness::Cover(y, z))
                },
                Split::None => leaf(false, TraceWitness::None),
            },
            Kind::Forall(vs, b) => {
                let dup = team.duplicate(vs, &self.universe)?;
                let child = self.explain(*b, &dup)?;
                leaf(child.verdict, TraceWitness::Duplication(vs.clone(), dup)).with_child(child)
            }
            Kind::SelImp(t, b) => {
                let sel = self.select(t, &team)?;
                let child = self.explain(*b, &sel)?;
                leaf(child.verdict, TraceWitness::Selection(sel)).with_child(child)
            }
            Kind::Exists(vs, b) => match self.supplement(vs, *b, &team)? {
                Some(y) => {
                    let child = self.explain(*b, &y)?;
                    leaf(true, TraceWitness::Supplement(vs.clone(), y)).with_child(child)
                }
                None => leaf(false, TraceWitness::None),
            },
        })
    }
}

/// `M ⊨_X φ` under `cfg`.
pub fn team_eval(
    m: &dyn Interpretation,
    registry: &Registry,
    x: &Team,
    phi: &Formula,
    cfg: &EvalConfig,
) -> Result<bool, EvalError> {
    Compiled::new(phi, registry, *cfg)?.eval(m, x)
}

/// Verdict, with a trace when `cfg.trace` is set.
pub fn evaluate(
    m: &dyn Interpretation,
    registry: &Registry,
    x: &Team,
    phi: &Formula,
    cfg: &EvalConfig,
) -> Result<Outcome, EvalError> {
    Compiled::new(phi, registry, *cfg)?.run(m, x)
}

/// Truth of a sentence: satisfaction by `{ε}`.
pub fn sentence_true(
    m: &dyn Interpretation,
    registry: &Registry,
    phi: &Formula,
    cfg: &EvalConfig,
) -> Result<bool, EvalError> {
    let free = free_vars(phi);
    if !free.is_empty() {
        return Err(EvalError::NotASentence(free.into_iter().collect()));
    }
    team_eval(m, registry, &Team::unit(), phi, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deps::Dependency;
    use crate::model::{vars, Relation, Structure};
    use crate::syntax::{parse_classical, parse_formula};

    fn configs() -> Vec<EvalConfig> {
        vec![
            EvalConfig::naive(),
            EvalConfig {
                existential: Existential::PerRowH,
                ..EvalConfig::naive()
            },
            EvalConfig::structural(),
            EvalConfig::fast(),
        ]
    }

    fn model2() -> Structure {
        let mut m = Structure::canonical(2).unwrap();
        m.add_predicate("P", [0]).unwrap();
        m.add_relation("R", Relation::from_tuples(2, [vec![0, 1], vec![1, 1]]).unwrap())
            .unwrap();
        m
    }

    fn team(names: &[&str], rows: &[&[Elem]]) -> Team {
        Team::new(vars(names), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn all(m: &Structure, x: &Team, f: &str) -> bool {
        let phi = parse_formula(f).unwrap();
        let reg = Registry::standard();
        let verdicts: Vec<bool> = configs()
            .iter()
            .map(|c| team_eval(m, &reg, x, &phi, c).unwrap())
            .collect();
        assert!(verdicts.iter().all(|&v| v == verdicts[0]), "{f} on {x:?}: {verdicts:?}");
        verdicts[0]
    }

    #[test]
    fn constancy_on_two_values() {
        let m = model2();
        let x = team(&["x"], &[&[0], &[1]]);
        assert!(!all(&m, &x, "#const(x)"));
        assert!(all(&m, &x, "#const(x) | #const(x)"));
        assert!(all(&m, &team(&["x"], &[&[1]]), "#const(x)"));
    }

    #[test]
    fn empty_team() {
        let m = model2();
        let e = Team::empty(vars(&["x", "y"])).unwrap();
        for f in ["#const(x) & P(x)", "#dep(x;y) | #incl(x;y)", "E z (#indep(x;y;z) & !P(z))"] {
            assert!(all(&m, &e, f), "{f}");
        }
        assert!(!all(&m, &e, "#false()"));
    }

    #[test]
    fn inclusion_on_full_team() {
        let m = model2();
        let x = Team::full(vars(&["x", "y"]), &[0, 1]).unwrap();
        assert!(all(&m, &x, "#incl(x;y)"));
        let y = team(&["x", "y"], &[&[0, 1], &[1, 1]]);
        assert!(!all(&m, &y, "#incl(x;y)"));
    }

    #[test]
    fn existential_and_universal() {
        let m = model2();
        let x = team(&["x"], &[&[0], &[1]]);
        assert!(all(&m, &x, "E y (R(x,y) & #const(y))"));
        assert!(!all(&m, &x, "E y (R(y,x) & #const(y))"));
        assert!(all(&m, &x, "E y (#dep(x;y) & y != x)"));
        assert!(!all(&m, &x, "A y #dep(x;y)"));
        assert!(all(&m, &x, "A y E z (#dep(y;z) & z = y)"));
        assert!(all(&m, &x, "E y E z (#const(y,z) & y != z)"));
    }

    #[test]
    fn sugar() {
        let m = model2();
        let x = team(&["x"], &[&[0], &[1]]);
        assert!(all(&m, &x, "P(x) ~> #const(x)"));
        assert!(all(&m, &x, "#const(x) ++ P(x) | !P(x)"));
        assert!(!all(&m, &x, "#const(x) ++ P(x)"));
    }

    #[test]
    fn sentences() {
        let reg = Registry::standard();
        let phi = parse_formula("E x A y x = y").unwrap();
        for (n, expect) in [(1, true), (2, false)] {
            let m = Structure::canonical(n).unwrap();
            for c in configs() {
                assert_eq!(sentence_true(&m, &reg, &phi, &c).unwrap(), expect);
            }
        }
        let m = Structure::canonical(2).unwrap();
        assert!(matches!(
            sentence_true(&m, &reg, &parse_formula("P(x)").unwrap(), &EvalConfig::fast()),
            Err(EvalError::NotASentence(_))
        ));
    }

    #[test]
    fn fo_sentences_agree_with_tarski() {
        let m = model2();
        let reg = Registry::standard();
        for s in [
            "A x E y R(x,y)",
            "E x A y R(y,x)",
            "A x (P(x) | E y (R(x,y) & x != y))",
            "E x E y (R(x,y) & ~P(y))",
            "A x A y (R(x,y) -> P(x))",
        ] {
            let c = parse_classical(s).unwrap();
            let expect = super::super::tarski_sentence(&m, &c).unwrap();
            let f = crate::syntax::classical_to_nnf(&c);
            for cfg in configs() {
                assert_eq!(sentence_true(&m, &reg, &f, &cfg).unwrap(), expect, "{s}");
            }
        }
    }

    #[test]
    fn errors() {
        let m = model2();
        let reg = Registry::standard();
        let x = team(&["x"], &[&[0]]);
        let eval = |f: &str, c: &EvalConfig| team_eval(&m, &reg, &x, &parse_formula(f).unwrap(), c);
        assert!(matches!(eval("P(y)", &EvalConfig::fast()), Err(EvalError::FreeVariables(_))));
        assert!(matches!(eval("R(x)", &EvalConfig::fast()), Err(EvalError::Arity { .. })));
        assert!(matches!(eval("Q(x)", &EvalConfig::fast()), Err(EvalError::UnknownSymbol(_))));
        assert!(matches!(
            eval("#foo(x)", &EvalConfig::fast()),
            Err(EvalError::Dependency(_))
        ));
        let partition = EvalConfig {
            disjunction: Disjunction::Partition,
            ..EvalConfig::naive()
        };
        assert!(matches!(
            eval("#incl(x;x) | P(x)", &partition),
            Err(EvalError::PartitionNotAdmissible(_))
        ));
        assert!(eval("#const(x) | P(x)", &partition).unwrap());
    }

    #[test]
    fn user_dependency_without_certificates() {
        let m = model2();
        let reg = Registry::standard()
            .with(Dependency::fo("ne", parse_classical("E x R(x)").unwrap(), 1).unwrap())
            .unwrap();
        let phi = parse_formula("x = x ++ #ne(x)").unwrap();
        let empty = Team::empty(vars(&["x"])).unwrap();
        for c in configs() {
            assert!(team_eval(&m, &reg, &empty, &phi, &c).unwrap());
            assert!(!team_eval(&m, &reg, &empty, &parse_formula("#ne(x)").unwrap(), &c).unwrap());
        }
    }

    #[test]
    fn traces_recheck() {
        let m = model2();
        let reg = Registry::standard();
        let x = team(&["x", "y"], &[&[0, 0], &[0, 1], &[1, 1]]);
        for f in [
            "#const(x) | #const(x)",
            "E z (#dep(x;z) & (P(z) | z = y))",
            "A z (x = z ~> #const(y) | #const(z))",
            "#incl(x;y) ++ #const(y)",
            "E z #const(z) & #dep(y;x)",
        ] {
            let phi = parse_formula(f).unwrap();
            for c in configs() {
                let out = evaluate(&m, &reg, &x, &phi, &c.with_trace()).unwrap();
                let t = out.trace.unwrap();
                assert_eq!(out.verdict, team_eval(&m, &reg, &x, &phi, &c).unwrap());
                t.recheck(&m, &reg).unwrap_or_else(|e| panic!("{f}: {e}\n{t}"));
            }
        }
    }
}
