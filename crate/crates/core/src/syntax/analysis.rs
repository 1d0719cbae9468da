//! Syntactic analyses and rewrites: free variables, positivity, occurrence
//! counts, capture-avoiding substitution and prenexing.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use super::ast::{Classical, DepAtom, Formula};
use super::nnf::{classical_nnf, classical_to_nnf, to_classical};
use crate::model::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("`{sym}` has arity {expected} but is applied to {got} arguments")]
    Arity {
        sym: String,
        expected: usize,
        got: usize,
    },
    #[error("dependency atom `{0}` in a formula required to be first-order")]
    DependencyAtom(String),
    #[error("Boolean disjunction in a formula required to be first-order")]
    BoolDisj,
    #[error("formula is not in prenex form")]
    NotPrenex,
    #[error("`{0}` occurs negatively")]
    NegativeOccurrence(String),
    #[error("`{sym}` occurs {count} times, at most one occurrence is allowed")]
    MultipleOccurrences { sym: String, count: usize },
    #[error("formula has free variables {0:?}")]
    NotASentence(Vec<Var>),
    #[error("formula contains a quantifier")]
    Quantifier,
    #[error("unexpected relation symbol `{0}`")]
    UnexpectedSymbol(String),
    #[error("parameter list repeats `{0}`")]
    RepeatedParameter(Var),
}

/// Generates variable and symbol names that do not occur in any formula it
/// has seen. Generated names start with `_`.
#[derive(Default, Clone, Debug)]
pub struct FreshGen {
    used: HashSet<String>,
}

impl FreshGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn reserve_formula(&mut self, f: &Formula) -> &mut Self {
        walk_names(f, &mut |n| {
            self.used.insert(n.to_string());
        });
        self
    }

    pub fn reserve_classical(&mut self, c: &Classical) -> &mut Self {
        walk_names_classical(c, &mut |n| {
            self.used.insert(n.to_string());
        });
        self
    }

    pub fn name(&mut self, base: &str) -> String {
        let mut candidate = format!("_{base}");
        let mut n = 1;
        while self.used.contains(&candidate) {
            candidate = format!("_{base}{n}");
            n += 1;
        }
        self.used.insert(candidate.clone());
        candidate
    }

    pub fn var(&mut self, base: &str) -> Var {
        Var::from(self.name(base))
    }

    pub fn vars(&mut self, base: &str, k: usize) -> Vec<Var> {
        (0..k).map(|_| self.var(base)).collect()
    }
}

fn walk_names(f: &Formula, out: &mut impl FnMut(&str)) {
    match f {
        Formula::Rel { sym, args, .. } => {
            out(sym);
            args.iter().for_each(|v| out(v.as_str()));
        }
        Formula::Eq { left, right, .. } => {
            out(left.as_str());
            out(right.as_str());
        }
        Formula::Dep(a) => {
            out(&a.name);
            a.groups.iter().flatten().for_each(|v| out(v.as_str()));
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::BoolDisj(a, b) => {
            walk_names(a, out);
            walk_names(b, out);
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            out(v.as_str());
            walk_names(b, out);
        }
        Formula::SelImp(t, b) => {
            walk_names_classical(t, out);
            walk_names(b, out);
        }
    }
}

fn walk_names_classical(c: &Classical, out: &mut impl FnMut(&str)) {
    match c {
        Classical::Rel { sym, args } => {
            out(sym);
            args.iter().for_each(|v| out(v.as_str()));
        }
        Classical::Eq(a, b) => {
            out(a.as_str());
            out(b.as_str());
        }
        Classical::Not(a) => walk_names_classical(a, out),
        Classical::And(a, b) | Classical::Or(a, b) | Classical::Implies(a, b) => {
            walk_names_classical(a, out);
            walk_names_classical(b, out);
        }
        Classical::Exists(v, b) | Classical::Forall(v, b) => {
            out(v.as_str());
            walk_names_classical(b, out);
        }
    }
}

pub fn free_vars(f: &Formula) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    free_into(f, &mut Vec::new(), &mut out);
    out
}

fn free_into(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    let mut add = |v: &Var, bound: &Vec<Var>| {
        if !bound.contains(v) {
            out.insert(v.clone());
        }
    };
    match f {
        Formula::Rel { args, .. } => args.iter().for_each(|v| add(v, bound)),
        Formula::Eq { left, right, .. } => {
            add(left, bound);
            add(right, bound);
        }
        Formula::Dep(a) => a.groups.iter().flatten().for_each(|v| add(v, bound)),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::BoolDisj(a, b) => {
            free_into(a, bound, out);
            free_into(b, bound, out);
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            bound.push(v.clone());
            free_into(b, bound, out);
            bound.pop();
        }
        Formula::SelImp(t, b) => {
            free_into_classical(t, bound, out);
            free_into(b, bound, out);
        }
    }
}

pub fn free_vars_classical(c: &Classical) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    free_into_classical(c, &mut Vec::new(), &mut out);
    out
}

fn free_into_classical(c: &Classical, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match c {
        Classical::Rel { args, .. } => {
            for v in args {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        }
        Classical::Eq(a, b) => {
            for v in [a, b] {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        }
        Classical::Not(a) => free_into_classical(a, bound, out),
        Classical::And(a, b) | Classical::Or(a, b) | Classical::Implies(a, b) => {
            free_into_classical(a, bound, out);
            free_into_classical(b, bound, out);
        }
        Classical::Exists(v, b) | Classical::Forall(v, b) => {
            bound.push(v.clone());
            free_into_classical(b, bound, out);
            bound.pop();
        }
    }
}

/// Relation symbols with the arities they are used at. A symbol used at two
/// arities is reported as an error.
pub fn relation_symbols(f: &Formula) -> Result<BTreeMap<String, usize>, FormulaError> {
    let mut out = BTreeMap::new();
    let mut res = Ok(());
    walk_rels(f, &mut |sym, n| note_arity(&mut out, &mut res, sym, n));
    res.map(|_| out)
}

pub fn relation_symbols_classical(c: &Classical) -> Result<BTreeMap<String, usize>, FormulaError> {
    let mut out = BTreeMap::new();
    let mut res = Ok(());
    walk_rels_classical(c, &mut |sym, n| note_arity(&mut out, &mut res, sym, n));
    res.map(|_| out)
}

fn note_arity(
    out: &mut BTreeMap<String, usize>,
    res: &mut Result<(), FormulaError>,
    sym: &str,
    n: usize,
) {
    match out.get(sym) {
        Some(&k) if k != n => {
            if res.is_ok() {
                *res = Err(FormulaError::Arity {
                    sym: sym.to_string(),
                    expected: k,
                    got: n,
                });
            }
        }
        _ => {
            out.insert(sym.to_string(), n);
        }
    }
}

fn walk_rels(f: &Formula, out: &mut impl FnMut(&str, usize)) {
    match f {
        Formula::Rel { sym, args, .. } => out(sym, args.len()),
        Formula::Eq { .. } | Formula::Dep(_) => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::BoolDisj(a, b) => {
            walk_rels(a, out);
            walk_rels(b, out);
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => walk_rels(b, out),
        Formula::SelImp(t, b) => {
            walk_rels_classical(t, out);
            walk_rels(b, out);
        }
    }
}

fn walk_rels_classical(c: &Classical, out: &mut impl FnMut(&str, usize)) {
    match c {
        Classical::Rel { sym, args } => out(sym, args.len()),
        Classical::Eq(..) => {}
        Classical::Not(a) => walk_rels_classical(a, out),
        Classical::And(a, b) | Classical::Or(a, b) | Classical::Implies(a, b) => {
            walk_rels_classical(a, out);
            walk_rels_classical(b, out);
        }
        Classical::Exists(_, b) | Classical::Forall(_, b) => walk_rels_classical(b, out),
    }
}

pub fn dep_atoms(f: &Formula) -> Vec<&DepAtom> {
    fn go<'a>(f: &'a Formula, out: &mut Vec<&'a DepAtom>) {
        match f {
            Formula::Dep(a) => out.push(a),
            Formula::Rel { .. } | Formula::Eq { .. } => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::BoolDisj(a, b) => {
                go(a, out);
                go(b, out);
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::SelImp(_, b) => go(b, out),
        }
    }
    let mut out = Vec::new();
    go(f, &mut out);
    out
}

/// No dependency atoms and no `++`.
pub fn is_first_order(f: &Formula) -> bool {
    to_classical(f).is_some()
}

pub fn has_sugar(f: &Formula) -> bool {
    match f {
        Formula::SelImp(..) | Formula::BoolDisj(..) => true,
        Formula::Rel { .. } | Formula::Eq { .. } | Formula::Dep(_) => false,
        Formula::And(a, b) | Formula::Or(a, b) => has_sugar(a) || has_sugar(b),
        Formula::Exists(_, b) | Formula::Forall(_, b) => has_sugar(b),
    }
}

pub fn is_quantifier_free(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => false,
        Formula::Rel { .. } | Formula::Eq { .. } | Formula::Dep(_) => true,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::BoolDisj(a, b) => {
            is_quantifier_free(a) && is_quantifier_free(b)
        }
        Formula::SelImp(t, b) => is_quantifier_free_classical(t) && is_quantifier_free(b),
    }
}

pub fn is_quantifier_free_classical(c: &Classical) -> bool {
    match c {
        Classical::Exists(..) | Classical::Forall(..) => false,
        Classical::Rel { .. } | Classical::Eq(..) => true,
        Classical::Not(a) => is_quantifier_free_classical(a),
        Classical::And(a, b) | Classical::Or(a, b) | Classical::Implies(a, b) => {
            is_quantifier_free_classical(a) && is_quantifier_free_classical(b)
        }
    }
}

/// `sym` occurs only in positive literals. The antecedent of `~>` is read as
/// negated, matching `(¬θ) ∨ (θ ∧ φ)`, so a symbol there counts both ways.
pub fn check_positive(f: &Formula, sym: &str) -> bool {
    match f {
        Formula::Rel {
            sym: s, positive, ..
        } => &**s != sym || *positive,
        Formula::Eq { .. } | Formula::Dep(_) => true,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::BoolDisj(a, b) => {
            check_positive(a, sym) && check_positive(b, sym)
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => check_positive(b, sym),
        Formula::SelImp(t, b) => count_classical(t, sym) == 0 && check_positive(b, sym),
    }
}

pub fn check_positive_classical(c: &Classical, sym: &str) -> bool {
    check_positive(&classical_to_nnf(c), sym)
}

/// Number of literal occurrences of `sym`.
pub fn count_occurrences(f: &Formula, sym: &str) -> usize {
    let mut n = 0;
    walk_rels(f, &mut |s, _| n += (s == sym) as usize);
    n
}

pub fn count_classical(c: &Classical, sym: &str) -> usize {
    let mut n = 0;
    walk_rels_classical(c, &mut |s, _| n += (s == sym) as usize);
    n
}

/// Simultaneous capture-avoiding renaming of free variables.
pub fn rename_vars_classical(
    c: &Classical,
    map: &BTreeMap<Var, Var>,
    fresh: &mut FreshGen,
) -> Classical {
    let get = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
    match c {
        Classical::Rel { sym, args } => Classical::Rel {
            sym: sym.clone(),
            args: args.iter().map(get).collect(),
        },
        Classical::Eq(a, b) => Classical::Eq(get(a), get(b)),
        Classical::Not(a) => Classical::not(rename_vars_classical(a, map, fresh)),
        Classical::And(a, b) => Classical::and(
            rename_vars_classical(a, map, fresh),
            rename_vars_classical(b, map, fresh),
        ),
        Classical::Or(a, b) => Classical::or(
            rename_vars_classical(a, map, fresh),
            rename_vars_classical(b, map, fresh),
        ),
        Classical::Implies(a, b) => Classical::implies(
            rename_vars_classical(a, map, fresh),
            rename_vars_classical(b, map, fresh),
        ),
        Classical::Exists(v, b) | Classical::Forall(v, b) => {
            let mut inner = map.clone();
            inner.remove(v);
            let mut bv = v.clone();
            let free_b = free_vars_classical(b);
            let captured = inner
                .iter()
                .any(|(from, to)| to == v && free_b.contains(from));
            if captured {
                bv = fresh.var(v.as_str().trim_start_matches('_'));
                inner.insert(v.clone(), bv.clone());
            }
            let body = rename_vars_classical(b, &inner, fresh);
            match c {
                Classical::Exists(..) => Classical::exists(bv, body),
                _ => Classical::forall(bv, body),
            }
        }
    }
}

/// Replace every `sym(t)` in `phi` by `theta(t, z)`, where `params` lists
/// the variables of `theta` that stand for the arguments and every other
/// free variable of `theta` is a parameter `z` that must stay free.
pub fn substitute_relation(
    phi: &Classical,
    sym: &str,
    params: &[Var],
    theta: &Classical,
) -> Result<Classical, FormulaError> {
    for (i, p) in params.iter().enumerate() {
        if params[..i].contains(p) {
            return Err(FormulaError::RepeatedParameter(p.clone()));
        }
    }
    let mut fresh = FreshGen::new();
    fresh.reserve_classical(phi).reserve_classical(theta);
    params.iter().for_each(|p| fresh.reserve(p.as_str()));
    let extra: BTreeSet<Var> = free_vars_classical(theta)
        .into_iter()
        .filter(|v| !params.contains(v))
        .collect();
    subst_rel(phi, sym, params, theta, &extra, &mut fresh)
}

fn subst_rel(
    c: &Classical,
    sym: &str,
    params: &[Var],
    theta: &Classical,
    extra: &BTreeSet<Var>,
    fresh: &mut FreshGen,
) -> Result<Classical, FormulaError> {
    let rec = |x: &Classical, fresh: &mut FreshGen| subst_rel(x, sym, params, theta, extra, fresh);
    Ok(match c {
        Classical::Rel { sym: s, args } if &**s == sym => {
            if args.len() != params.len() {
                return Err(FormulaError::Arity {
                    sym: sym.to_string(),
                    expected: params.len(),
                    got: args.len(),
                });
            }
            let map = params.iter().cloned().zip(args.iter().cloned()).collect();
            rename_vars_classical(theta, &map, fresh)
        }
        Classical::Rel { .. } | Classical::Eq(..) => c.clone(),
        Classical::Not(a) => Classical::not(rec(a, fresh)?),
        Classical::And(a, b) => Classical::and(rec(a, fresh)?, rec(b, fresh)?),
        Classical::Or(a, b) => Classical::or(rec(a, fresh)?, rec(b, fresh)?),
        Classical::Implies(a, b) => Classical::implies(rec(a, fresh)?, rec(b, fresh)?),
        Classical::Exists(v, b) | Classical::Forall(v, b) => {
            let (v, b) = if extra.contains(v) {
                // the binder would capture a parameter of theta
                let nv = fresh.var(v.as_str().trim_start_matches('_'));
                let map = BTreeMap::from([(v.clone(), nv.clone())]);
                (nv, rename_vars_classical(b, &map, fresh))
            } else {
                (v.clone(), (**b).clone())
            };
            let body = rec(&b, fresh)?;
            match c {
                Classical::Exists(..) => Classical::exists(v, body),
                _ => Classical::forall(v, body),
            }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    Exists,
    Forall,
}

/// Split a prenex formula into its prefix and quantifier-free matrix.
pub fn prenex_parts(c: &Classical) -> Result<(Vec<(Quant, Var)>, Classical), FormulaError> {
    let mut prefix = Vec::new();
    let mut cur = c;
    loop {
        match cur {
            Classical::Exists(v, b) => {
                prefix.push((Quant::Exists, v.clone()));
                cur = b;
            }
            Classical::Forall(v, b) => {
                prefix.push((Quant::Forall, v.clone()));
                cur = b;
            }
            _ => break,
        }
    }
    if !is_quantifier_free_classical(cur) {
        return Err(FormulaError::NotPrenex);
    }
    Ok((prefix, cur.clone()))
}

pub fn is_prenex(c: &Classical) -> bool {
    prenex_parts(c).is_ok()
}

/// Prenex normal form: negation normal form, bound variables renamed apart
/// from each other and from the free variables, quantifiers pulled out left
/// to right.
pub fn to_prenex(c: &Classical) -> Classical {
    let n = classical_nnf(c);
    let mut fresh = FreshGen::new();
    fresh.reserve_classical(&n);
    let mut seen: BTreeSet<Var> = free_vars_classical(&n);
    let apart = rename_apart(&n, &mut seen, &mut fresh);
    let (prefix, matrix) = pull(&apart);
    prefix
        .into_iter()
        .rev()
        .fold(matrix, |body, (q, v)| match q {
            Quant::Exists => Classical::exists(v, body),
            Quant::Forall => Classical::forall(v, body),
        })
}

fn rename_apart(c: &Classical, seen: &mut BTreeSet<Var>, fresh: &mut FreshGen) -> Classical {
    match c {
        Classical::Rel { .. } | Classical::Eq(..) | Classical::Not(_) => c.clone(),
        Classical::And(a, b) => {
            let a = rename_apart(a, seen, fresh);
            Classical::and(a, rename_apart(b, seen, fresh))
        }
        Classical::Or(a, b) => {
            let a = rename_apart(a, seen, fresh);
            Classical::or(a, rename_apart(b, seen, fresh))
        }
        Classical::Implies(..) => unreachable!("input is in negation normal form"),
        Classical::Exists(v, b) | Classical::Forall(v, b) => {
            let (v, b) = if seen.contains(v) {
                let nv = fresh.var(v.as_str().trim_start_matches('_'));
                let map = BTreeMap::from([(v.clone(), nv.clone())]);
                (nv, rename_vars_classical(b, &map, fresh))
            } else {
                (v.clone(), (**b).clone())
            };
            seen.insert(v.clone());
            let body = rename_apart(&b, seen, fresh);
            match c {
                Classical::Exists(..) => Classical::exists(v, body),
                _ => Classical::forall(v, body),
            }
        }
    }
}

fn pull(c: &Classical) -> (Vec<(Quant, Var)>, Classical) {
    match c {
        Classical::And(a, b) | Classical::Or(a, b) => {
            let (mut pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            pa.extend(pb);
            let m = match c {
                Classical::And(..) => Classical::and(ma, mb),
                _ => Classical::or(ma, mb),
            };
            (pa, m)
        }
        Classical::Exists(v, b) => {
            let (mut p, m) = pull(b);
            p.insert(0, (Quant::Exists, v.clone()));
            (p, m)
        }
        Classical::Forall(v, b) => {
            let (mut p, m) = pull(b);
            p.insert(0, (Quant::Forall, v.clone()));
            (p, m)
        }
        _ => (vec![], c.clone()),
    }
}

/// Prenex form of a first-order team formula; refused when the formula has
/// dependency atoms or `++`.
pub fn to_prenex_team(f: &Formula) -> Result<Formula, FormulaError> {
    let c = require_first_order(f)?;
    Ok(classical_to_nnf(&to_prenex(&c)))
}

pub fn require_first_order(f: &Formula) -> Result<Classical, FormulaError> {
    if let Some(a) = dep_atoms(f).first() {
        return Err(FormulaError::DependencyAtom(a.to_string()));
    }
    to_classical(f).ok_or(FormulaError::BoolDisj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vars;
    use crate::syntax::{parse_classical, parse_formula};

    fn fv(s: &str) -> BTreeSet<Var> {
        free_vars(&parse_formula(s).unwrap())
    }

    #[test]
    fn free_variables() {
        assert_eq!(fv("A x (R(x,y))"), vars(&["y"]).into_iter().collect());
        assert_eq!(fv("#dep(x;y)"), vars(&["x", "y"]).into_iter().collect());
        assert_eq!(fv("E z (#const(z) & z != x)"), vars(&["x"]).into_iter().collect());
        assert_eq!(fv("x = u ~> P(y)"), vars(&["u", "x", "y"]).into_iter().collect());
    }

    #[test]
    fn positivity() {
        assert!(!check_positive(&parse_formula("R(x) | !R(y)").unwrap(), "R"));
        let f = parse_formula("A x (S(x) -> R(x))").unwrap();
        assert!(check_positive(&f, "R"));
        assert!(!check_positive(&f, "S"));
        assert!(check_positive(&parse_formula("P(x)").unwrap(), "R"));
        let c = parse_classical("~(R(x) -> S(x))").unwrap();
        assert!(check_positive_classical(&c, "R"));
        assert!(!check_positive_classical(&c, "S"));
    }

    #[test]
    fn substitution_into_constancy_sentence() {
        let phi = parse_classical("A x A y (R(x) & R(y) -> x = y)").unwrap();
        let theta = parse_classical("x = z").unwrap();
        let out = substitute_relation(&phi, "R", &vars(&["x"]), &theta).unwrap();
        assert_eq!(out, parse_classical("A x A y (x = z & y = z -> x = y)").unwrap());
    }

    #[test]
    fn substitution_avoids_capture_of_parameters() {
        // the binder `z` of phi clashes with the parameter z of theta
        let phi = parse_classical("E z (R(z) & z = z)").unwrap();
        let theta = parse_classical("x = z").unwrap();
        let out = substitute_relation(&phi, "R", &vars(&["x"]), &theta).unwrap();
        assert!(free_vars_classical(&out).contains(&Var::new("z")));
        assert_eq!(count_classical(&out, "R"), 0);
        match &out {
            Classical::Exists(v, _) => assert_ne!(v.as_str(), "z"),
            _ => panic!("{out}"),
        }
    }

    #[test]
    fn substitution_renames_theta_binders() {
        // theta binds y, and the argument is y
        let phi = parse_classical("A y R(y)").unwrap();
        let theta = parse_classical("E y (x != y)").unwrap();
        let out = substitute_relation(&phi, "R", &vars(&["x"]), &theta).unwrap();
        match &out {
            Classical::Forall(y, b) => match &**b {
                Classical::Exists(w, inner) => {
                    assert_ne!(y, w);
                    assert_eq!(**inner, Classical::neq(y.clone(), w.clone()));
                }
                _ => panic!("{out}"),
            },
            _ => panic!("{out}"),
        }
    }

    #[test]
    fn substitution_arity_mismatch() {
        let phi = parse_classical("R(x,y)").unwrap();
        let theta = parse_classical("x = x").unwrap();
        assert!(matches!(
            substitute_relation(&phi, "R", &vars(&["x"]), &theta),
            Err(FormulaError::Arity { .. })
        ));
    }

    #[test]
    fn prenex_shapes() {
        let c = parse_classical("(A x R(x)) & (E y S(y))").unwrap();
        assert_eq!(to_prenex(&c), parse_classical("A x E y (R(x) & S(y))").unwrap());
        let q = parse_classical("R(x) | ~S(y)").unwrap();
        assert_eq!(to_prenex(&q), q);
        let clash = parse_classical("(E x R(x)) & R(x) & (A x S(x))").unwrap();
        let p = to_prenex(&clash);
        let (prefix, _) = prenex_parts(&p).unwrap();
        assert_eq!(prefix.len(), 2);
        assert!(prefix.iter().all(|(_, v)| v.as_str() != "x"));
        assert_eq!(free_vars_classical(&p), vars(&["x"]).into_iter().collect());
    }

    #[test]
    fn prenex_refuses_dependencies() {
        assert!(to_prenex_team(&parse_formula("E x #const(x)").unwrap()).is_err());
        assert!(to_prenex_team(&parse_formula("(E x P(x)) & P(y)").unwrap()).is_ok());
    }

    #[test]
    fn fresh_names_avoid_existing() {
        let mut g = FreshGen::new();
        g.reserve_formula(&parse_formula("E _v P(_v1)").unwrap());
        let a = g.var("v");
        let b = g.var("v");
        assert_ne!(a.as_str(), "_v");
        assert_ne!(a.as_str(), "_v1");
        assert_ne!(a, b);
    }
}
