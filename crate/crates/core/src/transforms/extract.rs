use super::TransformError;
use crate::deps::{Dependency, Property, Registry};
use crate::model::{Interpretation, Overlay, Relation};
use crate::syntax::{
    check_positive_classical, Classical, DepAtom, Formula, FormulaError, FreshGen,
};

/// One extracted atom: the fresh symbol that replaced it and the dependency
/// its relation has to satisfy.
#[derive(Debug, Clone)]
pub struct Binding {
    pub symbol: String,
    pub dep: Dependency,
    pub arity: usize,
}

#[derive(Debug, Clone)]
pub struct ExtractionResult {
    pub formula: Formula,
    pub bindings: Vec<Binding>,
}

impl ExtractionResult {
    /// `m` expanded with `rels[i]` as the interpretation of the i-th symbol.
    pub fn expand<'a>(&self, m: &'a dyn Interpretation, rels: &[Relation]) -> Overlay<'a> {
        let mut o = Overlay::over(m);
        for (b, r) in self.bindings.iter().zip(rels) {
            o.set(&b.symbol, r.clone());
        }
        o
    }
}

/// Replace every atom of a target dependency by `S_i t` for a fresh symbol
/// `S_i`, one symbol per occurrence. Targets must be certified downwards
/// closed.
pub fn extract_atoms(
    phi: &Formula,
    targets: &[Dependency],
    registry: &Registry,
) -> Result<ExtractionResult, TransformError> {
    for d in targets {
        if !d.certified(Property::Downwards) {
            return Err(TransformError::NotDownwardsClosed(d.name().to_string()));
        }
    }
    let mut fresh = FreshGen::new();
    fresh.reserve_formula(phi);
    let mut bindings = Vec::new();
    let formula = walk(phi, &mut |atom: &DepAtom| {
        let d = registry.resolve(atom)?;
        if !targets.iter().any(|t| t.name() == d.name()) {
            return Ok(None);
        }
        let symbol = fresh.name("S");
        bindings.push(Binding {
            symbol: symbol.clone(),
            dep: d,
            arity: atom.arity(),
        });
        Ok(Some(Formula::rel(&symbol, atom.tuple())))
    })?;
    Ok(ExtractionResult { formula, bindings })
}

type AtomRewrite<'a> = dyn FnMut(&DepAtom) -> Result<Option<Formula>, TransformError> + 'a;

fn walk(f: &Formula, rewrite: &mut AtomRewrite<'_>) -> Result<Formula, TransformError> {
    Ok(match f {
        Formula::Rel { .. } | Formula::Eq { .. } => f.clone(),
        Formula::Dep(a) => rewrite(a)?.unwrap_or_else(|| f.clone()),
        Formula::And(a, b) => Formula::and(walk(a, rewrite)?, walk(b, rewrite)?),
        Formula::Or(a, b) => Formula::or(walk(a, rewrite)?, walk(b, rewrite)?),
        Formula::BoolDisj(a, b) => Formula::bool_disj(walk(a, rewrite)?, walk(b, rewrite)?),
        Formula::Exists(v, b) => Formula::exists(v.clone(), walk(b, rewrite)?),
        Formula::Forall(v, b) => Formula::forall(v.clone(), walk(b, rewrite)?),
        Formula::SelImp(t, b) => Formula::sel_imp(t.clone(), walk(b, rewrite)?),
    })
}

/// Give each occurrence of `sym` in `chi` its own fresh symbol `W_i`
/// (generated by `fresh`, which should already know the names of `chi`).
/// `sym` must occur only positively.
pub fn split_occurrences(
    chi: &Classical,
    sym: &str,
    fresh: &mut FreshGen,
) -> Result<(Classical, Vec<String>), TransformError> {
    if !check_positive_classical(chi, sym) {
        return Err(FormulaError::NegativeOccurrence(sym.to_string()).into());
    }
    fresh.reserve_classical(chi);
    let mut names = Vec::new();
    let out = split(chi, sym, &mut || {
        let n = fresh.name("W");
        names.push(n.clone());
        n
    });
    Ok((out, names))
}

fn split(c: &Classical, sym: &str, next: &mut dyn FnMut() -> String) -> Classical {
    match c {
        Classical::Rel { sym: s, args } if &**s == sym => Classical::rel(&next(), args.clone()),
        Classical::Rel { .. } | Classical::Eq(..) => c.clone(),
        Classical::Not(a) => Classical::not(split(a, sym, next)),
        Classical::And(a, b) => {
            let a = split(a, sym, next);
            Classical::and(a, split(b, sym, next))
        }
        Classical::Or(a, b) => {
            let a = split(a, sym, next);
            Classical::or(a, split(b, sym, next))
        }
        Classical::Implies(a, b) => {
            let a = split(a, sym, next);
            Classical::implies(a, split(b, sym, next))
        }
        Classical::Exists(v, b) => Classical::exists(v.clone(), split(b, sym, next)),
        Classical::Forall(v, b) => Classical::forall(v.clone(), split(b, sym, next)),
    }
}
