use std::collections::BTreeMap;

use super::TransformError;
use crate::deps::{defining_sentence, Dependency};
use crate::model::Var;
use crate::syntax::{
    classical_to_nnf, free_vars_classical, relation_symbols_classical, rename_vars_classical,
    substitute_relation, Classical, DepAtom, Formula, FormulaError, FreshGen,
};

fn block(base: &str, k: usize) -> Vec<Var> {
    if k == 1 {
        return vec![Var::new(base)];
    }
    (1..=k).map(|i| Var::new(&format!("{base}{i}"))).collect()
}

/// `∃x(¬R x ∧ ∀y((¬R y ∧ x ≠ y) ∨ D y))`: true in `<M, R>` iff some proper
/// superset of `R` belongs to `d`.
pub fn build_phi_r(d: &Dependency) -> Result<Formula, TransformError> {
    let k = d.arity();
    let (x, y) = (block("x", k), block("y", k));
    let differ = Formula::disj(
        x.iter()
            .zip(&y)
            .map(|(a, b)| Formula::neq(a.clone(), b.clone()))
            .collect(),
    )
    // with k = 0 there is a single tuple, so no two differ
    .unwrap_or_else(|| Formula::dep("false", vec![vec![]]));
    let inner = Formula::or(Formula::and(Formula::not_rel("R", y.clone()), differ), d.atom(&y)?);
    Ok(Formula::exists_all(
        &x,
        Formula::and(Formula::not_rel("R", x.clone()), Formula::forall_all(&y, inner)),
    ))
}

/// `∀x(¬T x ∨ D_max x)` for the maximality dependency `dmax`: true in
/// `<M, T>` iff `T` is contained in a maximal member.
pub fn build_theta_t(dmax: &Dependency) -> Result<Formula, TransformError> {
    let x = block("x", dmax.arity());
    Ok(Formula::forall_all(
        &x,
        Formula::or(Formula::not_rel("T", x.clone()), dmax.atom(&x)?),
    ))
}

/// A formula `θ(x, z)` over the empty vocabulary: `x` has the arity of the
/// dependency and `z` lists the parameters.
#[derive(Debug, Clone)]
pub struct Eq1Branch {
    pub theta: Classical,
    pub x: Vec<Var>,
    pub z: Vec<Var>,
}

/// `⊔_i ∃z(=(z) ∧ χ_i(z) ∧ θ_i(v, z))`, where `χ_i` is the defining
/// sentence of `d` with `R t` replaced by `θ_i(t, z)`. The empty list gives
/// the atom `#false()`.
pub fn build_eq1(d: &Dependency, branches: &[Eq1Branch], v: &[Var]) -> Result<Formula, TransformError> {
    let phi = defining_sentence(d).ok_or_else(|| TransformError::NoDefiningSentence(d.name().to_string()))?;
    if v.len() != d.arity() {
        return Err(crate::deps::DepError::Arity {
            dep: d.name().to_string(),
            expected: d.arity(),
            got: v.len(),
        }
        .into());
    }
    let mut fresh = FreshGen::new();
    fresh.reserve_classical(&phi);
    v.iter().for_each(|x| fresh.reserve(x.as_str()));
    for b in branches {
        fresh.reserve_classical(&b.theta);
    }
    let mut parts = Vec::new();
    for b in branches {
        parts.push(branch(&phi, b, v, &mut fresh, d.arity())?);
    }
    Ok(parts
        .into_iter()
        .rev()
        .reduce(|acc, f| Formula::bool_disj(f, acc))
        .unwrap_or_else(|| Formula::Dep(DepAtom::new("false", vec![vec![]]))))
}

fn branch(
    phi: &Classical,
    b: &Eq1Branch,
    v: &[Var],
    fresh: &mut FreshGen,
    k: usize,
) -> Result<Formula, TransformError> {
    if let Some(sym) = relation_symbols_classical(&b.theta)?.into_keys().next() {
        return Err(FormulaError::UnexpectedSymbol(sym).into());
    }
    if b.x.len() != k {
        return Err(FormulaError::Arity {
            sym: "R".into(),
            expected: k,
            got: b.x.len(),
        }
        .into());
    }
    let params: Vec<&Var> = b.x.iter().chain(&b.z).collect();
    for (i, p) in params.iter().enumerate() {
        if params[..i].contains(p) {
            return Err(FormulaError::RepeatedParameter((*p).clone()).into());
        }
    }
    let stray: Vec<Var> = free_vars_classical(&b.theta)
        .into_iter()
        .filter(|x| !params.contains(&x))
        .collect();
    if !stray.is_empty() {
        return Err(FormulaError::NotASentence(stray).into());
    }
    // move the parameters out of the way of v and of other branches
    let z: Vec<Var> = b.z.iter().map(|_| fresh.var("z")).collect();
    let to_z: BTreeMap<Var, Var> = b.z.iter().cloned().zip(z.iter().cloned()).collect();
    let theta = rename_vars_classical(&b.theta, &to_z, fresh);
    let chi = substitute_relation(phi, "R", &b.x, &theta)?;
    let to_v: BTreeMap<Var, Var> = b.x.iter().cloned().zip(v.iter().cloned()).collect();
    let at_v = rename_vars_classical(&theta, &to_v, fresh);
    let body = Formula::and(classical_to_nnf(&chi), classical_to_nnf(&at_v));
    if z.is_empty() {
        return Ok(body);
    }
    let c = Dependency::constancy(z.len()).atom(&z)?;
    Ok(Formula::exists_all(&z, Formula::and(c, body)))
}
