use super::TransformError;
use crate::deps::Dependency;
use crate::model::Var;
use crate::syntax::{
    classical_to_nnf, count_classical, count_occurrences, is_quantifier_free, prenex_parts,
    Classical, Formula, FormulaError, FreshGen, Quant,
};

/// `D_∪(v_1..v_n; w_1..w_n)`: the union over `i` of the relations
/// `{s(v_i) : s ∈ X, s(v_i) = s(w_i)}` satisfies `d`.
///
/// With `n = 0` the union is empty and the formula instead applies `d` to
/// an empty subteam.
pub fn build_dep_union(
    d: &Dependency,
    vs: &[Vec<Var>],
    ws: &[Vec<Var>],
    fresh: &mut FreshGen,
) -> Result<Formula, TransformError> {
    assert_eq!(vs.len(), ws.len());
    let k = d.arity();
    for t in vs.iter().chain(ws) {
        fresh_reserve(fresh, t);
        if t.len() != k {
            return Err(crate::deps::DepError::Arity {
                dep: d.name().to_string(),
                expected: k,
                got: t.len(),
            }
            .into());
        }
    }
    let n = vs.len();
    if n == 0 {
        let q = fresh.var("q");
        let args = vec![q.clone(); k];
        return Ok(Formula::forall(
            q.clone(),
            Formula::sel_imp(Classical::neq(q.clone(), q), d.atom(&args)?),
        ));
    }
    let ps = fresh.vars("p", n);
    let q = fresh.var("q");
    let z0 = fresh.vars("z", k);
    let z1 = fresh.vars("z", k);

    let hit = Classical::disj(ps.iter().map(|p| Classical::eq(q.clone(), p.clone())).collect())
        .expect("n >= 1");
    let mut parts = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut guard: Vec<Classical> = ps[..i]
            .iter()
            .map(|p| Classical::neq(q.clone(), p.clone()))
            .collect();
        guard.push(Classical::eq(q.clone(), ps[i].clone()));
        let z: Vec<Var> = z0.iter().chain(&z1).cloned().collect();
        let vw: Vec<Var> = vs[i].iter().chain(&ws[i]).cloned().collect();
        let copy = Formula::tuple_eq(&z, &vw).unwrap_or_else(|| top(&q));
        parts.push(Formula::sel_imp(Classical::conj(guard).expect("nonempty"), copy));
    }
    let same = Classical::tuple_eq(&z0, &z1).unwrap_or_else(|| Classical::top(q.clone()));
    parts.push(Formula::sel_imp(same, d.atom(&z0)?));
    let body = Formula::sel_imp(hit, Formula::conj(parts).expect("nonempty"));
    let zs: Vec<Var> = z0.iter().chain(&z1).cloned().collect();
    let mut all = ps;
    all.push(q);
    Ok(Formula::forall_all(&all, Formula::exists_all(&zs, body)))
}

fn fresh_reserve(fresh: &mut FreshGen, vs: &[Var]) {
    for v in vs {
        fresh.reserve(v.as_str());
    }
}

fn top(v: &Var) -> Formula {
    Formula::eq(v.clone(), v.clone())
}

/// Result of replacing the occurrence `W t` by `v = w ∧ t = w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QfreePutback {
    pub formula: Formula,
    pub v: Vec<Var>,
    pub w: Vec<Var>,
}

/// Replace the single positive occurrence `W t` of a quantifier-free
/// formula by `v = w ∧ t = w` for fresh tuples `v`, `w` of the arity of
/// `W`. If `W` does not occur the formula is returned unchanged.
pub fn put_back_qfree(
    psi: &Formula,
    w_sym: &str,
    arity: usize,
    fresh: &mut FreshGen,
) -> Result<QfreePutback, TransformError> {
    if !is_quantifier_free(psi) {
        return Err(FormulaError::Quantifier.into());
    }
    let count = count_occurrences(psi, w_sym);
    if count > 1 {
        return Err(FormulaError::MultipleOccurrences {
            sym: w_sym.to_string(),
            count,
        }
        .into());
    }
    if !crate::syntax::check_positive(psi, w_sym) {
        return Err(FormulaError::NegativeOccurrence(w_sym.to_string()).into());
    }
    if arity == 0 {
        return Err(nullary(w_sym));
    }
    fresh.reserve_formula(psi);
    let v = fresh.vars("v", arity);
    let w = fresh.vars("w", arity);
    let formula = replace_team(psi, w_sym, &v, &w)?;
    Ok(QfreePutback { formula, v, w })
}

fn nullary(sym: &str) -> TransformError {
    FormulaError::Arity {
        sym: sym.to_string(),
        expected: 1,
        got: 0,
    }
    .into()
}

fn encoding(t: &[Var], v: &[Var], w: &[Var]) -> Option<Formula> {
    Some(Formula::and(Formula::tuple_eq(v, w)?, Formula::tuple_eq(t, w)?))
}

fn replace_team(f: &Formula, sym: &str, v: &[Var], w: &[Var]) -> Result<Formula, TransformError> {
    Ok(match f {
        Formula::Rel { sym: s, args, .. } if &**s == sym => {
            if args.len() != v.len() {
                return Err(FormulaError::Arity {
                    sym: sym.to_string(),
                    expected: v.len(),
                    got: args.len(),
                }
                .into());
            }
            encoding(args, v, w).expect("positive arity")
        }
        Formula::Rel { .. } | Formula::Eq { .. } | Formula::Dep(_) => f.clone(),
        Formula::And(a, b) => Formula::and(replace_team(a, sym, v, w)?, replace_team(b, sym, v, w)?),
        Formula::Or(a, b) => Formula::or(replace_team(a, sym, v, w)?, replace_team(b, sym, v, w)?),
        Formula::SelImp(t, b) => Formula::sel_imp(t.clone(), replace_team(b, sym, v, w)?),
        Formula::BoolDisj(..) | Formula::Exists(..) | Formula::Forall(..) => {
            return Err(FormulaError::Quantifier.into())
        }
    })
}

fn replace_classical(c: &Classical, sym: &str, v: &[Var], w: &[Var]) -> Classical {
    match c {
        Classical::Rel { sym: s, args } if &**s == sym => Classical::and(
            Classical::tuple_eq(v, w).expect("positive arity"),
            Classical::tuple_eq(args, w).expect("positive arity"),
        ),
        Classical::Rel { .. } | Classical::Eq(..) => c.clone(),
        Classical::Not(a) => Classical::not(replace_classical(a, sym, v, w)),
        Classical::And(a, b) => {
            Classical::and(replace_classical(a, sym, v, w), replace_classical(b, sym, v, w))
        }
        Classical::Or(a, b) => {
            Classical::or(replace_classical(a, sym, v, w), replace_classical(b, sym, v, w))
        }
        Classical::Implies(a, b) => {
            Classical::implies(replace_classical(a, sym, v, w), replace_classical(b, sym, v, w))
        }
        Classical::Exists(x, b) => Classical::exists(x.clone(), replace_classical(b, sym, v, w)),
        Classical::Forall(x, b) => Classical::forall(x.clone(), replace_classical(b, sym, v, w)),
    }
}

/// One dependency whose relation was split into the symbols `symbols`,
/// with the tuples `v[i]`, `w[i]` that encode `symbols[i]` in the
/// assembled sentence.
#[derive(Debug, Clone)]
pub struct PutbackGroup {
    pub dep: Dependency,
    pub symbols: Vec<String>,
    pub v: Vec<Vec<Var>>,
    pub w: Vec<Vec<Var>>,
}

/// From a prenex first-order sentence `Q x ψ(W..)` in which every listed
/// symbol occurs once and positively, build
/// `Q x ∃v_1 w_1 .. (⋀ D_∪(..) ∧ ψ′)`, where `ψ′` replaces each `W_i t` by
/// `v_i = w_i ∧ t = w_i`.
pub fn assemble_putback(
    chi: &Classical,
    targets: &[(Dependency, Vec<String>)],
) -> Result<(Formula, Vec<PutbackGroup>), TransformError> {
    let (prefix, matrix) = prenex_parts(chi)?;
    let mut fresh = FreshGen::new();
    fresh.reserve_classical(chi);
    let mut groups = Vec::new();
    let mut matrix = matrix;
    let mut block = Vec::new();
    for (dep, symbols) in targets {
        let k = dep.arity();
        let mut g = PutbackGroup {
            dep: dep.clone(),
            symbols: symbols.clone(),
            v: vec![],
            w: vec![],
        };
        for sym in symbols {
            let count = count_classical(&matrix, sym);
            if count != 1 {
                return Err(FormulaError::MultipleOccurrences {
                    sym: sym.clone(),
                    count,
                }
                .into());
            }
            if !crate::syntax::check_positive_classical(&matrix, sym) {
                return Err(FormulaError::NegativeOccurrence(sym.clone()).into());
            }
            if k == 0 {
                return Err(nullary(sym));
            }
            check_arity(&matrix, sym, k)?;
            let v = fresh.vars("v", k);
            let w = fresh.vars("w", k);
            matrix = replace_classical(&matrix, sym, &v, &w);
            block.extend(v.iter().chain(&w).cloned());
            g.v.push(v);
            g.w.push(w);
        }
        groups.push(g);
    }
    let mut conjuncts = Vec::new();
    for g in &groups {
        conjuncts.push(build_dep_union(&g.dep, &g.v, &g.w, &mut fresh)?);
    }
    conjuncts.push(classical_to_nnf(&matrix));
    let body = Formula::exists_all(&block, Formula::conj(conjuncts).expect("nonempty"));
    let out = prefix.into_iter().rev().fold(body, |b, (q, v)| match q {
        Quant::Exists => Formula::exists(v, b),
        Quant::Forall => Formula::forall(v, b),
    });
    Ok((out, groups))
}

fn check_arity(c: &Classical, sym: &str, k: usize) -> Result<(), TransformError> {
    let syms = crate::syntax::relation_symbols_classical(c)?;
    match syms.get(sym) {
        Some(&a) if a != k => Err(FormulaError::Arity {
            sym: sym.to_string(),
            expected: k,
            got: a,
        }
        .into()),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deps::Registry;
    use crate::eval::{select_team, team_eval, EvalConfig};
    use crate::model::{all_tuples, enumerate_lax_supplements, vars, Elem, Overlay, Relation, Structure, Team};
    use crate::syntax::{free_vars, parse_classical, parse_formula};

    #[test]
    fn union_template_for_one_tuple() {
        let mut g = FreshGen::new();
        let f = build_dep_union(&Dependency::constancy(1), &[vars(&["v"])], &[vars(&["w"])], &mut g).unwrap();
        let want = parse_formula(
            "A _p A _q E _z E _z1 (_q = _p ~> ((_q = _p ~> (_z = v & _z1 = w)) & (_z = _z1 ~> #const(_z))))",
        )
        .unwrap();
        assert_eq!(f, want);
    }

    fn union_oracle(d: &Dependency, u: &[Elem], x: &Team, vs: &[Vec<Var>], ws: &[Vec<Var>]) -> bool {
        let m = Overlay::bare(u);
        let mut all = Relation::empty(d.arity());
        for (v, w) in vs.iter().zip(ws) {
            let sel = select_team(x, &Classical::tuple_eq(v, w).unwrap(), &m).unwrap();
            all = all.union(&sel.project(v).unwrap());
        }
        d.holds(u, &all).unwrap()
    }

    #[test]
    fn union_contract_small() {
        let reg = Registry::standard();
        let cfg = EvalConfig::fast();
        let (vs, ws) = (vec![vars(&["a"]), vars(&["c"])], vec![vars(&["b"]), vars(&["d"])]);
        let cols = vars(&["a", "b", "c", "d"]);
        for d in [Dependency::constancy(1), Dependency::nt()] {
            let f = build_dep_union(&d, &vs, &ws, &mut FreshGen::new()).unwrap();
            assert_eq!(free_vars(&f), cols.iter().cloned().collect());
            let u = [0, 1];
            let rows = all_tuples(&u, 4);
            for i in 0..rows.len() {
                for j in i..rows.len() {
                    let x = Team::new(cols.clone(), vec![rows[i].clone(), rows[j].clone()]).unwrap();
                    let m = Overlay::bare(&u);
                    assert_eq!(
                        team_eval(&m, &reg, &x, &f, &cfg).unwrap(),
                        union_oracle(&d, &u, &x, &vs, &ws),
                        "{x:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn qfree_examples() {
        let psi = parse_formula("W(x)").unwrap();
        let p = put_back_qfree(&psi, "W", 1, &mut FreshGen::new()).unwrap();
        assert_eq!(p.formula, parse_formula("_v = _w & x = _w").unwrap());
        let absent = parse_formula("P(x) | x = y").unwrap();
        let p = put_back_qfree(&absent, "W", 1, &mut FreshGen::new()).unwrap();
        assert_eq!(p.formula, absent);
        assert!(put_back_qfree(&parse_formula("E y W(y)").unwrap(), "W", 1, &mut FreshGen::new()).is_err());
        assert!(put_back_qfree(&parse_formula("W(x) | W(y)").unwrap(), "W", 1, &mut FreshGen::new()).is_err());
        assert!(put_back_qfree(&parse_formula("!W(x)").unwrap(), "W", 1, &mut FreshGen::new()).is_err());
    }

    /// `M ⊨_X ψ(W)` against `∃H: M ⊨_{X[H/vw]} ψ′ and the encoded relation
    /// is inside W`, enumerating all W and all lax supplements.
    #[test]
    fn qfree_contract_small() {
        let reg = Registry::standard();
        let cfg = EvalConfig::fast();
        let mut m = Structure::canonical(2).unwrap();
        m.add_predicate("P", [0]).unwrap();
        let u = [0, 1];
        for text in ["W(x)", "W(x) | P(x)", "(W(x) & #const(x)) | x = y", "P(y) ~> W(y)"] {
            let psi = parse_formula(text).unwrap();
            let p = put_back_qfree(&psi, "W", 1, &mut FreshGen::new()).unwrap();
            let xs = vars(&["x", "y"]);
            let rows = all_tuples(&u, 2);
            for mask in 0u64..16 {
                let x = Team::new(xs.clone(), rows.clone()).unwrap().submask(mask);
                for wmask in 0u32..4 {
                    let wrel = Relation::from_tuples(1, (0..2u8).filter(|i| wmask >> i & 1 == 1).map(|i| vec![i])).unwrap();
                    let mw = Overlay::over(&m).with("W", wrel.clone());
                    let lhs = team_eval(&mw, &reg, &x, &psi, &cfg).unwrap();
                    let vw: Vec<Var> = p.v.iter().chain(&p.w).cloned().collect();
                    let rhs = enumerate_lax_supplements(&x, &vw, &u).unwrap().any(|y| {
                        let enc = select_team(&y, &Classical::tuple_eq(&p.v, &p.w).unwrap(), &m)
                            .unwrap()
                            .project(&p.v)
                            .unwrap();
                        enc.is_subset(&wrel) && team_eval(&m, &reg, &y, &p.formula, &cfg).unwrap()
                    });
                    assert_eq!(lhs, rhs, "{text} on {x:?} W={wrel:?}");
                }
            }
        }
    }

    #[test]
    fn sentence_shape() {
        let chi = parse_classical("E y W(y)").unwrap();
        let (f, groups) = assemble_putback(&chi, &[(Dependency::constancy(1), vec!["W".into()])]).unwrap();
        let u = build_dep_union(&Dependency::constancy(1), &groups[0].v, &groups[0].w, &mut {
            let mut g = FreshGen::new();
            g.reserve_classical(&chi);
            g.reserve("_v");
            g.reserve("_w");
            g
        })
        .unwrap();
        let want = Formula::exists_all(
            &vars(&["y", "_v", "_w"]),
            Formula::and(u, parse_formula("_v = _w & y = _w").unwrap()),
        );
        assert_eq!(f, want);
        assert!(free_vars(&f).is_empty());
    }

    #[test]
    fn zero_groups_is_identity() {
        let chi = parse_classical("A x E y (R(x,y) | x = y)").unwrap();
        let (f, g) = assemble_putback(&chi, &[]).unwrap();
        assert!(g.is_empty());
        assert_eq!(f, parse_formula("A x E y (R(x,y) | x = y)").unwrap());
    }

    #[test]
    fn assembly_rejects_bad_input() {
        let c = Dependency::constancy(1);
        let not_prenex = parse_classical("(E y W(y)) & E z P(z)").unwrap();
        assert!(assemble_putback(&not_prenex, &[(c.clone(), vec!["W".into()])]).is_err());
        let twice = parse_classical("E y (W(y) & W(y))").unwrap();
        assert!(assemble_putback(&twice, &[(c.clone(), vec!["W".into()])]).is_err());
        let neg = parse_classical("E y ~W(y)").unwrap();
        assert!(assemble_putback(&neg, &[(c, vec!["W".into()])]).is_err());
    }
}
