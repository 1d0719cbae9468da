use std::sync::Arc;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enumerate::{enumerate_models, enumerate_relations, enumerate_teams};
use super::semantics::grids;
use super::{
    corpus_vars, random_formulas, show, Artifact, Case, Engine, Outcome, SweepSpec, VerifyError,
};
use crate::deps::{Dependency, Registry};
use crate::eval::{select_team, tarski_sentence, Compiled};
use crate::model::{enumerate_lax_supplements, Elem, Overlay, Relation, Structure, Team, Var};
use crate::syntax::{
    classical_to_nnf, dep_atoms, free_vars, parse_classical, parse_formula, require_first_order,
    Classical, Formula, FreshGen,
};
use crate::transforms::{
    assemble_putback, build_dep_union, extract_atoms, identity_translation, put_back_qfree,
    safety_pipeline, split_occurrences,
};

fn leaves(texts: &[&str]) -> Vec<Formula> {
    texts
        .iter()
        .map(|t| parse_formula(t).expect("leaf parses"))
        .collect()
}

/// Members of `d` among all relations of its arity over `u`.
fn members(d: &Dependency, u: &[Elem]) -> Result<Vec<Relation>, VerifyError> {
    let mut out = Vec::new();
    for r in enumerate_relations(u, d.arity())? {
        if d.holds(u, &r)? {
            out.push(r);
        }
    }
    Ok(out)
}

fn universe(n: usize) -> Vec<Elem> {
    (0..n as Elem).collect()
}

/// `m` with extra relations, as a structure that can be serialized.
fn expanded(m: &Structure, extra: &[(&str, &Relation)]) -> Structure {
    let mut s = m.clone();
    for (sym, r) in extra {
        s.set_relation(sym, (*r).clone())
            .expect("relation within the domain");
    }
    s
}

/// Close `f` with a random quantifier for each free variable.
fn close(rng: &mut ChaCha8Rng, f: Formula) -> Formula {
    free_vars(&f).into_iter().rev().fold(f, |acc, v| {
        if rng.gen_bool(0.5) {
            Formula::exists(v, acc)
        } else {
            Formula::forall(v, acc)
        }
    })
}

/// Replacing each constancy or functional dependence atom by a fresh
/// relation symbol: the formula holds iff some choice of member relations
/// makes the extracted formula hold.
pub(super) fn extraction(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let models = Arc::new(enumerate_models(max, &[("P", 1)])?);
    let grids = grids(&corpus_vars(), max, spec.rows(3))?;
    let reg = Arc::new(Registry::standard());
    let targets = Arc::new(vec![Dependency::constancy(1), Dependency::fdep(1, 1)]);
    let pool = leaves(&[
        "P(x)",
        "!P(y)",
        "x = y",
        "x != y",
        "#const(x)",
        "#const(y)",
        "#dep(x;y)",
    ]);
    let corpus: Vec<Formula> = random_formulas(spec.seed, 400, 3, &pool, &corpus_vars())
        .into_iter()
        .filter(|f| (1..=2).contains(&dep_atoms(f).len()))
        .take(40)
        .collect();
    let mut cases = Vec::new();
    for (i, f) in corpus.into_iter().enumerate() {
        let (models, grids, reg, targets) =
            (models.clone(), grids.clone(), reg.clone(), targets.clone());
        cases.push(Case::new(format!("extraction/{i}"), move || {
            let cfg = Engine::Fast;
            let ex = extract_atoms(&f, &targets, &reg)?;
            let lhs_c = Compiled::new(&f, &reg, cfg.config())?;
            let rhs_c = Compiled::new(&ex.formula, &reg, cfg.config())?;
            for n in 1..=max {
                let u = universe(n);
                let choices = ex
                    .bindings
                    .iter()
                    .map(|b| members(&b.dep, &u))
                    .collect::<Result<Vec<_>, _>>()?;
                for m in models.iter().filter(|m| m.size() == n) {
                    for (_, x) in &grids[n].teams {
                        let lhs = lhs_c.eval(m, x);
                        let mut rhs = false;
                        for pick in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
                            let rels: Vec<Relation> = pick.into_iter().cloned().collect();
                            if rhs_c.eval(&ex.expand(m, &rels), x)? {
                                rhs = true;
                                break;
                            }
                        }
                        if lhs.as_ref().ok() != Some(&rhs) {
                            return Ok(Outcome::Fail(
                                Artifact::new(m, x, &f, cfg, rhs, &show(&lhs)).with_note(format!(
                                    "expected value: some member relations satisfy {}",
                                    ex.formula
                                )),
                            ));
                        }
                    }
                }
            }
            Ok(Outcome::Pass)
        }));
    }
    Ok(cases)
}

fn classical_sentence(rng: &mut ChaCha8Rng, pool: &[Formula]) -> Classical {
    let f = random_formulas(rng.gen(), 1, 3, pool, &corpus_vars()).remove(0);
    let f = close(rng, f);
    require_first_order(&f).expect("pool is first-order")
}

/// `∃S ∈ D. χ(S)` iff `∃W_1..W_n` with `⋃W_i ∈ D` and `χ(W_1..W_n)`, for
/// `S` positive in `χ` and `D` downwards closed.
pub(super) fn singleocc(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let models = Arc::new(enumerate_models(max, &[("P", 1)])?);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let unary = leaves(&["S(x)", "S(y)", "P(x)", "!P(y)", "x = y", "x != y"]);
    let binary = leaves(&["S(x,y)", "S(y,x)", "S(x,x)", "P(x)", "!P(y)", "x != y"]);
    let mut cases = Vec::new();
    for (d, pool, most) in [
        (Dependency::constancy(1), &unary, 3),
        (Dependency::nt(), &unary, 3),
        (Dependency::fdep(1, 1), &binary, 2),
    ] {
        let mut sentences = Vec::new();
        while sentences.len() < 15 {
            let chi = classical_sentence(&mut rng, pool);
            let count = crate::syntax::count_classical(&chi, "S");
            if (1..=most).contains(&count) && !sentences.contains(&chi) {
                sentences.push(chi);
            }
        }
        for (i, chi) in sentences.into_iter().enumerate() {
            let (models, d) = (models.clone(), d.clone());
            cases.push(Case::new(
                format!("singleocc/{}/{i}", d.name()),
                move || {
                    let mut fresh = FreshGen::new();
                    let (split, ws) = split_occurrences(&chi, "S", &mut fresh)?;
                    for n in 1..=max {
                        let u = universe(n);
                        let rels = enumerate_relations(&u, d.arity())?;
                        for m in models.iter().filter(|m| m.size() == n) {
                            let mut lhs = false;
                            for s in &rels {
                                if d.holds(&u, s)?
                                    && tarski_sentence(
                                        &Overlay::over(m).with("S", s.clone()),
                                        &chi,
                                    )?
                                {
                                    lhs = true;
                                    break;
                                }
                            }
                            let mut rhs = false;
                            for pick in ws.iter().map(|_| rels.iter()).multi_cartesian_product() {
                                let union = pick
                                    .iter()
                                    .fold(Relation::empty(d.arity()), |a, r| a.union(r));
                                if !d.holds(&u, &union)? {
                                    continue;
                                }
                                let mut o = Overlay::over(m);
                                for (w, r) in ws.iter().zip(&pick) {
                                    o.set(w, (*r).clone());
                                }
                                if tarski_sentence(&o, &split)? {
                                    rhs = true;
                                    break;
                                }
                            }
                            if lhs != rhs {
                                return Ok(Outcome::Fail(
                                    Artifact::new(
                                        m,
                                        &Team::unit(),
                                        &classical_to_nnf(&split),
                                        Engine::Fast,
                                        lhs,
                                        &rhs.to_string(),
                                    )
                                    .with_note(format!(
                                        "existential over W relations for {}; original {chi}",
                                        d.name()
                                    )),
                                ));
                            }
                        }
                    }
                    Ok(Outcome::Pass)
                },
            ));
        }
    }
    Ok(cases)
}

/// Whether `x` is the least of its images under permutations of the
/// domain. Without relation symbols verdicts are invariant under those.
fn canonical_up_to_permutation(x: &Team, u: &[Elem]) -> bool {
    let rows = x.rows();
    u.iter().copied().permutations(u.len()).all(|p| {
        let mut image: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|&e| p[e as usize]).collect())
            .collect();
        image.sort();
        rows <= image.as_slice()
    })
}

/// `D_∪` against the union of the encoded relations. The encoding
/// needs two elements, so one-element domains are reported not applicable.
pub(super) fn dep_union(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(3);
    let max_rows = spec.rows(3);
    let reg = Arc::new(Registry::standard());
    let deps: Vec<Dependency> = if spec.deps.is_empty() {
        vec![Dependency::constancy(1), Dependency::nt()]
    } else {
        spec.deps
            .iter()
            .map(|d| Dependency::builtin(d))
            .collect::<Result<_, _>>()?
    };
    let mut cases = Vec::new();
    for d in deps {
        for count in 0..=2usize {
            for n in 1..=max {
                let (reg, d) = (reg.clone(), d.clone());
                cases.push(Case::new(format!("dep-union/{}/n{count}/m{n}", d.name()), move || {
                    let k = d.arity();
                    let vs: Vec<Vec<Var>> = (1..=count).map(|i| block(&format!("v{i}_"), k)).collect();
                    let ws: Vec<Vec<Var>> = (1..=count).map(|i| block(&format!("w{i}_"), k)).collect();
                    let cols: Vec<Var> = vs.iter().zip(&ws).flat_map(|(v, w)| v.iter().chain(w)).cloned().collect();
                    let f = build_dep_union(&d, &vs, &ws, &mut FreshGen::new())?;
                    let cfg = Engine::Fast;
                    let compiled = Compiled::new(&f, &reg, cfg.config())?;
                    let u = universe(n);
                    let m = Overlay::bare(&u);
                    let mut disagreement = None;
                    for x in enumerate_teams(&u, &cols, max_rows)? {
                        if !canonical_up_to_permutation(&x, &u) {
                            continue;
                        }
                        let mut union = Relation::empty(k);
                        for (v, w) in vs.iter().zip(&ws) {
                            let sel = select_team(&x, &Classical::tuple_eq(v, w).expect("positive arity"), &m)?;
                            union = union.union(&sel.project(v)?);
                        }
                        let want = d.holds(&u, &union)?;
                        let got = compiled.eval(&m, &x);
                        if got.as_ref().ok() != Some(&want) {
                            disagreement = Some((x, want, show(&got)));
                            break;
                        }
                    }
                    if n < 2 {
                        return Ok(Outcome::NotApplicable(match disagreement {
                            None => "needs two elements; agrees here".into(),
                            Some((x, want, _)) => format!("needs two elements; differs on {:?} (expected {want})", x.rows()),
                        }));
                    }
                    Ok(match disagreement {
                        None => Outcome::Pass,
                        Some((x, want, got)) => Outcome::Fail(
                            Artifact::new(&Structure::canonical(n)?, &x, &f, cfg, want, &got)
                                .with_note("expected value: the union of the encoded relations is a member"),
                        ),
                    })
                }));
            }
        }
    }
    Ok(cases)
}

fn block(base: &str, k: usize) -> Vec<Var> {
    (1..=k).map(|i| Var::new(&format!("{base}{i}"))).collect()
}

fn random_qfree(
    rng: &mut ChaCha8Rng,
    depth: usize,
    pool: &[Formula],
    selectors: &[Classical],
    w: bool,
) -> Formula {
    if depth == 0 || (!w && rng.gen_bool(0.3)) {
        if w {
            let t = corpus_vars().choose(rng).expect("variables").clone();
            return Formula::rel("W", vec![t]);
        }
        return pool.choose(rng).expect("pool").clone();
    }
    let left_w = w && rng.gen_bool(0.5);
    let d = depth - 1;
    match rng.gen_range(0..3) {
        0 => Formula::and(
            random_qfree(rng, d, pool, selectors, left_w),
            random_qfree(rng, d, pool, selectors, w && !left_w),
        ),
        1 => Formula::or(
            random_qfree(rng, d, pool, selectors, left_w),
            random_qfree(rng, d, pool, selectors, w && !left_w),
        ),
        _ => Formula::sel_imp(
            selectors.choose(rng).expect("selectors").clone(),
            random_qfree(rng, d, pool, selectors, w),
        ),
    }
}

/// The quantifier-free put-back: `ψ(W)` holds on `X` iff some
/// supplementation of `X` by `v w` satisfies `ψ'` and encodes a relation
/// inside `W`.
pub(super) fn qfree_putback(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let models = Arc::new(enumerate_models(max, &[("P", 1)])?);
    let grids = grids(&corpus_vars(), max, spec.rows(2))?;
    let reg = Arc::new(Registry::standard());
    let pool = leaves(&["P(x)", "!P(y)", "x = y", "x != y", "#const(x)", "#dep(x;y)"]);
    let selectors: Vec<Classical> = ["P(x)", "x = y", "~P(y)"]
        .iter()
        .map(|t| parse_classical(t).expect("selector parses"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut corpus = Vec::new();
    while corpus.len() < 30 {
        let depth = rng.gen_range(0..=3);
        let f = random_qfree(&mut rng, depth, &pool, &selectors, true);
        if !corpus.contains(&f) {
            corpus.push(f);
        }
    }
    let mut cases = Vec::new();
    for (i, psi) in corpus.into_iter().enumerate() {
        for n in 1..=max {
            let (models, grids, reg, psi) =
                (models.clone(), grids.clone(), reg.clone(), psi.clone());
            cases.push(Case::new(format!("qfree-putback/{i}/m{n}"), move || {
            let cfg = Engine::Fast;
            let p = put_back_qfree(&psi, "W", 1, &mut FreshGen::new())?;
            let lhs_c = Compiled::new(&psi, &reg, cfg.config())?;
            let rhs_c = Compiled::new(&p.formula, &reg, cfg.config())?;
            let vw: Vec<Var> = p.v.iter().chain(&p.w).cloned().collect();
            let same = Classical::tuple_eq(&p.v, &p.w).expect("arity one");
            {
                let u = universe(n);
                let rels = enumerate_relations(&u, 1)?;
                for m in models.iter().filter(|m| m.size() == n) {
                    for (_, x) in &grids[n].teams {
                        for w in &rels {
                            let mw = Overlay::over(m).with("W", w.clone());
                            let lhs = lhs_c.eval(&mw, x);
                            let mut rhs = false;
                            for y in enumerate_lax_supplements(x, &vw, &u)? {
                                let enc = select_team(&y, &same, m)?.project(&p.v)?;
                                if enc.is_subset(w) && rhs_c.eval(m, &y)? {
                                    rhs = true;
                                    break;
                                }
                            }
                            if lhs.as_ref().ok() != Some(&rhs) {
                                if n < 2 {
                                    return Ok(Outcome::NotApplicable(format!(
                                        "padding rows need two distinct tuples; differs on {:?} with W = {:?}",
                                        x.rows(),
                                        w.tuples().collect::<Vec<_>>()
                                    )));
                                }
                                return Ok(Outcome::Fail(
                                    Artifact::new(&expanded(m, &[("W", w)]), x, &psi, cfg, rhs, &show(&lhs))
                                        .with_note(format!("expected value: some supplementation satisfies {}", p.formula)),
                                ));
                            }
                        }
                    }
                }
            }
            Ok(if n < 2 {
                Outcome::NotApplicable("padding rows need two distinct tuples; agrees here".into())
            } else {
                Outcome::Pass
            })
        }));
        }
    }
    Ok(cases)
}

/// A prenex sentence whose matrix mentions each of `ws` exactly once,
/// positively.
fn putback_sentence_gen(rng: &mut ChaCha8Rng, ws: &[String]) -> Classical {
    let pool = leaves(&["P(x)", "!P(y)", "x = y", "x != y"]);
    let xy = corpus_vars();
    let mut parts: Vec<Formula> = ws
        .iter()
        .map(|w| Formula::rel(w, vec![xy.choose(rng).expect("variables").clone()]))
        .collect();
    for _ in 0..rng.gen_range(1..=2) {
        parts.push(pool.choose(rng).expect("pool").clone());
    }
    parts.shuffle(rng);
    let matrix = parts
        .into_iter()
        .reduce(|a, b| {
            if rng.gen_bool(0.5) {
                Formula::and(a, b)
            } else {
                Formula::or(a, b)
            }
        })
        .expect("nonempty");
    let mut order = xy.clone();
    order.shuffle(rng);
    let f = order.into_iter().rev().fold(matrix, |acc, v| {
        if rng.gen_bool(0.5) {
            Formula::exists(v, acc)
        } else {
            Formula::forall(v, acc)
        }
    });
    require_first_order(&f).expect("first-order")
}

/// Sentence-level put-back: `∃W_i` with `⋃W_i ∈ D` and `χ(W..)` iff the
/// assembled sentence holds.
pub(super) fn putback_sentence(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let models = Arc::new(enumerate_models(max, &[("P", 1)])?);
    let reg = Arc::new(Registry::standard());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut cases = Vec::new();
    for d in [Dependency::constancy(1), Dependency::nt()] {
        for i in 0..24 {
            let q = 1 + i % 2;
            let ws: Vec<String> = (1..=q).map(|j| format!("W{j}")).collect();
            let chi = putback_sentence_gen(&mut rng, &ws);
            let (models, reg, d) = (models.clone(), reg.clone(), d.clone());
            cases.push(Case::new(
                format!("putback-sentence/{}/{i}", d.name()),
                move || {
                    let cfg = Engine::Fast;
                    let (sentence, _) = assemble_putback(&chi, &[(d.clone(), ws.clone())])?;
                    let compiled = Compiled::new(&sentence, &reg, cfg.config())?;
                    let mut out_of_hypothesis = None;
                    for n in 1..=max {
                        let u = universe(n);
                        let rels = enumerate_relations(&u, 1)?;
                        for m in models.iter().filter(|m| m.size() == n) {
                            let mut lhs = false;
                            for pick in ws.iter().map(|_| rels.iter()).multi_cartesian_product() {
                                let union = pick.iter().fold(Relation::empty(1), |a, r| a.union(r));
                                if !d.holds(&u, &union)? {
                                    continue;
                                }
                                let mut o = Overlay::over(m);
                                for (w, r) in ws.iter().zip(&pick) {
                                    o.set(w, (*r).clone());
                                }
                                if tarski_sentence(&o, &chi)? {
                                    lhs = true;
                                    break;
                                }
                            }
                            let rhs = compiled.eval(m, &Team::unit());
                            if rhs.as_ref().ok() != Some(&lhs) {
                                if n < 2 {
                                    out_of_hypothesis =
                                        Some(format!("differs at |M|=1 ({})", show(&rhs)));
                                    continue;
                                }
                                return Ok(Outcome::Fail(
                                    Artifact::new(
                                        m,
                                        &Team::unit(),
                                        &sentence,
                                        cfg,
                                        lhs,
                                        &show(&rhs),
                                    )
                                    .with_note(format!(
                                        "expected value: witnesses exist for {chi}"
                                    )),
                                ));
                            }
                        }
                    }
                    Ok(match out_of_hypothesis {
                        Some(r) => Outcome::NotApplicable(format!(
                            "the union encoding needs two elements; {r}"
                        )),
                        None => Outcome::Pass,
                    })
                },
            ));
        }
    }
    Ok(cases)
}

/// End to end: the rewritten sentence agrees with the input on every
/// model.
pub(super) fn pipeline(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let models = Arc::new(enumerate_models(max, &[("P", 1)])?);
    let reg = Arc::new(Registry::standard());
    let pool = leaves(&["P(x)", "!P(y)", "x = y", "x != y", "#const(x)", "#const(y)"]);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut sentences = Vec::new();
    while sentences.len() < 24 {
        let f = random_formulas(rng.gen(), 1, 3, &pool, &corpus_vars()).remove(0);
        let f = close(&mut rng, f);
        if !dep_atoms(&f).is_empty() && !sentences.contains(&f) {
            sentences.push(f);
        }
    }
    let mut cases = Vec::new();
    for (i, phi) in sentences.into_iter().enumerate() {
        for n in 1..=max {
            let (models, reg, phi) = (models.clone(), reg.clone(), phi.clone());
            cases.push(Case::new(format!("pipeline/{i}/m{n}"), move || {
                let cfg = Engine::Fast;
                let p = safety_pipeline(
                    &phi,
                    &[Dependency::constancy(1)],
                    &reg,
                    &identity_translation,
                )?;
                let before = Compiled::new(&phi, &reg, cfg.config())?;
                let after = Compiled::new(&p.sentence, &reg, cfg.config())?;
                let unions = p.groups.iter().any(|g| !g.symbols.is_empty());
                for m in models.iter().filter(|m| m.size() == n) {
                    let want = before.eval(m, &Team::unit())?;
                    let got = after.eval(m, &Team::unit());
                    if got.as_ref().ok() != Some(&want) {
                        if n < 2 && unions {
                            return Ok(Outcome::NotApplicable(
                                "the union encoding needs two elements; differs".into(),
                            ));
                        }
                        return Ok(Outcome::Fail(
                            Artifact::new(m, &Team::unit(), &p.sentence, cfg, want, &show(&got))
                                .with_note(format!("expected value: verdict of {phi}")),
                        ));
                    }
                }
                Ok(if n < 2 && unions {
                    Outcome::NotApplicable(
                        "the union encoding needs two elements; agrees here".into(),
                    )
                } else {
                    Outcome::Pass
                })
            }));
        }
    }
    Ok(cases)
}
