use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::corpus::{corpus_vars, dep_corpus, fo_corpus, fo_pool, AtomFamily, SIGNATURE};
use super::enumerate::enumerate_models;
use super::{exhaustive, fo_leaves, random_formulas, show, Artifact, Case, Engine, Outcome, SweepSpec, VerifyError};
use crate::deps::{check_closure, Dependency, Property, Registry};
use crate::eval::{select_team, tarski_eval, tarski_sentence, Compiled, EvalConfig};
use crate::model::{all_tuples, vars, Assignment, Elem, Overlay, Relation, Structure, Team, Var};
use crate::syntax::{
    check_positive, free_vars, parse_classical, parse_formula, require_first_order, Classical, Formula,
};
use crate::transforms::desugar;

/// The teams over a fixed variable list on one domain, as row masks over
/// the full team.
pub(super) struct Grid {
    pub full: Team,
    pub teams: Vec<(u64, Team)>,
}

impl Grid {
    pub fn new(vs: &[Var], universe: &[Elem], max_rows: usize) -> Result<Grid, VerifyError> {
        let full = Team::full(vs.to_vec(), universe)?;
        if full.len() > 20 {
            return Err(VerifyError::Guard {
                what: "team rows",
                count: full.len() as u128,
            });
        }
        let teams = (0u64..1 << full.len())
            .filter(|m| m.count_ones() as usize <= max_rows)
            .map(|m| (m, full.submask(m)))
            .collect();
        Ok(Grid { full, teams })
    }
}

/// Grids for every domain size `1..=max`, indexed by size.
pub(super) fn grids(vs: &[Var], max: usize, max_rows: usize) -> Result<Arc<Vec<Grid>>, VerifyError> {
    let mut out = Vec::new();
    for n in 0..=max {
        let u: Vec<Elem> = (0..n as Elem).collect();
        out.push(if n == 0 {
            Grid {
                full: Team::empty(vs.to_vec())?,
                teams: vec![],
            }
        } else {
            Grid::new(vs, &u, max_rows)?
        });
    }
    Ok(Arc::new(out))
}

fn models(spec: &SweepSpec, default: usize) -> Result<Arc<Vec<Structure>>, VerifyError> {
    Ok(Arc::new(enumerate_models(spec.domain(default), &SIGNATURE)?))
}

/// Per-row Tarskian truth over the full team of a grid.
fn row_truth(m: &Structure, full: &Team, c: &Classical) -> Result<Vec<bool>, VerifyError> {
    full.assignments()
        .map(|s: Assignment| tarski_eval(m, &s, c).map_err(VerifyError::from))
        .collect()
}

fn closures(f: &Formula, c: &Classical) -> Vec<(Formula, Classical)> {
    let free: Vec<Var> = free_vars(f).into_iter().collect();
    let mut out = Vec::new();
    let (mut fa, mut ca) = (f.clone(), c.clone());
    let (mut fe, mut ce) = (f.clone(), c.clone());
    for v in free.iter().rev() {
        fa = Formula::forall(v.clone(), fa);
        ca = Classical::forall(v.clone(), ca);
        fe = Formula::exists(v.clone(), fe);
        ce = Classical::exists(v.clone(), ce);
    }
    out.push((fa, ca));
    if !free.is_empty() {
        out.push((fe, ce));
    }
    out
}

/// First-order formulas evaluated through the team rules agree with the
/// row-by-row Tarskian fold, and their closures agree as sentences.
pub(super) fn flatness(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let models = models(spec, 2)?;
    let grids = grids(&corpus_vars(), spec.domain(2), spec.rows(4))?;
    let reg = Arc::new(Registry::standard());
    let mut cases = Vec::new();
    for (i, f) in fo_corpus(spec.seed, spec.random).into_iter().enumerate() {
        let (models, grids, reg) = (models.clone(), grids.clone(), reg.clone());
        cases.push(Case::new(format!("flatness/{i}"), move || {
            let cfg = Engine::Structural;
            let compiled = Compiled::new(&f, &reg, cfg.config())?;
            let c = require_first_order(&f)?;
            for m in models.iter() {
                let g = &grids[m.size()];
                let truth = row_truth(m, &g.full, &c)?;
                for (mask, x) in &g.teams {
                    let want = (0..truth.len()).all(|r| mask >> r & 1 == 0 || truth[r]);
                    let got = compiled.eval(m, x);
                    if got.as_ref().ok() != Some(&want) {
                        return Ok(Outcome::Fail(Artifact::new(m, x, &f, cfg, want, &show(&got))));
                    }
                }
            }
            for (fs, cs) in closures(&f, &c) {
                let compiled = Compiled::new(&fs, &reg, cfg.config())?;
                for m in models.iter() {
                    let want = tarski_sentence(m, &cs)?;
                    let got = compiled.eval(m, &Team::unit());
                    if got.as_ref().ok() != Some(&want) {
                        return Ok(Outcome::Fail(
                            Artifact::new(m, &Team::unit(), &fs, cfg, want, &show(&got)).with_note("sentence"),
                        ));
                    }
                }
            }
            Ok(Outcome::Pass)
        }));
    }
    Ok(cases)
}

/// Pad a team with a dummy variable `_d` in three ways: every value, a
/// single value, and a value depending on the row.
fn paddings(x: &Team, d: &Var, universe: &[Elem]) -> Result<Vec<Team>, VerifyError> {
    let vs = std::slice::from_ref(d);
    let n = universe.len();
    let h: Vec<Vec<Vec<Elem>>> = (0..x.len()).map(|i| vec![vec![universe[i % n]]]).collect();
    Ok(vec![
        x.duplicate(vs, universe)?,
        x.supplement_const(&[universe[n - 1]], vs)?,
        x.supplement(&h, vs)?,
    ])
}

/// Satisfaction by a team padded with an unused variable equals
/// satisfaction by its restriction to the free variables. Teams keep their
/// full width inside the evaluator so the restriction is not applied
/// implicitly.
pub(super) fn locality(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let models = models(spec, 2)?;
    let grids = grids(&corpus_vars(), spec.domain(2), spec.rows(4))?;
    let reg = Arc::new(Registry::standard());
    let mut corpus = fo_corpus(spec.seed, spec.random);
    corpus.extend(dep_corpus(AtomFamily::Etp, spec.seed, spec.random / 4));
    let mut cases = Vec::new();
    for (i, f) in corpus.into_iter().enumerate() {
        let (models, grids, reg) = (models.clone(), grids.clone(), reg.clone());
        cases.push(Case::new(format!("locality/{i}"), move || {
            let cfg = Engine::Wide;
            let compiled = Compiled::new(&f, &reg, cfg.config())?;
            let free: Vec<Var> = free_vars(&f).into_iter().collect();
            let d = Var::new("_d");
            for m in models.iter() {
                for (_, x) in &grids[m.size()].teams {
                    for padded in paddings(x, &d, crate::model::Interpretation::universe(m))? {
                        let local = padded.restrict(&free)?;
                        let want = compiled.eval(m, &local)?;
                        let got = compiled.eval(m, &padded);
                        if got.as_ref().ok() != Some(&want) {
                            return Ok(Outcome::Fail(
                                Artifact::new(m, &padded, &f, cfg, want, &show(&got))
                                    .with_note("expected value is the verdict on the restriction to the free variables"),
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

/// Verdicts of `compiled` on every team of a grid, by mask.
fn verdict_table(compiled: &Compiled, m: &dyn crate::model::Interpretation, g: &Grid) -> Result<Vec<Option<bool>>, VerifyError> {
    let mut out = vec![None; 1 << g.full.len()];
    for (mask, x) in &g.teams {
        out[*mask as usize] = Some(compiled.eval(m, x)?);
    }
    Ok(out)
}

/// Downwards closed atoms give downwards closed formulas; union closed
/// atoms give union closed formulas. Also confirms the atom properties
/// the families rely on.
pub(super) fn closure_transfer(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let models = models(spec, 2)?;
    let grids = grids(&corpus_vars(), spec.domain(2), spec.rows(4))?;
    let reg = Arc::new(Registry::standard());
    let mut cases = Vec::new();
    for (d, p) in [
        (Dependency::constancy(1), Property::Downwards),
        (Dependency::fdep(1, 1), Property::Downwards),
        (Dependency::incl(1), Property::Union),
    ] {
        let bound = spec.domain(3);
        cases.push(Case::new(format!("closure-transfer/atom/{}", d.name()), move || {
            let v = check_closure(&d, p, bound)?;
            Ok(if v.holds {
                Outcome::Pass
            } else {
                Outcome::NotApplicable(format!("{} is not {} closed: {:?}", d.name(), p.name(), v.witness))
            })
        }));
    }
    for (family, label, prop) in [
        (AtomFamily::Downwards, "down", Property::Downwards),
        (AtomFamily::Union, "union", Property::Union),
    ] {
        for (i, f) in dep_corpus(family, spec.seed, spec.random).into_iter().enumerate() {
            let (models, grids, reg) = (models.clone(), grids.clone(), reg.clone());
            cases.push(Case::new(format!("closure-transfer/{label}/{i}"), move || {
                let cfg = Engine::Plain;
                let compiled = Compiled::new(&f, &reg, cfg.config())?;
                for m in models.iter() {
                    let g = &grids[m.size()];
                    let table = verdict_table(&compiled, m, g)?;
                    let at = |mask: u64| table[mask as usize];
                    for (a, _) in &g.teams {
                        if at(*a) != Some(true) {
                            continue;
                        }
                        let partner = match prop {
                            Property::Downwards => (0..g.full.len())
                                .filter(|b| a >> b & 1 == 1)
                                .map(|b| a & !(1 << b))
                                .find(|&sub| at(sub) == Some(false)),
                            _ => g
                                .teams
                                .iter()
                                .filter(|(b, _)| at(*b) == Some(true))
                                .map(|(b, _)| a | b)
                                .find(|&u| at(u) == Some(false)),
                        };
                        if let Some(q) = partner {
                            let y = g.full.submask(q);
                            return Ok(Outcome::Fail(
                                Artifact::new(m, &y, &f, cfg, true, "false")
                                    .with_note(format!("holds on the team with row mask {a:#b}")),
                            ));
                        }
                    }
                }
                Ok(Outcome::Pass)
            }));
        }
    }
    Ok(cases)
}

fn theta_pool() -> Vec<Classical> {
    ["P(x)", "x = y", "R(x,y)", "~P(y)", "E z R(x,z)", "A z (R(z,y) -> P(z))"]
        .iter()
        .map(|t| parse_classical(t).expect("selector parses"))
        .collect()
}

/// `θ ~> φ` natively and desugared, against `φ` on the selected subteam.
pub(super) fn sugar_selimp(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let models = models(spec, 2)?;
    let grids = grids(&corpus_vars(), spec.domain(2), spec.rows(4))?;
    let reg = Arc::new(Registry::standard());
    let phis = dep_corpus(AtomFamily::Etp, spec.seed, spec.random / 4);
    let mut cases = Vec::new();
    for (t, theta) in theta_pool().into_iter().enumerate() {
        for (i, phi) in phis.iter().enumerate() {
            let (models, grids, reg, theta, phi) = (models.clone(), grids.clone(), reg.clone(), theta.clone(), phi.clone());
            cases.push(Case::new(format!("sugar-selimp/{t}/{i}"), move || {
                let cfg = Engine::Fast;
                let native = Formula::sel_imp(theta.clone(), phi.clone());
                let sugared = desugar(&native);
                let on_sel = Compiled::new(&phi, &reg, cfg.config())?;
                let both = [
                    (Compiled::new(&native, &reg, cfg.config())?, native),
                    (Compiled::new(&sugared, &reg, cfg.config())?, sugared),
                ];
                for m in models.iter() {
                    for (_, x) in &grids[m.size()].teams {
                        let want = on_sel.eval(m, &select_team(x, &theta, m)?)?;
                        for (c, f) in &both {
                            let got = c.eval(m, x);
                            if got.as_ref().ok() != Some(&want) {
                                return Ok(Outcome::Fail(
                                    Artifact::new(m, x, f, cfg, want, &show(&got))
                                        .with_note("expected value is the verdict on the selected subteam"),
                                ));
                            }
                        }
                    }
                }
                Ok(Outcome::Pass)
            }));
        }
    }
    Ok(cases)
}

/// `φ ⊔ ψ` natively and desugared, against the disjunction of the two
/// verdicts, for atoms with the empty team property. The constancy
/// encoding needs two distinct values, so one-element domains check the
/// native connective only and are reported as not applicable. A last case
/// shows the encoding failing for an atom without the empty team property.
pub(super) fn sugar_booldisj(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let models = models(spec, 2)?;
    let grids = grids(&corpus_vars(), max, spec.rows(4))?;
    let reg = Arc::new(Registry::standard());
    let pool = dep_corpus(AtomFamily::Etp, spec.seed, spec.random / 4);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rng_pairs: Vec<(usize, usize)> = (0..spec.random)
        .map(|_| (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len())))
        .collect();
    let mut cases = Vec::new();
    for (i, (a, b)) in rng_pairs.into_iter().enumerate() {
        for n in 1..=max {
            let (models, grids, reg) = (models.clone(), grids.clone(), reg.clone());
            let (phi, psi) = (pool[a].clone(), pool[b].clone());
            cases.push(Case::new(format!("sugar-booldisj/{i}/m{n}"), move || {
                let cfg = Engine::Fast;
                let native = Formula::bool_disj(phi.clone(), psi.clone());
                let sugared = desugar(&native);
                let parts = [
                    Compiled::new(&phi, &reg, cfg.config())?,
                    Compiled::new(&psi, &reg, cfg.config())?,
                ];
                let mut checks = vec![(Compiled::new(&native, &reg, cfg.config())?, native)];
                if n >= 2 {
                    checks.push((Compiled::new(&sugared, &reg, cfg.config())?, sugared));
                }
                for m in models.iter().filter(|m| m.size() == n) {
                    for (_, x) in &grids[n].teams {
                        let want = parts[0].eval(m, x)? || parts[1].eval(m, x)?;
                        for (c, f) in &checks {
                            let got = c.eval(m, x);
                            if got.as_ref().ok() != Some(&want) {
                                return Ok(Outcome::Fail(
                                    Artifact::new(m, x, f, cfg, want, &show(&got))
                                        .with_note("expected value is the disjunction of the two verdicts"),
                                ));
                            }
                        }
                    }
                }
                Ok(if n >= 2 {
                    Outcome::Pass
                } else {
                    Outcome::NotApplicable("constancy encoding needs two elements; native connective agrees".into())
                })
            }));
        }
    }
    let reg = reg.clone();
    cases.push(Case::new("sugar-booldisj/etp-counterexample".into(), move || {
        // `#false()` fails on the empty team, so the encoding cannot hand
        // all rows to the left disjunct
        let native = Formula::bool_disj(parse_formula("x = x")?, parse_formula("#false()")?);
        let sugared = desugar(&native);
        let mut m = Structure::canonical(2)?;
        m.add_predicate("P", [])?;
        let x = Team::new(vars(&["x"]), vec![vec![0]])?;
        let cfg = Engine::Fast;
        let n = Compiled::new(&native, &reg, cfg.config())?.eval(&m, &x)?;
        let s = Compiled::new(&sugared, &reg, cfg.config())?.eval(&m, &x)?;
        Ok(if n && !s {
            Outcome::Pass
        } else {
            Outcome::Fail(
                Artifact::new(&m, &x, &sugared, cfg, false, &s.to_string())
                    .with_note(format!("native verdict {n}; the encoding was expected to disagree")),
            )
        })
    }));
    Ok(cases)
}

/// If `R` occurs only positively, enlarging `R` preserves satisfaction.
pub(super) fn positive_upwards(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let grids = grids(&corpus_vars(), max, spec.rows(4))?;
    let reg = Arc::new(Registry::standard());
    let vs = corpus_vars();
    let mut pool = fo_pool();
    pool.extend(AtomFamily::Etp.atoms());
    let mut corpus = exhaustive(&pool, 1, &vs);
    let mut leaves = fo_leaves();
    leaves.extend(AtomFamily::Etp.atoms());
    corpus.extend(random_formulas(spec.seed, spec.random, 3, &leaves, &vs));
    corpus.retain(|f| check_positive(f, "R"));
    let mut cases = Vec::new();
    for (i, f) in corpus.into_iter().enumerate() {
        let (grids, reg) = (grids.clone(), reg.clone());
        cases.push(Case::new(format!("positive-upwards/{i}"), move || {
            let cfg = Engine::Plain;
            let compiled = Compiled::new(&f, &reg, cfg.config())?;
            for n in 1..=max {
                let u: Vec<Elem> = (0..n as Elem).collect();
                let pairs = all_tuples(&u, 2);
                for pmask in 0u32..1 << n {
                    let p = Relation::unary(u.iter().copied().filter(|e| pmask >> e & 1 == 1));
                    let rel = |mask: u32| {
                        Relation::from_tuples(2, pairs.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, t)| t.clone()))
                            .expect("binary tuples")
                    };
                    let tables = (0u32..1 << pairs.len())
                        .map(|r| {
                            let m = Overlay::bare(&u).with("P", p.clone()).with("R", rel(r));
                            verdict_table(&compiled, &m, &grids[n])
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    for (r, table) in tables.iter().enumerate() {
                        for (mask, x) in &grids[n].teams {
                            if table[*mask as usize] != Some(true) {
                                continue;
                            }
                            for t in 0..pairs.len() {
                                let bigger = r | 1 << t;
                                if tables[bigger][*mask as usize] == Some(false) {
                                    let mut s = Structure::canonical(n)?;
                                    s.add_relation("P", p.clone())?;
                                    s.add_relation("R", rel(bigger as u32))?;
                                    return Ok(Outcome::Fail(
                                        Artifact::new(&s, x, &f, cfg, true, "false")
                                            .with_note(format!("holds with R = {:?}", rel(r as u32))),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            Ok(Outcome::Pass)
        }));
    }
    Ok(cases)
}

/// No first-order formula agrees with `#const(x)` on the teams
/// `{s0}`, `{s1}`, `{s0, s1}` with `s0 = (0, 0)`, `s1 = (1, 0)` over
/// `(x, y)`: a formula true on both singletons is true on their union.
pub(super) fn const_not_flat(_spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let models: Arc<Vec<Structure>> =
        Arc::new(enumerate_models(2, &SIGNATURE)?.into_iter().filter(|m| m.size() == 2).collect());
    let reg = Arc::new(Registry::standard());
    let xy = corpus_vars();
    let teams = Arc::new(vec![
        Team::new(xy.clone(), vec![vec![0, 0]])?,
        Team::new(xy.clone(), vec![vec![1, 0]])?,
        Team::new(xy.clone(), vec![vec![0, 0], vec![1, 0]])?,
    ]);
    let constancy = Arc::new(Compiled::new(&parse_formula("#const(x)")?, &reg, EvalConfig::fast())?);
    let corpus = exhaustive(&fo_pool(), 2, &xy);
    let mut cases = Vec::new();
    for (i, f) in corpus.into_iter().enumerate() {
        let (models, reg, teams, constancy) = (models.clone(), reg.clone(), teams.clone(), constancy.clone());
        cases.push(Case::new(format!("const-not-flat/{i}"), move || {
            let cfg = Engine::Fast;
            let compiled = Compiled::new(&f, &reg, cfg.config())?;
            for m in models.iter() {
                let mut differs = false;
                for x in teams.iter() {
                    if compiled.eval(m, x)? != constancy.eval(m, x)? {
                        differs = true;
                        break;
                    }
                }
                if !differs {
                    let pair = &teams[2];
                    let got = compiled.eval(m, pair)?;
                    return Ok(Outcome::Fail(
                        Artifact::new(m, pair, &f, cfg, constancy.eval(m, pair)?, &got.to_string())
                            .with_note("agrees with #const(x) on all three teams"),
                    ));
                }
            }
            Ok(Outcome::Pass)
        }));
    }
    Ok(cases)
}
