use std::sync::Arc;

use super::enumerate::{enumerate_relations, enumerate_teams};
use super::{show, Artifact, Case, Engine, Outcome, SweepSpec, VerifyError};
use crate::deps::{check_closed_world, clamp_bound, compute_dmax, dmax_dependency, Dependency, Registry};
use crate::eval::Compiled;
use crate::model::{vars, Elem, Overlay, Relation, Structure, Team, Var};
use crate::syntax::{parse_classical, parse_formula, Formula};
use crate::transforms::{
    build_eq1, build_nt_relativized, build_phi_r, build_theta_t, relativize_closed_world, Eq1Branch, TransformError,
};

fn universe(n: usize) -> Vec<Elem> {
    (0..n as Elem).collect()
}

fn with_relation(n: usize, sym: &str, r: &Relation) -> Result<Structure, VerifyError> {
    let mut s = Structure::canonical(n)?;
    s.add_relation(sym, r.clone())?;
    Ok(s)
}

fn default_deps() -> Vec<Dependency> {
    vec![Dependency::constancy(1), Dependency::nt(), Dependency::fdep(1, 1), Dependency::incl(1)]
}

fn deps_of(spec: &SweepSpec, default: Vec<Dependency>) -> Result<Vec<Dependency>, VerifyError> {
    if spec.deps.is_empty() {
        return Ok(default);
    }
    Ok(spec.deps.iter().map(|d| Dependency::builtin(d)).collect::<Result<_, _>>()?)
}

/// Members of `d` with no proper superset in `d`, by direct search.
fn maximal_members(d: &Dependency, u: &[Elem]) -> Result<Vec<Relation>, VerifyError> {
    let all = enumerate_relations(u, d.arity())?;
    let mut members = Vec::new();
    for r in all {
        if d.holds(u, &r)? {
            members.push(r);
        }
    }
    Ok(members
        .iter()
        .filter(|r| !members.iter().any(|s| s != *r && r.is_subset(s)))
        .cloned()
        .collect())
}

fn sorted(mut rs: Vec<Relation>) -> Vec<Vec<Vec<Elem>>> {
    let mut out: Vec<Vec<Vec<Elem>>> = rs.drain(..).map(|r| r.tuples().cloned().collect()).collect();
    out.sort();
    out
}

/// The sentence saying some proper superset of `R` is a member.
pub(super) fn phi_r(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let reg = Arc::new(Registry::standard());
    let mut cases = vec![Case::new("phiR/dmax-const-3".into(), || {
        let got = sorted(compute_dmax(&Dependency::constancy(1), &[0, 1, 2])?);
        let want = vec![vec![vec![0]], vec![vec![1]], vec![vec![2]]];
        Ok(if got == want {
            Outcome::Pass
        } else {
            mismatch(3, format!("maximal constancy members {got:?}, expected the three singletons"))
        })
    })];
    for d in deps_of(spec, default_deps())? {
        for n in 1..=clamp_bound(d.arity(), max) {
            let (reg, d) = (reg.clone(), d.clone());
            cases.push(Case::new(format!("phiR/{}/m{n}", d.name()), move || {
                let f = build_phi_r(&d)?;
                let cfg = Engine::Fast;
                let compiled = Compiled::new(&f, &reg, cfg.config())?;
                let u = universe(n);
                let all = enumerate_relations(&u, d.arity())?;
                let mut members = Vec::new();
                for s in &all {
                    if d.holds(&u, s)? {
                        members.push(s);
                    }
                }
                for r in &all {
                    let want = members.iter().any(|s| *s != r && r.is_subset(s));
                    let got = compiled.eval(&Overlay::bare(&u).with("R", r.clone()), &Team::unit());
                    if got.as_ref().ok() != Some(&want) {
                        return Ok(Outcome::Fail(
                            Artifact::new(&with_relation(n, "R", r)?, &Team::unit(), &f, cfg, want, &show(&got))
                                .with_note(format!("expected value: a proper superset of R is in {}", d.name())),
                        ));
                    }
                }
                Ok(Outcome::Pass)
            }));
        }
    }
    Ok(cases)
}

/// The sentence saying `T` is contained in a maximal member, and the
/// maximal members themselves.
pub(super) fn theta_t(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let mut cases = Vec::new();
    for d in deps_of(spec, default_deps())? {
        let dmax = dmax_dependency(&d, "dmax");
        let reg = Arc::new(Registry::standard().with(dmax.clone())?);
        for n in 1..=clamp_bound(d.arity(), max) {
            let (reg, d, dmax) = (reg.clone(), d.clone(), dmax.clone());
            cases.push(Case::new(format!("thetaT/{}/m{n}", d.name()), move || {
                let f = build_theta_t(&dmax)?;
                let cfg = Engine::Fast;
                let compiled = Compiled::new(&f, &reg, cfg.config())?;
                let u = universe(n);
                let maximal = maximal_members(&d, &u)?;
                for t in enumerate_relations(&u, d.arity())? {
                    let want = maximal.iter().any(|k| t.is_subset(k));
                    let got = compiled.eval(&Overlay::bare(&u).with("T", t.clone()), &Team::unit());
                    if got.as_ref().ok() != Some(&want) {
                        return Ok(Outcome::Fail(
                            Artifact::new(&with_relation(n, "T", &t)?, &Team::unit(), &f, cfg, want, &show(&got))
                                .with_note(format!(
                                    "expected value: T lies inside a maximal member of {}; replay needs dmax registered",
                                    d.name()
                                )),
                        ));
                    }
                }
                Ok(Outcome::Pass)
            }));
        }
        // every member extends to a maximal one, on every domain the guard allows
        for n in 1..=clamp_bound(d.arity(), 3) {
            let d = d.clone();
            cases.push(Case::new(format!("thetaT/extends/{}/m{n}", d.name()), move || {
                let u = universe(n);
                let computed = compute_dmax(&d, &u)?;
                let direct = maximal_members(&d, &u)?;
                if sorted(computed.clone()) != sorted(direct.clone()) {
                    return Ok(mismatch(n, format!("maximal members {:?}, direct search {:?}", sorted(computed), sorted(direct))));
                }
                for r in enumerate_relations(&u, d.arity())? {
                    if d.holds(&u, &r)? && !computed.iter().any(|k| r.is_subset(k)) {
                        return Ok(mismatch(n, format!("member {:?} has no maximal extension", sorted(vec![r]))));
                    }
                }
                Ok(Outcome::Pass)
            }));
        }
    }
    Ok(cases)
}

fn mismatch(n: usize, note: String) -> Outcome {
    let m = Structure::canonical(n).expect("canonical domain");
    let f = Formula::Dep(crate::syntax::DepAtom::new("false", vec![vec![]]));
    Outcome::Fail(Artifact::new(&m, &Team::unit(), &f, Engine::Naive, true, "false").with_note(note))
}

struct Eq1Setup {
    name: &'static str,
    dep: Dependency,
    branches: Vec<Eq1Branch>,
}

fn eq1_setups() -> Result<Vec<Eq1Setup>, VerifyError> {
    let branch = |theta: &str, z: &[&str]| -> Result<Eq1Branch, VerifyError> {
        Ok(Eq1Branch {
            theta: parse_classical(theta)?,
            x: vars(&["x"]),
            z: vars(z),
        })
    };
    Ok(vec![
        Eq1Setup {
            name: "const",
            dep: Dependency::constancy(1),
            branches: vec![branch("x = z", &["z"])?],
        },
        Eq1Setup {
            name: "empty",
            dep: Dependency::fo("empty", parse_classical("A x ~R(x)")?, 1)?,
            branches: vec![branch("x != x", &[])?],
        },
        Eq1Setup {
            name: "at-most-one",
            dep: Dependency::fo("atmostone", parse_classical("A x A y (R(x) & R(y) -> x = y)")?, 1)?,
            branches: vec![branch("x = z", &["z"])?],
        },
    ])
}

/// The constancy-logic definition built from branches, against the
/// dependency it defines.
pub(super) fn eq1(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(3);
    let reg = Arc::new(Registry::standard());
    let mut cases = Vec::new();
    for setup in eq1_setups()? {
        let setup = Arc::new(setup);
        for n in 1..=max {
            for extra in [false, true] {
                let (reg, setup) = (reg.clone(), setup.clone());
                let cols = if extra { "vu" } else { "v" };
                cases.push(Case::new(format!("eq1/{}/m{n}/{cols}", setup.name), move || {
                    let v = vars(&["v"]);
                    let f = build_eq1(&setup.dep, &setup.branches, &v)?;
                    let cfg = Engine::Fast;
                    let compiled = Compiled::new(&f, &reg, cfg.config())?;
                    let reference = reference_atom(&setup.dep, &reg)?;
                    let u = universe(n);
                    let team_vars: Vec<Var> = if extra { vars(&["v", "u"]) } else { v.clone() };
                    for x in enumerate_teams(&u, &team_vars, usize::MAX)? {
                        let want = match &reference {
                            Some(c) => c.eval(&Overlay::bare(&u), &x)?,
                            None => setup.dep.holds(&u, &x.project(&v)?)?,
                        };
                        let got = compiled.eval(&Overlay::bare(&u), &x);
                        if got.as_ref().ok() != Some(&want) {
                            return Ok(Outcome::Fail(
                                Artifact::new(&Structure::canonical(n)?, &x, &f, cfg, want, &show(&got))
                                    .with_note(format!("expected value: {} on the values of v", setup.dep.name())),
                            ));
                        }
                    }
                    Ok(Outcome::Pass)
                }));
            }
        }
    }
    let reg = reg.clone();
    cases.push(Case::new("eq1/empty-teams".into(), move || {
        let v = vars(&["v"]);
        let f = build_eq1(&Dependency::constancy(1), &eq1_setups()?[0].branches, &v)?;
        let cfg = Engine::Fast;
        let compiled = Compiled::new(&f, &reg, cfg.config())?;
        let atom = Compiled::new(&parse_formula("#const(v)")?, &reg, Engine::Naive.config())?;
        for n in 1..=3 {
            for cols in [vars(&["v"]), vars(&["v", "u"])] {
                let x = Team::empty(cols)?;
                let m = Structure::canonical(n)?;
                let (want, got) = (atom.eval(&m, &x)?, compiled.eval(&m, &x));
                if !want || got.as_ref().ok() != Some(&true) {
                    return Ok(Outcome::Fail(
                        Artifact::new(&m, &x, &f, cfg, true, &show(&got))
                            .with_note(format!("both sides should hold on the empty team; the atom gives {want}")),
                    ));
                }
            }
        }
        Ok(Outcome::Pass)
    }));
    Ok(cases)
}

/// The reference evaluation for constancy goes through the atom itself.
fn reference_atom(d: &Dependency, reg: &Registry) -> Result<Option<Compiled>, VerifyError> {
    if d.name() != "const/1" {
        return Ok(None);
    }
    Ok(Some(Compiled::new(&parse_formula("#const(v)")?, reg, Engine::Naive.config())?))
}

/// Relativized non-totality against its membership test.
pub(super) fn nt_relativized(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(3);
    let rows = spec.rows(3);
    let reg = Arc::new(Registry::standard());
    let mut cases = Vec::new();
    for n in 1..=max {
        for pmask in 0u32..1 << n {
            let reg = reg.clone();
            cases.push(Case::new(format!("nt-relativized/m{n}/p{pmask}"), move || {
                let t = vars(&["t"]);
                let f = build_nt_relativized(&t[0], "P");
                let cfg = Engine::Fast;
                let compiled = Compiled::new(&f, &reg, cfg.config())?;
                let u = universe(n);
                let p: Vec<Elem> = u.iter().copied().filter(|e| pmask >> e & 1 == 1).collect();
                let pr = Relation::unary(p.clone());
                let m = Overlay::bare(&u).with("P", pr.clone());
                let mut differs = 0;
                for x in enumerate_teams(&u, &t, rows)? {
                    let want = Dependency::nt().relativized_holds(&p, &x, &t)?;
                    let got = compiled.eval(&m, &x);
                    if got.as_ref().ok() != Some(&want) {
                        if p.is_empty() {
                            differs += 1;
                            continue;
                        }
                        return Ok(Outcome::Fail(
                            Artifact::new(&with_relation(n, "P", &pr)?, &x, &f, cfg, want, &show(&got))
                                .with_note("expected value: nt holds of X(t) inside P"),
                        ));
                    }
                }
                Ok(if p.is_empty() {
                    Outcome::NotApplicable(format!("P is empty, so there is no relativized structure; {differs} teams differ"))
                } else {
                    Outcome::Pass
                })
            }));
        }
    }
    Ok(cases)
}

/// For closed-world dependencies, `(⋀ P v_i) ∧ D v` against the
/// relativized membership test.
pub(super) fn closed_world_relativize(spec: &SweepSpec) -> Result<Vec<Case>, VerifyError> {
    let max = spec.domain(2);
    let rows = spec.rows(3);
    let reg = Arc::new(Registry::standard());
    let deps = deps_of(
        spec,
        vec![
            Dependency::constancy(1),
            Dependency::fdep(1, 1),
            Dependency::incl(1),
            Dependency::indep(1, 1, 1),
        ],
    )?;
    let mut cases = Vec::new();
    for d in deps {
        let closed = Arc::new(check_closed_world(&d, clamp_bound(d.arity(), 3))?);
        for n in 1..=max {
            let (reg, d, closed) = (reg.clone(), d.clone(), closed.clone());
            cases.push(Case::new(format!("closed-world-relativize/{}/m{n}", d.name()), move || {
                if !closed.holds {
                    return Ok(Outcome::NotApplicable(format!(
                        "not closed-world: {}",
                        closed.witness.as_ref().map_or("no witness".into(), |w| w.to_string())
                    )));
                }
                let v: Vec<Var> = (1..=d.arity()).map(|i| Var::new(&format!("v{i}"))).collect();
                let f = relativize_closed_world(&d, "P", &v)?;
                let cfg = Engine::Fast;
                let compiled = Compiled::new(&f, &reg, cfg.config())?;
                let u = universe(n);
                let teams = enumerate_teams(&u, &v, rows)?;
                for pmask in 1u32..1 << n {
                    let p: Vec<Elem> = u.iter().copied().filter(|e| pmask >> e & 1 == 1).collect();
                    let pr = Relation::unary(p.clone());
                    let m = Overlay::bare(&u).with("P", pr.clone());
                    for x in &teams {
                        let want = d.relativized_holds(&p, x, &v)?;
                        let got = compiled.eval(&m, x);
                        if got.as_ref().ok() != Some(&want) {
                            return Ok(Outcome::Fail(
                                Artifact::new(&with_relation(n, "P", &pr)?, x, &f, cfg, want, &show(&got))
                                    .with_note(format!("expected value: {} holds of X(v) inside P", d.name())),
                            ));
                        }
                    }
                }
                Ok(Outcome::Pass)
            }));
        }
    }
    cases.push(Case::new("closed-world-relativize/nt/rejected".into(), || {
        let d = Dependency::nt();
        let verdict = check_closed_world(&d, 3)?;
        let refused = matches!(
            relativize_closed_world(&d, "P", &vars(&["v"])),
            Err(TransformError::NotClosedWorld(_))
        );
        Ok(if !verdict.holds && refused {
            Outcome::Pass
        } else {
            mismatch(
                2,
                format!("nt: closed-world verdict {}, relativization refused {refused}", verdict.holds),
            )
        })
    }));
    Ok(cases)
}
