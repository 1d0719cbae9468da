//! End-to-end acceptance run. Each criterion is timed against its bound and
//! reported on one line; the test fails if any criterion fails or overruns.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use teamsem::deps::{classify, compute_dmax, Dependency, Property};
use teamsem::eval::{select_team, tarski_sentence};
use teamsem::model::{all_tuples, vars, Elem, Relation, Structure, Team};
use teamsem::syntax::parse_classical;
use teamsem::verify::{run_harness, Report, SweepSpec, Verdict};

fn harness(name: &str) -> Report {
    let r = run_harness(name, &SweepSpec::default()).unwrap();
    eprintln!("    {}", r.summary());
    for c in r.failures().take(3) {
        eprintln!("    failing case {}", c.id);
    }
    assert!(r.passed(), "{name} has failing cases");
    r
}

fn supplement_and_duplicate() {
    let x = Team::new(vars(&["v0"]), vec![vec![0], vec![1]]).unwrap();
    let h = vec![vec![vec![1, 0]], vec![vec![0, 0], vec![0, 1]]];
    let s = x.supplement(&h, &vars(&["v1", "v2"])).unwrap();
    let want = Team::new(vars(&["v0", "v1", "v2"]), vec![vec![0, 1, 0], vec![1, 0, 0], vec![1, 0, 1]]).unwrap();
    assert_eq!(s, want);
    assert_eq!(s.rows(), want.rows());

    let d = x.duplicate(&vars(&["v1", "v2"]), &[0, 1]).unwrap();
    let rows: Vec<Vec<Elem>> = (0..8u8).map(|i| vec![i >> 2 & 1, i >> 1 & 1, i & 1]).collect();
    assert_eq!(d.rows(), rows.as_slice());
}

fn select_then_project() {
    let m = Structure::canonical(3).unwrap();
    let x = Team::new(
        vars(&["v1", "w1", "v2", "v3", "w2", "w3", "v4", "w4"]),
        vec![
            vec![0, 0, 0, 1, 0, 1, 0, 1],
            vec![1, 1, 1, 2, 1, 2, 0, 1],
            vec![2, 2, 0, 0, 1, 1, 0, 1],
        ],
    )
    .unwrap();
    let sel = |theta: &str, onto: &[&str]| {
        select_team(&x, &parse_classical(theta).unwrap(), &m)
            .unwrap()
            .project(&vars(onto))
            .unwrap()
    };
    assert_eq!(sel("v1 = w1", &["v1"]), Relation::unary([0, 1, 2]));
    assert_eq!(
        sel("v2 = w2 & v3 = w3", &["v2", "v3"]),
        Relation::from_tuples(2, [vec![0, 1], vec![1, 2]]).unwrap()
    );
    assert!(sel("v4 = w4", &["v4"]).is_empty());
}

fn flatness() {
    let r = harness("flatness");
    assert!(r.cases.len() >= 200);
}

fn sugar() {
    harness("sugar-selimp");
    let r = harness("sugar-booldisj");
    assert!(r.cases.iter().any(|c| c.id.contains("etp-counterexample") && c.verdict == Verdict::Pass));
}

fn verdicts(d: &Dependency, m: usize) -> Vec<(Property, bool)> {
    classify(d, m).unwrap().into_iter().map(|v| (v.property, v.holds)).collect()
}

fn has(table: &[(Property, bool)], p: Property) -> bool {
    table.iter().find(|(q, _)| *q == p).expect("property classified").1
}

fn classifier_table() {
    use Property::*;
    let cases = [
        ("const/1", [(Downwards, true), (Union, false), (Upwards, false)]),
        ("dep(1;1)", [(Downwards, true), (Union, false), (Upwards, false)]),
        ("incl(1)", [(Downwards, false), (Union, true), (Upwards, false)]),
        ("indep(1;1;1)", [(Downwards, false), (Union, false), (Upwards, false)]),
    ];
    for (name, expect) in cases {
        let t = verdicts(&Dependency::builtin(name).unwrap(), 3);
        for (p, want) in expect {
            assert_eq!(has(&t, p), want, "{name} {p}");
        }
        assert!(has(&t, EmptyTeam), "{name} empty-team");
        assert!(has(&t, ClosedWorld), "{name} closed-world");
    }
    let nt = verdicts(&Dependency::nt(), 3);
    assert!(!has(&nt, ClosedWorld));

    // cex4 at m = 2: count models of the axioms directly.
    let cex4 = Dependency::cex4();
    let axioms = teamsem::deps::cex4_sentence();
    let mut members = 0;
    for n in 1..=2usize {
        let u: Vec<Elem> = (0..n as Elem).collect();
        let tuples = all_tuples(&u, 4);
        for mask in 0u32..1 << tuples.len() {
            let r = Relation::from_tuples(4, tuples.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone())).unwrap();
            let mut m = Structure::canonical(n).unwrap();
            m.add_relation("R", r).unwrap();
            if tarski_sentence(&m, &axioms).unwrap() {
                members += 1;
            }
        }
    }
    assert_eq!(members, 0);
    let t = verdicts(&cex4, 3);
    assert!(!has(&t, EmptyTeam));
    for p in [Downwards, Upwards, Union, ClosedWorld] {
        assert!(has(&t, p), "cex4 {p} holds vacuously");
    }
    let bounds: Vec<usize> = classify(&cex4, 3).unwrap().iter().map(|v| v.bound).collect();
    assert!(bounds.iter().all(|&b| b == 2));
}

fn equivalence_sweeps() {
    for name in ["extraction", "singleocc", "qfree-putback", "putback-sentence"] {
        harness(name);
    }
    let r = harness("dep-union");
    let m1: Vec<_> = r.cases.iter().filter(|c| c.id.contains("/m1")).collect();
    assert!(!m1.is_empty());
    assert!(m1.iter().all(|c| c.verdict == Verdict::NotApplicable));
    assert!(r.cases.iter().any(|c| c.id.contains("/m3") && c.verdict == Verdict::Pass));
}

fn pipeline() {
    let r = harness("pipeline");
    let mut sentences: Vec<&str> = r.cases.iter().filter_map(|c| c.id.split('/').nth(1)).collect();
    sentences.dedup();
    assert!(sentences.len() >= 20, "only {} sentences", sentences.len());
}

fn maximal_members() {
    let dmax = compute_dmax(&Dependency::constancy(1), &[0, 1, 2]).unwrap();
    let singletons: Vec<Relation> = (0..3).map(|e| Relation::unary([e])).collect();
    assert_eq!(dmax, singletons);
    harness("phiR");
    harness("thetaT");
}

fn main_criteria() -> Vec<(&'static str, u64, Box<dyn Fn()>)> {
    vec![
        ("supplement and duplicate", 1, Box::new(supplement_and_duplicate)),
        ("select then project", 1, Box::new(select_then_project)),
        ("flatness", 120, Box::new(flatness)),
        ("locality", 120, Box::new(|| drop(harness("locality")))),
        ("closure transfer", 120, Box::new(|| drop(harness("closure-transfer")))),
        ("selective implication and Boolean disjunction", 60, Box::new(sugar)),
        ("classifier table", 60, Box::new(classifier_table)),
        ("equivalence sweeps", 600, Box::new(equivalence_sweeps)),
        ("pipeline", 300, Box::new(pipeline)),
        ("maximal members", 120, Box::new(maximal_members)),
        ("constancy from a first-order parameter", 60, Box::new(|| drop(harness("eq1")))),
        ("constancy is not first-order", 60, Box::new(|| drop(harness("const-not-flat")))),
    ]
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for (i, (name, bound, run)) in main_criteria().into_iter().enumerate() {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(|| run())).is_ok();
        let took = start.elapsed();
        let in_time = took < Duration::from_secs(bound);
        let status = if ok && in_time { "PASS" } else { "FAIL" };
        println!("{status} {:02} {name}: {:.2}s (bound {bound}s)", i + 1, took.as_secs_f64());
        if !(ok && in_time) {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
