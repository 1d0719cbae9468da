use super::{Dependency, Test};
use crate::model::Var;
use crate::syntax::{parse_classical, Classical};

fn block(base: &str, k: usize) -> Vec<Var> {
    (1..=k).map(|i| Var::from(format!("{base}{i}"))).collect()
}

fn forall(vs: &[Var], body: Classical) -> Classical {
    vs.iter()
        .rev()
        .fold(body, |b, v| Classical::forall(v.clone(), b))
}

fn r(parts: &[&[Var]]) -> Classical {
    Classical::rel("R", parts.concat())
}

fn eq(a: &[Var], b: &[Var]) -> Classical {
    // The empty tuple equation is trivially true.
    Classical::tuple_eq(a, b).unwrap_or_else(|| Classical::not(falsity()))
}

fn falsity() -> Classical {
    let v = Var::new("b");
    Classical::forall(v.clone(), Classical::neq(v.clone(), v))
}

/// A first-order sentence over `R` defining a builtin dependency.
pub fn defining_sentence(d: &Dependency) -> Option<Classical> {
    Some(match &d.0.test {
        Test::Const => {
            let k = d.arity();
            let (x, y) = (block("x", k), block("y", k));
            forall(
                &[x.clone(), y.clone()].concat(),
                Classical::implies(Classical::and(r(&[&x]), r(&[&y])), eq(&x, &y)),
            )
        }
        Test::Fdep(j) => {
            let l = d.arity() - j;
            let (x, y, y2) = (block("x", *j), block("y", l), block("z", l));
            forall(
                &[x.clone(), y.clone(), y2.clone()].concat(),
                Classical::implies(Classical::and(r(&[&x, &y]), r(&[&x, &y2])), eq(&y, &y2)),
            )
        }
        Test::Indep(a, b) => {
            let c = d.arity() - a - b;
            let (x, x2, y, z, z2) = (
                block("x", *a),
                block("u", *a),
                block("y", *b),
                block("z", c),
                block("w", c),
            );
            forall(
                &[x.clone(), x2.clone(), y.clone(), z.clone(), z2.clone()].concat(),
                Classical::implies(
                    Classical::and(r(&[&x, &y, &z]), r(&[&x2, &y, &z2])),
                    r(&[&x, &y, &z2]),
                ),
            )
        }
        Test::Incl(k) => {
            let (x, y, z) = (block("x", *k), block("y", *k), block("z", *k));
            let exists = z
                .iter()
                .rev()
                .fold(r(&[&z, &x]), |b, v| Classical::exists(v.clone(), b));
            forall(&[x.clone(), y.clone()].concat(), Classical::implies(r(&[&x, &y]), exists))
        }
        Test::Nt => parse_classical("E x ~R(x)").expect("well formed"),
        Test::False => falsity(),
        Test::Fo(phi) => phi.clone(),
        Test::Custom(_) => return None,
    })
}

/// The conjunction of the three axioms: `a <= b` iff `E z E u R(a,b,z,u)` is
/// a linear order with endpoints; the set `B` of third coordinates is
/// nonempty, misses the least element and is closed under immediate
/// predecessors; the set `T` of fourth coordinates is the initial segment
/// up to some element outside `B`. No finite structure satisfies it.
pub fn cex4_sentence() -> Classical {
    let le = |a: &str, b: &str| format!("(E le1 E le2 R({a},{b},le1,le2))");
    let in_b = |c: &str| format!("(E b1 E b2 E b3 R(b1,b2,{c},b3))");
    let in_t = |c: &str| format!("(E t1 E t2 E t3 R(t1,t2,t3,{c}))");
    let order = [
        format!("A p {}", le("p", "p")),
        format!("A p A q ({} & {} -> p = q)", le("p", "q"), le("q", "p")),
        format!(
            "A p A q A s ({} & {} -> {})",
            le("p", "q"),
            le("q", "s"),
            le("p", "s")
        ),
        format!("A p A q ({} | {})", le("p", "q"), le("q", "p")),
        format!("E p A q {}", le("p", "q")),
        format!("E p A q {}", le("q", "p")),
    ];
    let pred = format!(
        "({} & q != p & A s ({} & {} -> s = q | s = p))",
        le("q", "p"),
        le("q", "s"),
        le("s", "p")
    );
    let b_axiom = [
        format!("A p ((A q {}) -> ~{})", le("p", "q"), in_b("p")),
        format!("E p {}", in_b("p")),
        format!("A p A q ({} & {} -> {})", in_b("p"), pred, in_b("q")),
    ];
    let t_axiom = format!(
        "E p (~{} & A q (({} -> {}) & ({} -> {})))",
        in_b("p"),
        in_t("q"),
        le("q", "p"),
        le("q", "p"),
        in_t("q")
    );
    let text = order
        .iter()
        .chain(b_axiom.iter())
        .chain(std::iter::once(&t_axiom))
        .map(|s| format!("({s})"))
        .collect::<Vec<_>>()
        .join(" & ");
    parse_classical(&text).expect("cex4 axioms are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::tarski_sentence;
    use crate::model::{all_tuples, Elem, Overlay, Relation};

    fn model(universe: &[Elem], r: Relation) -> Overlay<'static> {
        Overlay::bare(universe).with("R", r)
    }

    /// Encodes an order, `B` and `T` into one 4-ary relation. Each of the
    /// three projections is recovered exactly when all three are nonempty.
    fn encode(le: &[(Elem, Elem)], b: &[Elem], t: &[Elem]) -> Relation {
        let mut r = Relation::empty(4);
        for &(x, y) in le {
            for &z in b {
                for &u in t {
                    r.insert(vec![x, y, z, u]).unwrap();
                }
            }
        }
        r
    }

    fn check(
        universe: &[Elem],
        le: &[(Elem, Elem)],
        b: &[Elem],
        t: &[Elem],
    ) -> (bool, bool) {
        let contains = |s: &[Elem], x: Elem| s.contains(&x);
        let leq = |x: Elem, y: Elem| le.contains(&(x, y));
        // Axiom 1: linear order with endpoints.
        let mut a1 = universe.iter().all(|&x| leq(x, x));
        for &x in universe {
            for &y in universe {
                a1 &= !(leq(x, y) && leq(y, x)) || x == y;
                a1 &= leq(x, y) || leq(y, x);
                for &z in universe {
                    a1 &= !(leq(x, y) && leq(y, z)) || leq(x, z);
                }
            }
        }
        let least = universe.iter().find(|&&x| universe.iter().all(|&y| leq(x, y)));
        let greatest = universe.iter().find(|&&x| universe.iter().all(|&y| leq(y, x)));
        a1 &= least.is_some() && greatest.is_some();
        // Axiom 2.
        let mut a2 = !b.is_empty() && least.is_none_or(|l| !contains(b, *l));
        for &x in universe {
            for &y in universe {
                let immediate = leq(y, x)
                    && y != x
                    && universe
                        .iter()
                        .all(|&s| !(leq(y, s) && leq(s, x)) || s == y || s == x);
                if contains(b, x) && immediate {
                    a2 &= contains(b, y);
                }
            }
        }
        // Axiom 3.
        let a3 = universe.iter().any(|&a| {
            !contains(b, a) && universe.iter().all(|&q| contains(t, q) == leq(q, a))
        });
        let r = encode(le, b, t);
        let tarski = tarski_sentence(&model(universe, r), &cex4_sentence()).unwrap();
        (tarski, a1 && a2 && a3)
    }

    #[test]
    fn order_zero_below_one() {
        let le = [(0, 0), (0, 1), (1, 1)];
        let (tarski, hand) = check(&[0, 1], &le, &[1], &[0]);
        assert_eq!(tarski, hand);
        // B = {1} is closed under predecessor only if 0 is in B, which the
        // second axiom forbids.
        assert!(!hand);
    }

    #[test]
    fn hand_run_agrees_on_encoded_relations() {
        let u = [0, 1];
        let orders: [&[(Elem, Elem)]; 2] = [&[(0, 0), (0, 1), (1, 1)], &[(0, 0), (1, 0), (1, 1)]];
        let subsets: [&[Elem]; 3] = [&[0], &[1], &[0, 1]];
        for le in orders {
            for b in subsets {
                for t in subsets {
                    let (tarski, hand) = check(&u, le, b, t);
                    assert_eq!(tarski, hand, "{le:?} {b:?} {t:?}");
                }
            }
        }
    }

    #[test]
    fn empty_on_small_domains() {
        let phi = cex4_sentence();
        for n in 1..=2u8 {
            let u: Vec<Elem> = (0..n).collect();
            let ts = all_tuples(&u, 4);
            for mask in 0u32..1 << ts.len() {
                let r = Relation::from_tuples(
                    4,
                    ts.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, t)| t.clone()),
                )
                .unwrap();
                assert!(!tarski_sentence(&model(&u, r), &phi).unwrap());
            }
        }
    }
}
