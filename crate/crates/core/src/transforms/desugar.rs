use crate::deps::Dependency;
use crate::syntax::{classical_to_nnf, Classical, Formula, FreshGen};

/// Replace `θ ~> φ` by `¬θ ∨ (θ ∧ φ)` and `φ ++ ψ` by
/// `∃z1 z2 (=(z1) ∧ =(z2) ∧ ((z1 = z2 ∧ φ) ∨ (z1 ≠ z2 ∧ ψ)))`, innermost
/// first. The `z` variables are fresh for the whole formula.
pub fn desugar(f: &Formula) -> Formula {
    let mut fresh = FreshGen::new();
    fresh.reserve_formula(f);
    go(f, &mut fresh)
}

fn go(f: &Formula, fresh: &mut FreshGen) -> Formula {
    match f {
        Formula::Rel { .. } | Formula::Eq { .. } | Formula::Dep(_) => f.clone(),
        Formula::And(a, b) => Formula::and(go(a, fresh), go(b, fresh)),
        Formula::Or(a, b) => Formula::or(go(a, fresh), go(b, fresh)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), go(b, fresh)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), go(b, fresh)),
        Formula::SelImp(theta, b) => Formula::or(
            classical_to_nnf(&Classical::not(theta.clone())),
            Formula::and(classical_to_nnf(theta), go(b, fresh)),
        ),
        Formula::BoolDisj(a, b) => {
            let (z1, z2) = (fresh.var("z"), fresh.var("z"));
            let c = Dependency::constancy(1);
            let consts = Formula::and(
                c.atom(std::slice::from_ref(&z1)).expect("arity 1"),
                c.atom(std::slice::from_ref(&z2)).expect("arity 1"),
            );
            let split = Formula::or(
                Formula::and(Formula::eq(z1.clone(), z2.clone()), go(a, fresh)),
                Formula::and(Formula::neq(z1.clone(), z2.clone()), go(b, fresh)),
            );
            Formula::exists_all(&[z1, z2], Formula::and(consts, split))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deps::Registry;
    use crate::eval::{team_eval, EvalConfig};
    use crate::model::{all_tuples, vars, Structure, Team};
    use crate::syntax::{free_vars, has_sugar, parse_formula};

    #[test]
    fn selective_implication_shape() {
        let f = parse_formula("P(x) ~> #const(y)").unwrap();
        assert_eq!(desugar(&f), parse_formula("!P(x) | (P(x) & #const(y))").unwrap());
    }

    #[test]
    fn boolean_disjunction_shape() {
        let f = parse_formula("#const(x) ++ P(x)").unwrap();
        let want = parse_formula(
            "E _z E _z1 ((#const(_z) & #const(_z1)) & ((_z = _z1 & #const(x)) | (_z != _z1 & P(x))))",
        )
        .unwrap();
        assert_eq!(desugar(&f), want);
    }

    #[test]
    fn sugar_free_input_is_unchanged() {
        let f = parse_formula("A x E y (R(x,y) | #dep(x;y))").unwrap();
        assert_eq!(desugar(&f), f);
    }

    #[test]
    fn fresh_variables_avoid_the_input() {
        let f = parse_formula("E _z (P(_z) ++ #const(_z1))").unwrap();
        let d = desugar(&f);
        assert!(!has_sugar(&d));
        assert_eq!(free_vars(&d), free_vars(&f));
    }

    #[test]
    fn verdicts_preserved_on_two_element_domain() {
        let mut m = Structure::canonical(2).unwrap();
        m.add_predicate("P", [0]).unwrap();
        let reg = Registry::standard();
        let cfg = EvalConfig::fast();
        let xs = vars(&["x", "y"]);
        let rows = all_tuples(&[0, 1], 2);
        for text in [
            "P(x) ~> #const(y)",
            "#const(x) ++ #const(y)",
            "(x = y ~> #const(x)) ++ P(y)",
            "A z (P(z) ++ z = x)",
        ] {
            let f = parse_formula(text).unwrap();
            let d = desugar(&f);
            for mask in 0u32..16 {
                let sel: Vec<Vec<u8>> = (0..4)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| rows[i].clone())
                    .collect();
                let x = Team::new(xs.clone(), sel).unwrap();
                assert_eq!(
                    team_eval(&m, &reg, &x, &f, &cfg).unwrap(),
                    team_eval(&m, &reg, &x, &d, &cfg).unwrap(),
                    "{text} on {x:?}"
                );
            }
        }
    }
}
