use super::TransformError;
use crate::deps::{Dependency, Property};
use crate::model::Var;
use crate::syntax::{Classical, Formula, FreshGen};

/// `P t ∧ ∀x((x = t ∨ ¬P x) ~> nt(x))`: non-totality relative to `P`.
pub fn build_nt_relativized(t: &Var, p: &str) -> Formula {
    let mut fresh = FreshGen::new();
    fresh.reserve(t.as_str());
    fresh.reserve(p);
    let x = fresh.var("x");
    let sel = Classical::or(
        Classical::eq(x.clone(), t.clone()),
        Classical::not(Classical::rel(p, vec![x.clone()])),
    );
    let nt = Dependency::nt().atom(std::slice::from_ref(&x)).expect("arity 1");
    Formula::and(
        Formula::rel(p, vec![t.clone()]),
        Formula::forall(x, Formula::sel_imp(sel, nt)),
    )
}

/// `(⋀ P v_i) ∧ D v` for a dependency certified closed-world.
pub fn relativize_closed_world(d: &Dependency, p: &str, v: &[Var]) -> Result<Formula, TransformError> {
    if !d.certified(Property::ClosedWorld) {
        return Err(TransformError::NotClosedWorld(d.name().to_string()));
    }
    let mut parts: Vec<Formula> = v.iter().map(|x| Formula::rel(p, vec![x.clone()])).collect();
    parts.push(d.atom(v)?);
    Ok(Formula::conj(parts).expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deps::Registry;
    use crate::eval::{team_eval, EvalConfig};
    use crate::model::{vars, Elem, Overlay, Relation, Team};
    use crate::syntax::parse_formula;

    #[test]
    fn nt_shape() {
        let f = build_nt_relativized(&Var::new("t"), "P");
        assert_eq!(f, parse_formula("P(t) & A _x ((_x = t | !P(_x)) ~> #nt(_x))").unwrap());
    }

    #[test]
    fn nt_examples() {
        let reg = Registry::standard();
        let u = [0, 1, 2];
        let m = Overlay::bare(&u).with("P", Relation::unary([0, 1]));
        let f = build_nt_relativized(&Var::new("t"), "P");
        let t = vars(&["t"]);
        let one = Team::new(t.clone(), vec![vec![0]]).unwrap();
        assert!(team_eval(&m, &reg, &one, &f, &EvalConfig::fast()).unwrap());
        assert!(Dependency::nt().relativized_holds(&[0, 1], &one, &t).unwrap());
        let outside = Team::new(t.clone(), vec![vec![2]]).unwrap();
        assert!(!team_eval(&m, &reg, &outside, &f, &EvalConfig::fast()).unwrap());
        assert!(!Dependency::nt().relativized_holds(&[0, 1], &outside, &t).unwrap());
    }

    /// Against the relativized membership test, on every nonempty `P` and
    /// every team over `t`, for domains up to three elements.
    #[test]
    fn nt_sweep() {
        let reg = Registry::standard();
        let t = vars(&["t"]);
        let f = build_nt_relativized(&t[0], "P");
        for n in 1..=3u8 {
            let u: Vec<Elem> = (0..n).collect();
            let full = Team::full(t.clone(), &u).unwrap();
            for pmask in 1..1u32 << n {
                let p: Vec<Elem> = u.iter().copied().filter(|e| pmask >> e & 1 == 1).collect();
                let m = Overlay::bare(&u).with("P", Relation::unary(p.clone()));
                for mask in 0..1u64 << n {
                    let x = full.submask(mask);
                    assert_eq!(
                        team_eval(&m, &reg, &x, &f, &EvalConfig::fast()).unwrap(),
                        Dependency::nt().relativized_holds(&p, &x, &t).unwrap(),
                        "P={p:?} {x:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_world_relativization() {
        let f = relativize_closed_world(&Dependency::constancy(1), "P", &vars(&["v"])).unwrap();
        assert_eq!(f, parse_formula("P(v) & #const(v)").unwrap());
        assert!(matches!(
            relativize_closed_world(&Dependency::nt(), "P", &vars(&["v"])),
            Err(TransformError::NotClosedWorld(_))
        ));
    }
}
