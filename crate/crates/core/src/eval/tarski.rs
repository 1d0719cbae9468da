use crate::model::{Assignment, Elem, Interpretation, Team, Var};
use crate::syntax::Classical;

use super::EvalError;

/// Variable bindings as a stack; later entries shadow earlier ones.
pub(crate) type Env = Vec<(Var, Elem)>;

fn lookup(env: &Env, v: &Var) -> Result<Elem, EvalError> {
    env.iter()
        .rev()
        .find(|(w, _)| w == v)
        .map(|(_, e)| *e)
        .ok_or_else(|| EvalError::UnboundVariable(v.clone()))
}

pub(crate) fn holds(m: &dyn Interpretation, env: &mut Env, c: &Classical) -> Result<bool, EvalError> {
    Ok(match c {
        Classical::Rel { sym, args } => {
            let rel = m
                .relation(sym)
                .ok_or_else(|| EvalError::UnknownSymbol(sym.to_string()))?;
            if rel.arity() != args.len() {
                return Err(EvalError::Arity {
                    sym: sym.to_string(),
                    expected: rel.arity(),
                    got: args.len(),
                });
            }
            let mut t = Vec::with_capacity(args.len());
            for a in args {
                t.push(lookup(env, a)?);
            }
            rel.contains(&t)
        }
        Classical::Eq(a, b) => lookup(env, a)? == lookup(env, b)?,
        Classical::Not(a) => !holds(m, env, a)?,
        Classical::And(a, b) => holds(m, env, a)? && holds(m, env, b)?,
        Classical::Or(a, b) => holds(m, env, a)? || holds(m, env, b)?,
        Classical::Implies(a, b) => !holds(m, env, a)? || holds(m, env, b)?,
        Classical::Exists(v, b) | Classical::Forall(v, b) => {
            let want = matches!(c, Classical::Exists(..));
            let mut found = !want;
            for &e in m.universe() {
                env.push((v.clone(), e));
                let r = holds(m, env, b);
                env.pop();
                if r? == want {
                    found = want;
                    break;
                }
            }
            found
        }
    })
}

/// Standard Tarskian truth of `c` in `m` under `s`.
pub fn tarski_eval(m: &dyn Interpretation, s: &Assignment, c: &Classical) -> Result<bool, EvalError> {
    let mut env: Env = s.iter().map(|(v, e)| (v.clone(), *e)).collect();
    holds(m, &mut env, c)
}

/// Truth of a classical sentence.
pub fn tarski_sentence(m: &dyn Interpretation, c: &Classical) -> Result<bool, EvalError> {
    holds(m, &mut Vec::new(), c)
}

/// `X↾θ`: the rows of `x` satisfying `theta`.
pub fn select_team(x: &Team, theta: &Classical, m: &dyn Interpretation) -> Result<Team, EvalError> {
    let mut env: Env = x.vars().iter().map(|v| (v.clone(), 0)).collect();
    let mut err = None;
    let out = x.filter(|row| {
        if err.is_some() {
            return false;
        }
        for (slot, &e) in env.iter_mut().zip(row) {
            slot.1 = e;
        }
        match holds(m, &mut env, theta) {
            Ok(b) => b,
            Err(e) => {
                err = Some(e);
                false
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{vars, Relation, Structure};
    use crate::syntax::parse_classical;

    fn paired_team() -> Team {
        Team::new(
            vars(&["v1", "w1", "v2", "v3", "w2", "w3", "v4", "w4"]),
            vec![
                vec![0, 0, 0, 1, 0, 1, 0, 1],
                vec![1, 1, 1, 2, 1, 2, 0, 1],
                vec![2, 2, 0, 0, 1, 1, 0, 1],
            ],
        )
        .unwrap()
    }

    #[test]
    fn relation_lookup() {
        let mut m = Structure::canonical(2).unwrap();
        m.add_relation("R", Relation::from_tuples(2, [vec![0, 1]]).unwrap())
            .unwrap();
        let s: Assignment = [(Var::new("x"), 0), (Var::new("y"), 1)].into();
        assert!(tarski_eval(&m, &s, &parse_classical("R(x,y)").unwrap()).unwrap());
        assert!(!tarski_eval(&m, &s, &parse_classical("R(y,x)").unwrap()).unwrap());
    }

    #[test]
    fn identity_is_valid() {
        for n in 1..=3 {
            let m = Structure::canonical(n).unwrap();
            assert!(tarski_sentence(&m, &parse_classical("A x x = x").unwrap()).unwrap());
        }
    }

    #[test]
    fn errors() {
        let m = Structure::canonical(2).unwrap();
        assert_eq!(
            tarski_sentence(&m, &parse_classical("x = x").unwrap()),
            Err(EvalError::UnboundVariable(Var::new("x")))
        );
        assert!(matches!(
            tarski_sentence(&m, &parse_classical("E x S(x)").unwrap()),
            Err(EvalError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn select_then_project() {
        let m = Structure::canonical(3).unwrap();
        let x = paired_team();
        let sel = |s: &str| select_team(&x, &parse_classical(s).unwrap(), &m).unwrap();
        let a = sel("v1 = w1").project(&vars(&["v1"])).unwrap();
        assert_eq!(a, Relation::unary([0, 1, 2]));
        let b = sel("v2 = w2 & v3 = w3").project(&vars(&["v2", "v3"])).unwrap();
        assert_eq!(b, Relation::from_tuples(2, [vec![0, 1], vec![1, 2]]).unwrap());
        let c = sel("v4 = w4").project(&vars(&["v4"])).unwrap();
        assert!(c.is_empty());
        assert_eq!(sel("v1 = v1"), x);
    }
}
