use super::ast::{Classical, Formula};

/// Negation normal form of a classical formula, as a team formula.
pub fn classical_to_nnf(c: &Classical) -> Formula {
    nnf(c, true)
}

fn nnf(c: &Classical, pos: bool) -> Formula {
    match c {
        Classical::Rel { sym, args } => Formula::Rel {
            sym: sym.clone(),
            args: args.clone(),
            positive: pos,
        },
        Classical::Eq(a, b) => Formula::Eq {
            left: a.clone(),
            right: b.clone(),
            positive: pos,
        },
        Classical::Not(a) => nnf(a, !pos),
        Classical::And(a, b) if pos => Formula::and(nnf(a, true), nnf(b, true)),
        Classical::And(a, b) => Formula::or(nnf(a, false), nnf(b, false)),
        Classical::Or(a, b) if pos => Formula::or(nnf(a, true), nnf(b, true)),
        Classical::Or(a, b) => Formula::and(nnf(a, false), nnf(b, false)),
        Classical::Implies(a, b) if pos => Formula::or(nnf(a, false), nnf(b, true)),
        Classical::Implies(a, b) => Formula::and(nnf(a, true), nnf(b, false)),
        Classical::Exists(v, b) if pos => Formula::exists(v.clone(), nnf(b, true)),
        Classical::Exists(v, b) => Formula::forall(v.clone(), nnf(b, false)),
        Classical::Forall(v, b) if pos => Formula::forall(v.clone(), nnf(b, true)),
        Classical::Forall(v, b) => Formula::exists(v.clone(), nnf(b, false)),
    }
}

/// Classical negation normal form: no `->`, negation only on atoms.
pub fn classical_nnf(c: &Classical) -> Classical {
    to_classical(&classical_to_nnf(c)).expect("first-order by construction")
}

/// The classical reading of a team formula without dependency atoms or `++`.
/// Selective implication becomes material implication, which agrees with it
/// on first-order bodies by flatness.
pub fn to_classical(f: &Formula) -> Option<Classical> {
    Some(match f {
        Formula::Rel {
            sym,
            args,
            positive,
        } => {
            let r = Classical::Rel {
                sym: sym.clone(),
                args: args.clone(),
            };
            if *positive {
                r
            } else {
                Classical::not(r)
            }
        }
        Formula::Eq {
            left,
            right,
            positive,
        } => {
            let e = Classical::Eq(left.clone(), right.clone());
            if *positive {
                e
            } else {
                Classical::not(e)
            }
        }
        Formula::Dep(_) | Formula::BoolDisj(..) => return None,
        Formula::And(a, b) => Classical::and(to_classical(a)?, to_classical(b)?),
        Formula::Or(a, b) => Classical::or(to_classical(a)?, to_classical(b)?),
        Formula::Exists(v, b) => Classical::exists(v.clone(), to_classical(b)?),
        Formula::Forall(v, b) => Classical::forall(v.clone(), to_classical(b)?),
        Formula::SelImp(t, b) => Classical::implies(t.clone(), to_classical(b)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_classical, parse_formula};

    fn nnf_of(s: &str) -> Formula {
        classical_to_nnf(&parse_classical(s).unwrap())
    }

    #[test]
    fn de_morgan() {
        assert_eq!(nnf_of("~(R(x) & S(x))"), parse_formula("!R(x) | !S(x)").unwrap());
    }

    #[test]
    fn quantifier_duality() {
        assert_eq!(nnf_of("~A x R(x)"), parse_formula("E x !R(x)").unwrap());
    }

    #[test]
    fn double_negation() {
        assert_eq!(nnf_of("~~R(x)"), parse_formula("R(x)").unwrap());
        assert_eq!(nnf_of("~~~x = y"), parse_formula("x != y").unwrap());
    }

    #[test]
    fn implication() {
        assert_eq!(
            nnf_of("A x (S(x) -> R(x))"),
            parse_formula("A x (!S(x) | R(x))").unwrap()
        );
    }

    #[test]
    fn no_classical_reading_for_dependencies() {
        assert!(to_classical(&parse_formula("#const(x)").unwrap()).is_none());
        assert!(to_classical(&parse_formula("P(x) ++ P(y)").unwrap()).is_none());
    }
}
