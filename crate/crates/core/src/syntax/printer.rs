//! Canonical text output. Parentheses are emitted only where the grammar
//! needs them, except that a quantifier in operand position is always
//! wrapped (its body would otherwise swallow the rest of the line).

use std::fmt::{self, Display, Formatter, Write};

use super::ast::{Classical, DepAtom, Formula};
use crate::model::Var;

const IMP: u8 = 0;
const BDISJ: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const ATOM: u8 = 5;

fn write_vars(f: &mut Formatter<'_>, vs: &[Var]) -> fmt::Result {
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        f.write_str(v.as_str())?;
    }
    Ok(())
}

impl Display for DepAtom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "#{}(", self.name)?;
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                f.write_char(';')?;
            }
            write_vars(f, g)?;
        }
        f.write_char(')')
    }
}

fn team_level(phi: &Formula) -> u8 {
    match phi {
        Formula::SelImp(..) | Formula::Exists(..) | Formula::Forall(..) => IMP,
        Formula::BoolDisj(..) => BDISJ,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => ATOM,
    }
}

fn write_team(f: &mut Formatter<'_>, phi: &Formula, ctx: u8) -> fmt::Result {
    let paren = team_level(phi) < ctx;
    if paren {
        f.write_char('(')?;
    }
    match phi {
        Formula::Rel {
            sym,
            args,
            positive,
        } => {
            if !positive {
                f.write_char('!')?;
            }
            write!(f, "{sym}(")?;
            write_vars(f, args)?;
            f.write_char(')')?;
        }
        Formula::Eq {
            left,
            right,
            positive,
        } => {
            let op = if *positive { "=" } else { "!=" };
            write!(f, "{left} {op} {right}")?;
        }
        Formula::Dep(a) => write!(f, "{a}")?,
        Formula::And(a, b) => {
            write_team(f, a, AND)?;
            f.write_str(" & ")?;
            write_team(f, b, AND + 1)?;
        }
        Formula::Or(a, b) => {
            write_team(f, a, OR)?;
            f.write_str(" | ")?;
            write_team(f, b, OR + 1)?;
        }
        Formula::BoolDisj(a, b) => {
            write_team(f, a, BDISJ)?;
            f.write_str(" ++ ")?;
            write_team(f, b, BDISJ + 1)?;
        }
        Formula::SelImp(t, b) => {
            write_classical(f, t, BDISJ)?;
            f.write_str(" ~> ")?;
            write_team(f, b, IMP)?;
        }
        Formula::Exists(v, b) => {
            write!(f, "E {v} ")?;
            write_team(f, b, IMP)?;
        }
        Formula::Forall(v, b) => {
            write!(f, "A {v} ")?;
            write_team(f, b, IMP)?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

fn classical_level(c: &Classical) -> u8 {
    match c {
        Classical::Implies(..) | Classical::Exists(..) | Classical::Forall(..) => IMP,
        Classical::Or(..) => OR,
        Classical::And(..) => AND,
        Classical::Not(inner) => match **inner {
            Classical::Rel { .. } | Classical::Eq(..) => ATOM,
            _ => NOT,
        },
        _ => ATOM,
    }
}

fn write_classical(f: &mut Formatter<'_>, c: &Classical, ctx: u8) -> fmt::Result {
    let paren = classical_level(c) < ctx;
    if paren {
        f.write_char('(')?;
    }
    match c {
        Classical::Rel { sym, args } => {
            write!(f, "{sym}(")?;
            write_vars(f, args)?;
            f.write_char(')')?;
        }
        Classical::Eq(a, b) => write!(f, "{a} = {b}")?,
        Classical::Not(inner) => match &**inner {
            Classical::Rel { sym, args } => {
                write!(f, "!{sym}(")?;
                write_vars(f, args)?;
                f.write_char(')')?;
            }
            Classical::Eq(a, b) => write!(f, "{a} != {b}")?,
            other => {
                f.write_char('~')?;
                write_classical(f, other, ATOM)?;
            }
        },
        Classical::And(a, b) => {
            write_classical(f, a, AND)?;
            f.write_str(" & ")?;
            write_classical(f, b, AND + 1)?;
        }
        Classical::Or(a, b) => {
            write_classical(f, a, OR)?;
            f.write_str(" | ")?;
            write_classical(f, b, OR + 1)?;
        }
        Classical::Implies(a, b) => {
            write_classical(f, a, BDISJ)?;
            f.write_str(" -> ")?;
            write_classical(f, b, IMP)?;
        }
        Classical::Exists(v, b) => {
            write!(f, "E {v} ")?;
            write_classical(f, b, IMP)?;
        }
        Classical::Forall(v, b) => {
            write!(f, "A {v} ")?;
            write_classical(f, b, IMP)?;
        }
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_team(f, self, IMP)
    }
}

impl Display for Classical {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_classical(f, self, IMP)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse_classical, parse_formula};

    fn round_trip(s: &str) {
        let f = parse_formula(s).unwrap();
        let printed = f.to_string();
        let g = parse_formula(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_eq!(f, g, "{s} printed as {printed}");
        assert_eq!(printed, g.to_string());
    }

    #[test]
    fn team_round_trips() {
        for s in [
            "E z (#const(z) & z != x)",
            "(P(x) | Q(x)) & R(x)",
            "P(x) & (Q(x) & R(x))",
            "(E x P(x)) | Q(y)",
            "(x = y ~> P(x)) ++ Q(y)",
            "x = y ~> x = x ~> P(x)",
            "(x = y | ~P(x)) ~> #dep(x;y)",
            "(A x P(x)) ~> P(y)",
            "(P(x) ++ Q(x)) ++ R(x)",
            "P(x) ++ (Q(x) ++ R(x))",
            "A p E z (#indep(x;;z) & #incl(x,y;u,v))",
            "#false() | R()",
        ] {
            round_trip(s);
        }
    }

    #[test]
    fn canonical_text() {
        let f = parse_formula("((P(x)) | (Q(x) & R(x)))").unwrap();
        assert_eq!(f.to_string(), "P(x) | Q(x) & R(x)");
        let f = parse_formula("(E x P(x)) & Q(x)").unwrap();
        assert_eq!(f.to_string(), "(E x P(x)) & Q(x)");
    }

    #[test]
    fn classical_round_trips() {
        for s in [
            "A x A y (R(x) & R(y) -> x = y)",
            "~(P(x) -> Q(x)) -> P(x)",
            "~~P(x)",
            "~~x = y",
            "~(E x P(x))",
            "(P(x) -> Q(x)) -> R(x)",
        ] {
            let c = parse_classical(s).unwrap();
            let printed = c.to_string();
            assert_eq!(parse_classical(&printed).unwrap(), c, "{s} -> {printed}");
        }
    }
}
