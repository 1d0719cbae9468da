//! Recursive-descent parser shared by the team and classical grammars.
//!
//! Both grammars are parsed into one raw tree first; converting the raw tree
//! enforces the mode-specific rules (negation normal form for team formulas,
//! no dependency atoms or sugar in classical ones).

use std::sync::Arc;

use thiserror::Error;

use super::ast::{Classical, DepAtom, Formula};
use super::nnf::classical_to_nnf;
use crate::model::Var;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Hash,
    Bang,
    Tilde,
    Eq,
    Neq,
    Amp,
    Bar,
    SelImp,
    Arrow,
    PlusPlus,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::End => "end of input".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Hash => "`#`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::SelImp => "`~>`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::PlusPlus => "`++`".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {
                col += 1;
                i += 1;
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '#' => (Tok::Hash, 1),
            '=' => (Tok::Eq, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Bar, 1),
            '!' if next == Some('=') => (Tok::Neq, 2),
            '!' => (Tok::Bang, 1),
            '~' if next == Some('>') => (Tok::SelImp, 2),
            '~' => (Tok::Tilde, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '+' if next == Some('+') => (Tok::PlusPlus, 2),
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            c => {
                return Err(ParseError {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, pos));
        i += len;
        col += len;
    }
    out.push((Tok::End, Pos { line, col }));
    Ok(out)
}

#[derive(Debug)]
enum RawKind {
    Rel { sym: String, args: Vec<Var>, neg: bool },
    Eq { left: Var, right: Var, neg: bool },
    Dep { atom: DepAtom, neg: bool },
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    SelImp(Box<Raw>, Box<Raw>),
    BoolDisj(Box<Raw>, Box<Raw>),
    Exists(Var, Box<Raw>),
    Forall(Var, Box<Raw>),
}

#[derive(Debug)]
struct Raw {
    kind: RawKind,
    pos: Pos,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let p = self.pos();
        Err(ParseError {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        self.err(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn parse_imp(&mut self) -> Result<Raw, ParseError> {
        let lhs = self.parse_bool_disj()?;
        let pos = self.pos();
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                let rhs = self.parse_imp()?;
                Ok(Raw {
                    kind: RawKind::Implies(Box::new(lhs), Box::new(rhs)),
                    pos,
                })
            }
            Tok::SelImp => {
                self.bump();
                let rhs = self.parse_imp()?;
                Ok(Raw {
                    kind: RawKind::SelImp(Box::new(lhs), Box::new(rhs)),
                    pos,
                })
            }
            _ => Ok(lhs),
        }
    }

    fn parse_bool_disj(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.parse_or()?;
        while *self.peek() == Tok::PlusPlus {
            let pos = self.bump().1;
            let rhs = self.parse_or()?;
            lhs = Raw {
                kind: RawKind::BoolDisj(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.parse_and()?;
        while *self.peek() == Tok::Bar {
            let pos = self.bump().1;
            let rhs = self.parse_and()?;
            lhs = Raw {
                kind: RawKind::Or(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.parse_unary()?;
        while *self.peek() == Tok::Amp {
            let pos = self.bump().1;
            let rhs = self.parse_unary()?;
            lhs = Raw {
                kind: RawKind::And(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Raw, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                let inner = self.parse_unary()?;
                Ok(Raw {
                    kind: RawKind::Not(Box::new(inner)),
                    pos,
                })
            }
            Tok::Bang => {
                self.bump();
                match self.peek() {
                    Tok::Hash => {
                        let atom = self.parse_dep()?;
                        Ok(Raw {
                            kind: RawKind::Dep { atom, neg: true },
                            pos,
                        })
                    }
                    Tok::Ident(_) if *self.peek_at(1) == Tok::LParen => {
                        let (sym, args) = self.parse_rel()?;
                        Ok(Raw {
                            kind: RawKind::Rel { sym, args, neg: true },
                            pos,
                        })
                    }
                    _ => self.unexpected("a relation literal after `!`"),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.parse_imp()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Hash => {
                let atom = self.parse_dep()?;
                Ok(Raw {
                    kind: RawKind::Dep { atom, neg: false },
                    pos,
                })
            }
            Tok::Ident(word) => {
                let quant = (word == "E" || word == "A")
                    && matches!(self.peek_at(1), Tok::Ident(_));
                if quant {
                    self.bump();
                    let v = Var::from(self.ident()?);
                    let body = Box::new(self.parse_imp()?);
                    let kind = if word == "E" {
                        RawKind::Exists(v, body)
                    } else {
                        RawKind::Forall(v, body)
                    };
                    return Ok(Raw { kind, pos });
                }
                if *self.peek_at(1) == Tok::LParen {
                    let (sym, args) = self.parse_rel()?;
                    return Ok(Raw {
                        kind: RawKind::Rel {
                            sym,
                            args,
                            neg: false,
                        },
                        pos,
                    });
                }
                let left = Var::from(self.ident()?);
                let neg = match self.peek() {
                    Tok::Eq => false,
                    Tok::Neq => true,
                    _ => return self.unexpected("`=` or `!=`"),
                };
                self.bump();
                let right = Var::from(self.ident()?);
                Ok(Raw {
                    kind: RawKind::Eq { left, right, neg },
                    pos,
                })
            }
            _ => self.unexpected("a formula"),
        }
    }

    fn parse_rel(&mut self) -> Result<(String, Vec<Var>), ParseError> {
        let sym = self.ident()?;
        self.expect(Tok::LParen)?;
        let args = self.parse_var_list(&[Tok::RParen])?;
        self.expect(Tok::RParen)?;
        Ok((sym, args))
    }

    /// Comma-separated variables, possibly empty, up to one of `stop`.
    fn parse_var_list(&mut self, stop: &[Tok]) -> Result<Vec<Var>, ParseError> {
        let mut out = Vec::new();
        if stop.contains(self.peek()) {
            return Ok(out);
        }
        loop {
            out.push(Var::from(self.ident()?));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn parse_dep(&mut self) -> Result<DepAtom, ParseError> {
        self.expect(Tok::Hash)?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut groups = vec![self.parse_var_list(&[Tok::Semi, Tok::RParen])?];
        while *self.peek() == Tok::Semi {
            self.bump();
            groups.push(self.parse_var_list(&[Tok::Semi, Tok::RParen])?);
        }
        self.expect(Tok::RParen)?;
        Ok(DepAtom {
            name: Arc::from(name),
            groups,
        })
    }
}

fn parse_raw(text: &str) -> Result<Raw, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let raw = p.parse_imp()?;
    if *p.peek() != Tok::End {
        return p.unexpected("end of input");
    }
    Ok(raw)
}

fn fail<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    })
}

fn to_classical(raw: Raw) -> Result<Classical, ParseError> {
    let pos = raw.pos;
    Ok(match raw.kind {
        RawKind::Rel { sym, args, neg } => {
            let r = Classical::rel(&sym, args);
            if neg {
                Classical::not(r)
            } else {
                r
            }
        }
        RawKind::Eq { left, right, neg } => {
            let e = Classical::Eq(left, right);
            if neg {
                Classical::not(e)
            } else {
                e
            }
        }
        RawKind::Dep { .. } => {
            return fail(pos, "dependency atom in a first-order formula")
        }
        RawKind::Not(a) => Classical::not(to_classical(*a)?),
        RawKind::And(a, b) => Classical::and(to_classical(*a)?, to_classical(*b)?),
        RawKind::Or(a, b) => Classical::or(to_classical(*a)?, to_classical(*b)?),
        RawKind::Implies(a, b) => Classical::implies(to_classical(*a)?, to_classical(*b)?),
        RawKind::SelImp(..) => return fail(pos, "`~>` in a first-order formula"),
        RawKind::BoolDisj(..) => return fail(pos, "`++` in a first-order formula"),
        RawKind::Exists(v, b) => Classical::exists(v, to_classical(*b)?),
        RawKind::Forall(v, b) => Classical::forall(v, to_classical(*b)?),
    })
}

fn contains_dep(raw: &Raw) -> Option<Pos> {
    match &raw.kind {
        RawKind::Dep { .. } => Some(raw.pos),
        RawKind::Rel { .. } | RawKind::Eq { .. } => None,
        RawKind::Not(a) | RawKind::Exists(_, a) | RawKind::Forall(_, a) => contains_dep(a),
        RawKind::And(a, b)
        | RawKind::Or(a, b)
        | RawKind::Implies(a, b)
        | RawKind::SelImp(a, b)
        | RawKind::BoolDisj(a, b) => contains_dep(a).or_else(|| contains_dep(b)),
    }
}

/// First-order part of a team formula: negation is pushed to the literals.
fn negated_fo(raw: Raw, what: &str) -> Result<Formula, ParseError> {
    if let Some(p) = contains_dep(&raw) {
        return fail(p, "negated dependency atom");
    }
    let c = to_classical(raw).map_err(|e| ParseError {
        msg: format!("{what}: {}", e.msg),
        ..e
    })?;
    Ok(classical_to_nnf(&Classical::not(c)))
}

fn to_team(raw: Raw) -> Result<Formula, ParseError> {
    let pos = raw.pos;
    Ok(match raw.kind {
        RawKind::Rel { sym, args, neg } => Formula::Rel {
            sym: Arc::from(sym),
            args,
            positive: !neg,
        },
        RawKind::Eq { left, right, neg } => Formula::Eq {
            left,
            right,
            positive: !neg,
        },
        RawKind::Dep { atom, neg } => {
            if neg {
                return fail(pos, "negated dependency atom");
            }
            Formula::Dep(atom)
        }
        RawKind::Not(a) => negated_fo(*a, "operand of `~`")?,
        RawKind::Implies(a, b) => Formula::or(negated_fo(*a, "antecedent of `->`")?, to_team(*b)?),
        RawKind::And(a, b) => Formula::and(to_team(*a)?, to_team(*b)?),
        RawKind::Or(a, b) => Formula::or(to_team(*a)?, to_team(*b)?),
        RawKind::SelImp(a, b) => {
            if let Some(p) = contains_dep(&a) {
                return fail(p, "left side of `~>` must be first-order");
            }
            let theta = to_classical(*a).map_err(|e| ParseError {
                msg: format!("left side of `~>`: {}", e.msg),
                ..e
            })?;
            Formula::sel_imp(theta, to_team(*b)?)
        }
        RawKind::BoolDisj(a, b) => Formula::bool_disj(to_team(*a)?, to_team(*b)?),
        RawKind::Exists(v, b) => Formula::exists(v, to_team(*b)?),
        RawKind::Forall(v, b) => Formula::forall(v, to_team(*b)?),
    })
}

/// Parse a team formula. `~` and `->` are accepted on first-order operands
/// and eliminated into negation normal form.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    to_team(parse_raw(text)?)
}

/// Parse a classical first-order formula.
pub fn parse_classical(text: &str) -> Result<Classical, ParseError> {
    to_classical(parse_raw(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vars;

    #[test]
    fn quantified_constancy() {
        let f = parse_formula("E z (#const(z) & z != x)").unwrap();
        let want = Formula::exists(
            Var::new("z"),
            Formula::and(
                Formula::dep("const", vec![vars(&["z"])]),
                Formula::neq(Var::new("z"), Var::new("x")),
            ),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn negated_dependency_is_rejected() {
        let err = parse_formula("!#incl(x;y)").unwrap_err();
        assert!(err.msg.contains("negated dependency atom"), "{err}");
        let err = parse_formula("~(R(x) & #const(x))").unwrap_err();
        assert!(err.msg.contains("negated dependency atom"), "{err}");
    }

    #[test]
    fn precedence() {
        let f = parse_formula("P(x) | Q(x) & R(x)").unwrap();
        assert!(matches!(f, Formula::Or(..)));
        let f = parse_formula("P(x) ++ Q(x) | R(x)").unwrap();
        assert!(matches!(f, Formula::BoolDisj(..)));
        let f = parse_formula("x = y ~> P(x) ++ Q(x)").unwrap();
        assert!(matches!(f, Formula::SelImp(..)));
        let f = parse_formula("x = y ~> x = x ~> P(x)").unwrap();
        match f {
            Formula::SelImp(_, b) => assert!(matches!(*b, Formula::SelImp(..))),
            _ => panic!(),
        }
    }

    #[test]
    fn quantifier_body_extends_right() {
        let f = parse_formula("E x P(x) | Q(x)").unwrap();
        match f {
            Formula::Exists(_, b) => assert!(matches!(*b, Formula::Or(..))),
            _ => panic!(),
        }
    }

    #[test]
    fn quantifier_letters_are_still_usable_as_symbols() {
        assert!(matches!(parse_formula("E(x)").unwrap(), Formula::Rel { .. }));
        assert!(matches!(parse_formula("A = x").unwrap(), Formula::Eq { .. }));
    }

    #[test]
    fn dependency_groups() {
        let f = parse_formula("#indep(x;;z)").unwrap();
        match f {
            Formula::Dep(a) => assert_eq!(a.group_sizes(), vec![1, 0, 1]),
            _ => panic!(),
        }
        let f = parse_formula("#false()").unwrap();
        match f {
            Formula::Dep(a) => assert_eq!(a.arity(), 0),
            _ => panic!(),
        }
    }

    #[test]
    fn classical_mode() {
        let c = parse_classical("A x (R(x) -> ~S(x))").unwrap();
        assert!(matches!(c, Classical::Forall(..)));
        assert!(parse_classical("#const(x)").is_err());
        assert!(parse_classical("x = y ~> P(x)").is_err());
    }

    #[test]
    fn team_mode_eliminates_classical_connectives() {
        let f = parse_formula("~(R(x) & S(x))").unwrap();
        assert_eq!(f, parse_formula("!R(x) | !S(x)").unwrap());
        let f = parse_formula("S(x) -> R(x)").unwrap();
        assert_eq!(f, parse_formula("!S(x) | R(x)").unwrap());
    }

    #[test]
    fn error_positions() {
        let err = parse_formula("P(x) &\n  & Q(x)").unwrap_err();
        assert_eq!((err.line, err.col), (2, 3));
        let err = parse_formula("P(x) $").unwrap_err();
        assert_eq!((err.line, err.col), (1, 6));
        assert!(parse_formula("P(x) Q(x)").is_err());
        assert!(parse_formula("(P(x)").is_err());
        assert!(parse_formula("").is_err());
    }

    #[test]
    fn selimp_left_must_be_first_order() {
        let err = parse_formula("#const(x) ~> P(x)").unwrap_err();
        assert!(err.msg.contains("first-order"), "{err}");
    }
}
