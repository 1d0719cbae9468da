use std::sync::Arc;

use crate::model::Var;

/// A dependency atom `#name(g1; g2; ...)`. The checked tuple is the
/// concatenation of the groups.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DepAtom {
    pub name: Arc<str>,
    pub groups: Vec<Vec<Var>>,
}

impl DepAtom {
    pub fn new(name: &str, groups: Vec<Vec<Var>>) -> Self {
        DepAtom {
            name: Arc::from(name),
            groups,
        }
    }

    pub fn tuple(&self) -> Vec<Var> {
        self.groups.iter().flatten().cloned().collect()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn arity(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }
}

/// Team formula in negation normal form, plus the two sugar connectives.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Rel {
        sym: Arc<str>,
        args: Vec<Var>,
        positive: bool,
    },
    Eq {
        left: Var,
        right: Var,
        positive: bool,
    },
    Dep(DepAtom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// `θ ~> φ`: `φ` evaluated on the rows satisfying `θ`.
    SelImp(Classical, Box<Formula>),
    /// `φ ++ ψ`: Boolean disjunction of the two verdicts.
    BoolDisj(Box<Formula>, Box<Formula>),
}

/// Classical first-order formula with unrestricted negation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Classical {
    Rel { sym: Arc<str>, args: Vec<Var> },
    Eq(Var, Var),
    Not(Box<Classical>),
    And(Box<Classical>, Box<Classical>),
    Or(Box<Classical>, Box<Classical>),
    Implies(Box<Classical>, Box<Classical>),
    Exists(Var, Box<Classical>),
    Forall(Var, Box<Classical>),
}

impl Formula {
    pub fn rel(sym: &str, args: Vec<Var>) -> Formula {
        Formula::Rel {
            sym: Arc::from(sym),
            args,
            positive: true,
        }
    }

    pub fn not_rel(sym: &str, args: Vec<Var>) -> Formula {
        Formula::Rel {
            sym: Arc::from(sym),
            args,
            positive: false,
        }
    }

    pub fn eq(left: Var, right: Var) -> Formula {
        Formula::Eq {
            left,
            right,
            positive: true,
        }
    }

    pub fn neq(left: Var, right: Var) -> Formula {
        Formula::Eq {
            left,
            right,
            positive: false,
        }
    }

    pub fn dep(name: &str, groups: Vec<Vec<Var>>) -> Formula {
        Formula::Dep(DepAtom::new(name, groups))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists_all(vs: &[Var], body: Formula) -> Formula {
        vs.iter().rev().fold(body, |b, v| Formula::exists(v.clone(), b))
    }

    pub fn forall_all(vs: &[Var], body: Formula) -> Formula {
        vs.iter().rev().fold(body, |b, v| Formula::forall(v.clone(), b))
    }

    pub fn sel_imp(theta: Classical, body: Formula) -> Formula {
        Formula::SelImp(theta, Box::new(body))
    }

    pub fn bool_disj(a: Formula, b: Formula) -> Formula {
        Formula::BoolDisj(Box::new(a), Box::new(b))
    }

    /// Right-nested conjunction; `None` for an empty list.
    pub fn conj(parts: Vec<Formula>) -> Option<Formula> {
        parts.into_iter().rev().reduce(|acc, f| Formula::and(f, acc))
    }

    pub fn disj(parts: Vec<Formula>) -> Option<Formula> {
        parts.into_iter().rev().reduce(|acc, f| Formula::or(f, acc))
    }

    /// Pointwise tuple equality `v1..vn = w1..wn` as a conjunction; the empty
    /// tuple gives `None`.
    pub fn tuple_eq(vs: &[Var], ws: &[Var]) -> Option<Formula> {
        assert_eq!(vs.len(), ws.len());
        Formula::conj(
            vs.iter()
                .zip(ws)
                .map(|(v, w)| Formula::eq(v.clone(), w.clone()))
                .collect(),
        )
    }
}

impl Classical {
    pub fn rel(sym: &str, args: Vec<Var>) -> Classical {
        Classical::Rel {
            sym: Arc::from(sym),
            args,
        }
    }

    pub fn eq(a: Var, b: Var) -> Classical {
        Classical::Eq(a, b)
    }

    pub fn neq(a: Var, b: Var) -> Classical {
        Classical::not(Classical::Eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Classical) -> Classical {
        Classical::Not(Box::new(a))
    }

    pub fn and(a: Classical, b: Classical) -> Classical {
        Classical::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Classical, b: Classical) -> Classical {
        Classical::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Classical, b: Classical) -> Classical {
        Classical::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: Var, body: Classical) -> Classical {
        Classical::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Classical) -> Classical {
        Classical::Forall(v, Box::new(body))
    }

    pub fn conj(parts: Vec<Classical>) -> Option<Classical> {
        parts.into_iter().rev().reduce(|acc, f| Classical::and(f, acc))
    }

    pub fn disj(parts: Vec<Classical>) -> Option<Classical> {
        parts.into_iter().rev().reduce(|acc, f| Classical::or(f, acc))
    }

    pub fn tuple_eq(vs: &[Var], ws: &[Var]) -> Option<Classical> {
        assert_eq!(vs.len(), ws.len());
        Classical::conj(
            vs.iter()
                .zip(ws)
                .map(|(v, w)| Classical::eq(v.clone(), w.clone()))
                .collect(),
        )
    }

    /// `x = x` for some variable: a convenient truth constant.
    pub fn top(v: Var) -> Classical {
        Classical::Eq(v.clone(), v)
    }

    pub fn bottom(v: Var) -> Classical {
        Classical::neq(v.clone(), v)
    }
}
