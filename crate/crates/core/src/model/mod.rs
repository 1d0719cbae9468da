//! Finite models, assignments and relations.
//!
//! Elements of a [`Structure`] are small integers indexing its domain; the
//! element names only matter at the file boundary. Teams and the team
//! operations live in [`team`].

mod format;
pub(crate) mod team;

pub use format::{parse_model, parse_team, write_model, write_team};
pub use team::{enumerate_covers, enumerate_lax_supplements, Team};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Domain element, an index into the domain of the ambient structure.
pub type Elem = u8;

/// Largest domain a structure may have.
pub const MAX_DOMAIN: usize = 255;

/// A variable name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var(Arc::from(s))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Convenience for building variable tuples in code and tests.
pub fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(|n| Var::new(n)).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(Var),
    #[error("variable `{0}` occurs twice in a supplementation tuple")]
    DuplicateVariable(Var),
    #[error("variables {0:?} are not all in the team domain")]
    NotASubdomain(Vec<Var>),
    #[error("supplement for row {row} is empty")]
    EmptySupplement { row: usize },
    #[error("supplement has {got} entries but the team has {expected} rows")]
    SupplementShape { expected: usize, got: usize },
    #[error("tuple {tuple:?} has length {got}, expected {expected}")]
    Arity { tuple: Vec<Elem>, expected: usize, got: usize },
    #[error("element {0} is outside the domain")]
    OutsideDomain(Elem),
    #[error("domain is empty")]
    EmptyDomain,
    #[error("domain has {0} elements, at most {MAX_DOMAIN} are supported")]
    DomainTooLarge(usize),
    #[error("duplicate element name `{0}`")]
    DuplicateElement(String),
    #[error("symbol `{0}` is declared twice")]
    DuplicateSymbol(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// A set of equal-length tuples.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<Elem>>,
}

impl Relation {
    pub fn empty(arity: usize) -> Self {
        Relation {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    pub fn from_tuples<I>(arity: usize, tuples: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = Vec<Elem>>,
    {
        let mut rel = Relation::empty(arity);
        for t in tuples {
            rel.insert(t)?;
        }
        Ok(rel)
    }

    /// Unary relation from a set of elements.
    pub fn unary<I: IntoIterator<Item = Elem>>(elems: I) -> Self {
        Relation {
            arity: 1,
            tuples: elems.into_iter().map(|e| vec![e]).collect(),
        }
    }

    pub fn insert(&mut self, tuple: Vec<Elem>) -> Result<bool, ModelError> {
        if tuple.len() != self.arity {
            return Err(ModelError::Arity {
                expected: self.arity,
                got: tuple.len(),
                tuple,
            });
        }
        Ok(self.tuples.insert(tuple))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Vec<Elem>> + '_ {
        self.tuples.iter()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples.is_subset(&other.tuples)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        assert_eq!(self.arity, other.arity, "union of relations of different arity");
        Relation {
            arity: self.arity,
            tuples: self.tuples.union(&other.tuples).cloned().collect(),
        }
    }

    /// Elements occurring in some tuple.
    pub fn active_domain(&self) -> Vec<Elem> {
        let set: BTreeSet<Elem> = self.tuples.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    pub fn within(&self, universe: &[Elem]) -> bool {
        self.tuples.iter().flatten().all(|e| universe.contains(e))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if self.arity == 1 {
                write!(f, "{}", t[0])?;
            } else {
                write!(f, "(")?;
                for (j, e) in t.iter().enumerate() {
                    if j > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")?;
            }
        }
        write!(f, "}}")
    }
}

/// A single assignment of elements to variables.
pub type Assignment = BTreeMap<Var, Elem>;

/// Anything that fixes a universe and interprets relation symbols.
pub trait Interpretation {
    fn universe(&self) -> &[Elem];
    fn relation(&self, sym: &str) -> Option<&Relation>;
}

/// A finite first-order structure with named elements.
#[derive(Clone, PartialEq, Eq)]
pub struct Structure {
    names: Vec<String>,
    universe: Vec<Elem>,
    relations: BTreeMap<String, Relation>,
    predicates: BTreeMap<String, Relation>,
}

impl Structure {
    pub fn new(names: Vec<String>) -> Result<Self, ModelError> {
        if names.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        if names.len() > MAX_DOMAIN {
            return Err(ModelError::DomainTooLarge(names.len()));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(ModelError::DuplicateElement(n.clone()));
            }
        }
        let universe = (0..names.len()).map(|i| i as Elem).collect();
        Ok(Structure {
            names,
            universe,
            relations: BTreeMap::new(),
            predicates: BTreeMap::new(),
        })
    }

    /// Canonical domain `{0, .., size-1}` with elements named by their index.
    pub fn canonical(size: usize) -> Result<Self, ModelError> {
        Structure::new((0..size).map(|i| i.to_string()).collect())
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e as usize]
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|i| i as Elem)
    }

    fn check_fresh(&self, sym: &str) -> Result<(), ModelError> {
        if self.relations.contains_key(sym) || self.predicates.contains_key(sym) {
            return Err(ModelError::DuplicateSymbol(sym.to_string()));
        }
        Ok(())
    }

    pub fn add_relation(&mut self, sym: &str, rel: Relation) -> Result<(), ModelError> {
        self.check_fresh(sym)?;
        self.check_within(&rel)?;
        self.relations.insert(sym.to_string(), rel);
        Ok(())
    }

    pub fn add_predicate<I: IntoIterator<Item = Elem>>(
        &mut self,
        sym: &str,
        elems: I,
    ) -> Result<(), ModelError> {
        self.check_fresh(sym)?;
        let rel = Relation::unary(elems);
        self.check_within(&rel)?;
        self.predicates.insert(sym.to_string(), rel);
        Ok(())
    }

    /// Replace (or add) the interpretation of a relation symbol.
    pub fn set_relation(&mut self, sym: &str, rel: Relation) -> Result<(), ModelError> {
        self.check_within(&rel)?;
        self.predicates.remove(sym);
        self.relations.insert(sym.to_string(), rel);
        Ok(())
    }

    fn check_within(&self, rel: &Relation) -> Result<(), ModelError> {
        for e in rel.tuples().flatten() {
            if (*e as usize) >= self.names.len() {
                return Err(ModelError::OutsideDomain(*e));
            }
        }
        Ok(())
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> + '_ {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, &Relation)> + '_ {
        self.predicates.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl Interpretation for Structure {
    fn universe(&self) -> &[Elem] {
        &self.universe
    }

    fn relation(&self, sym: &str) -> Option<&Relation> {
        self.relations.get(sym).or_else(|| self.predicates.get(sym))
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_model(self))
    }
}

/// An interpretation layered over another one: the universe may be replaced
/// and extra relation symbols shadow the base.
pub struct Overlay<'a> {
    base: Option<&'a dyn Interpretation>,
    universe: Vec<Elem>,
    extra: BTreeMap<String, Relation>,
}

impl<'a> Overlay<'a> {
    /// Expand `base` with additional relations, keeping its universe.
    pub fn over(base: &'a dyn Interpretation) -> Self {
        Overlay {
            universe: base.universe().to_vec(),
            base: Some(base),
            extra: BTreeMap::new(),
        }
    }

    /// A bare structure `<universe, sym>` with a single relation.
    pub fn bare(universe: &[Elem]) -> Overlay<'static> {
        Overlay {
            base: None,
            universe: universe.to_vec(),
            extra: BTreeMap::new(),
        }
    }

    pub fn with(mut self, sym: &str, rel: Relation) -> Self {
        self.extra.insert(sym.to_string(), rel);
        self
    }

    pub fn set(&mut self, sym: &str, rel: Relation) {
        self.extra.insert(sym.to_string(), rel);
    }
}

impl Interpretation for Overlay<'_> {
    fn universe(&self) -> &[Elem] {
        &self.universe
    }

    fn relation(&self, sym: &str) -> Option<&Relation> {
        self.extra
            .get(sym)
            .or_else(|| self.base.and_then(|b| b.relation(sym)))
    }
}

/// All tuples of length `k` over `universe`, in lexicographic order.
pub fn all_tuples(universe: &[Elem], k: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::with_capacity(k)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * universe.len());
        for prefix in &out {
            for &e in universe {
                let mut t = prefix.clone();
                t.push(e);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_rejects_bad_domains() {
        assert_eq!(Structure::new(vec![]), Err(ModelError::EmptyDomain));
        assert_eq!(
            Structure::new(vec!["a".into(), "a".into()]),
            Err(ModelError::DuplicateElement("a".into()))
        );
    }

    #[test]
    fn relation_arity_is_enforced() {
        let mut r = Relation::empty(2);
        assert!(r.insert(vec![0, 1]).unwrap());
        assert!(!r.insert(vec![0, 1]).unwrap());
        assert!(matches!(r.insert(vec![0]), Err(ModelError::Arity { .. })));
    }

    #[test]
    fn structure_rejects_out_of_domain_tuples() {
        let mut m = Structure::canonical(2).unwrap();
        let r = Relation::from_tuples(1, [vec![2]]).unwrap();
        assert_eq!(m.add_relation("R", r), Err(ModelError::OutsideDomain(2)));
    }

    #[test]
    fn overlay_shadows_base() {
        let mut m = Structure::canonical(2).unwrap();
        m.add_relation("R", Relation::unary([0])).unwrap();
        let o = Overlay::over(&m).with("R", Relation::unary([1]));
        assert!(o.relation("R").unwrap().contains(&[1]));
        assert_eq!(o.universe(), &[0, 1]);
    }

    #[test]
    fn all_tuples_is_lexicographic() {
        assert_eq!(
            all_tuples(&[0, 1], 2),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(all_tuples(&[0, 1], 0), vec![Vec::<Elem>::new()]);
    }
}
