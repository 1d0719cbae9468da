//! Dependency notions as semantic objects: a dependency is a class of
//! structures `<M, R>`, represented by a membership test on the relation
//! a team projects onto the atom's variables.

mod builtins;
mod closure;
mod file;

pub use builtins::{cex4_sentence, defining_sentence};
pub use closure::{
    check_closed_world, check_closure, check_iso_invariance, clamp_bound, classify, compute_dmax, dmax_dependency,
    verify_certs, Verdict, Witness, GUARD,
};
pub use file::parse_dep_file;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eval::{tarski_sentence, EvalError};
use crate::model::{Elem, Overlay, Relation, Team, Var};
use crate::syntax::{relation_symbols_classical, Classical, DepAtom, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepError {
    #[error("dependency {dep} has arity {expected}, got {got}")]
    Arity {
        dep: String,
        expected: usize,
        got: usize,
    },
    #[error("relation for {dep} draws from outside the domain")]
    OutsideDomain { dep: String },
    #[error("invalid split for {0}")]
    InvalidSplit(String),
    #[error("unknown dependency {0}")]
    Unknown(String),
    #[error("defining sentence must use only R/{arity}: {msg}")]
    Signature { arity: usize, msg: String },
    #[error("{m}^{k} exceeds the enumeration guard of {GUARD} tuples; use a smaller domain bound")]
    Guard { m: usize, k: usize },
    #[error("dependency {0} is already registered")]
    Duplicate(String),
    #[error("{dep} is not certified {property}")]
    NotCertified { dep: String, property: String },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("evaluating defining sentence: {0}")]
    Eval(Box<EvalError>),
}

impl From<EvalError> for DepError {
    fn from(e: EvalError) -> Self {
        DepError::Eval(Box::new(e))
    }
}

/// Closure properties a dependency may have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    EmptyTeam,
    Downwards,
    Upwards,
    Union,
    ClosedWorld,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::EmptyTeam,
        Property::Downwards,
        Property::Upwards,
        Property::Union,
        Property::ClosedWorld,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::EmptyTeam => "empty-team",
            Property::Downwards => "downwards",
            Property::Upwards => "upwards",
            Property::Union => "union",
            Property::ClosedWorld => "closed-world",
        }
    }

    pub fn parse(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertSource {
    /// Stated for a builtin; not machine-checked.
    Declared,
    /// Exhaustively checked on all domains up to `max_domain`.
    Verified { max_domain: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cert {
    pub holds: bool,
    pub source: CertSource,
}

pub type MembershipFn = dyn Fn(&[Elem], &Relation) -> Result<bool, DepError> + Send + Sync;

#[derive(Clone)]
enum Test {
    Const,
    Fdep(usize),
    Indep(usize, usize),
    Incl(usize),
    Nt,
    False,
    Fo(Classical),
    Custom(Arc<MembershipFn>),
}

struct Inner {
    name: String,
    atom: Arc<str>,
    groups: Vec<usize>,
    arity: usize,
    test: Test,
    certs: BTreeMap<Property, Cert>,
}

/// A dependency notion. Cheap to clone.
#[derive(Clone)]
pub struct Dependency(Arc<Inner>);

impl fmt::Debug for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dependency({})", self.0.name)
    }
}

fn declared(props: &[(Property, bool)]) -> BTreeMap<Property, Cert> {
    props
        .iter()
        .map(|&(p, holds)| {
            (
                p,
                Cert {
                    holds,
                    source: CertSource::Declared,
                },
            )
        })
        .collect()
}

impl Dependency {
    fn build(
        name: String,
        atom: &str,
        groups: Vec<usize>,
        test: Test,
        certs: BTreeMap<Property, Cert>,
    ) -> Dependency {
        Dependency(Arc::new(Inner {
            name,
            atom: Arc::from(atom),
            arity: groups.iter().sum(),
            groups,
            test,
            certs,
        }))
    }

    /// `=(z1..zk)`: at most one tuple.
    pub fn constancy(k: usize) -> Dependency {
        use Property::*;
        Dependency::build(
            format!("const/{k}"),
            "const",
            vec![k],
            Test::Const,
            declared(&[
                (EmptyTeam, true),
                (Downwards, true),
                (Upwards, false),
                (Union, false),
                (ClosedWorld, true),
            ]),
        )
    }

    /// `=(x; y)` with `|x| = j`, `|y| = l`.
    pub fn fdep(j: usize, l: usize) -> Dependency {
        use Property::*;
        Dependency::build(
            format!("dep({j};{l})"),
            "dep",
            vec![j, l],
            Test::Fdep(j),
            declared(&[
                (EmptyTeam, true),
                (Downwards, true),
                (Upwards, false),
                (Union, false),
                (ClosedWorld, true),
            ]),
        )
    }

    /// `x ⊥_y z` with group sizes `a`, `b`, `c`; tuples are laid out `x y z`.
    pub fn indep(a: usize, b: usize, c: usize) -> Dependency {
        use Property::*;
        Dependency::build(
            format!("indep({a};{b};{c})"),
            "indep",
            vec![a, b, c],
            Test::Indep(a, b),
            declared(&[
                (EmptyTeam, true),
                (Downwards, false),
                (Upwards, false),
                (Union, false),
                (ClosedWorld, true),
            ]),
        )
    }

    /// `x ⊆ y` with `|x| = |y| = k`.
    pub fn incl(k: usize) -> Dependency {
        use Property::*;
        Dependency::build(
            format!("incl({k})"),
            "incl",
            vec![k, k],
            Test::Incl(k),
            declared(&[
                (EmptyTeam, true),
                (Downwards, false),
                (Upwards, false),
                (Union, true),
                (ClosedWorld, true),
            ]),
        )
    }

    /// Non-totality: the unary relation is not the whole domain.
    pub fn nt() -> Dependency {
        use Property::*;
        Dependency::build(
            "nt".into(),
            "nt",
            vec![1],
            Test::Nt,
            declared(&[
                (EmptyTeam, true),
                (Downwards, true),
                (Upwards, false),
                (Union, false),
                (ClosedWorld, false),
            ]),
        )
    }

    /// The empty dependency: no relation belongs to it.
    pub fn falsum(k: usize) -> Dependency {
        use Property::*;
        Dependency::build(
            if k == 0 { "false".into() } else { format!("false/{k}") },
            "false",
            vec![k],
            Test::False,
            declared(&[
                (EmptyTeam, false),
                (Downwards, true),
                (Upwards, true),
                (Union, true),
                (ClosedWorld, true),
            ]),
        )
    }

    /// The 4-ary dependency axiomatising an infinite structure; empty on
    /// finite domains.
    pub fn cex4() -> Dependency {
        Dependency::fo("cex4", cex4_sentence(), 4).expect("cex4 sentence is well formed")
    }

    /// The dependency defined by a first-order sentence over `R/k`.
    pub fn fo(name: &str, phi: Classical, k: usize) -> Result<Dependency, DepError> {
        let syms = relation_symbols_classical(&phi).map_err(|e| DepError::Signature {
            arity: k,
            msg: e.to_string(),
        })?;
        for (sym, arity) in &syms {
            if sym != "R" || *arity != k {
                return Err(DepError::Signature {
                    arity: k,
                    msg: format!("unexpected symbol {sym}/{arity}"),
                });
            }
        }
        let free = crate::syntax::free_vars_classical(&phi);
        if !free.is_empty() {
            let names: Vec<&str> = free.iter().map(Var::as_str).collect();
            return Err(DepError::Signature {
                arity: k,
                msg: format!("free variables {}", names.join(" ")),
            });
        }
        Ok(Dependency::build(
            name.to_string(),
            name,
            vec![k],
            Test::Fo(phi),
            BTreeMap::new(),
        ))
    }

    /// A dependency given by an arbitrary membership test. It must not
    /// depend on anything but the isomorphism type of `<M, R>`.
    pub fn custom(name: &str, k: usize, test: Arc<MembershipFn>) -> Dependency {
        Dependency::build(
            name.to_string(),
            name,
            vec![k],
            Test::Custom(test),
            BTreeMap::new(),
        )
    }

    /// Resolve a CLI-style name: `const/1`, `const/k`, `dep(j;l)`,
    /// `indep(a;b;c)`, `incl(k)`, `nt`, `cex4`, `false`.
    pub fn builtin(name: &str) -> Result<Dependency, DepError> {
        let bad = || DepError::InvalidSplit(name.to_string());
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        let args = |s: &str, prefix: &str| -> Option<String> {
            s.strip_prefix(prefix)?
                .strip_suffix(')')
                .map(str::to_string)
        };
        if let Some(k) = name.strip_prefix("const/") {
            return Ok(Dependency::constancy(num(k)?));
        }
        if let Some(a) = args(name, "dep(") {
            let parts: Vec<&str> = a.split(';').collect();
            if parts.len() != 2 {
                return Err(bad());
            }
            return Ok(Dependency::fdep(num(parts[0])?, num(parts[1])?));
        }
        if let Some(a) = args(name, "indep(") {
            let parts: Vec<&str> = a.split(';').collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            return Ok(Dependency::indep(num(parts[0])?, num(parts[1])?, num(parts[2])?));
        }
        if let Some(a) = args(name, "incl(") {
            return Ok(Dependency::incl(num(&a)?));
        }
        if let Some(k) = name.strip_prefix("false/") {
            return Ok(Dependency::falsum(num(k)?));
        }
        match name {
            "nt" => Ok(Dependency::nt()),
            "cex4" => Ok(Dependency::cex4()),
            "false" => Ok(Dependency::falsum(0)),
            _ => Err(DepError::Unknown(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    /// The name used in `#name(...)` atoms.
    pub fn atom_name(&self) -> &str {
        &self.0.atom
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn groups(&self) -> &[usize] {
        &self.0.groups
    }

    /// The defining sentence, for dependencies given by one.
    pub fn sentence(&self) -> Option<&Classical> {
        match &self.0.test {
            Test::Fo(phi) => Some(phi),
            _ => None,
        }
    }

    pub fn cert(&self, p: Property) -> Option<Cert> {
        self.0.certs.get(&p).copied()
    }

    /// Whether `p` is known (declared or verified) to hold.
    pub fn certified(&self, p: Property) -> bool {
        self.cert(p).is_some_and(|c| c.holds)
    }

    pub fn with_cert(&self, p: Property, cert: Cert) -> Dependency {
        let mut certs = self.0.certs.clone();
        certs.insert(p, cert);
        Dependency(Arc::new(Inner {
            name: self.0.name.clone(),
            atom: self.0.atom.clone(),
            groups: self.0.groups.clone(),
            arity: self.0.arity,
            test: self.0.test.clone(),
            certs,
        }))
    }

    /// Same dependency under another name, with no certificates.
    pub fn renamed(&self, name: &str) -> Dependency {
        Dependency(Arc::new(Inner {
            name: name.to_string(),
            atom: Arc::from(name),
            groups: vec![self.0.arity],
            arity: self.0.arity,
            test: self.0.test.clone(),
            certs: BTreeMap::new(),
        }))
    }

    /// `<M, R> ∈ D`.
    pub fn holds(&self, universe: &[Elem], r: &Relation) -> Result<bool, DepError> {
        if r.arity() != self.0.arity {
            return Err(DepError::Arity {
                dep: self.0.name.clone(),
                expected: self.0.arity,
                got: r.arity(),
            });
        }
        if !r.within(universe) {
            return Err(DepError::OutsideDomain {
                dep: self.0.name.clone(),
            });
        }
        self.holds_unchecked(universe, r)
    }

    pub(crate) fn holds_unchecked(&self, universe: &[Elem], r: &Relation) -> Result<bool, DepError> {
        Ok(match &self.0.test {
            Test::Const => r.len() <= 1,
            Test::Fdep(j) => {
                let ts: Vec<&Vec<Elem>> = r.tuples().collect();
                // Tuples are sorted, so tuples sharing a prefix are adjacent.
                ts.windows(2).all(|w| w[0][..*j] != w[1][..*j])
            }
            Test::Indep(a, b) => {
                let (a, b) = (*a, *b);
                r.tuples().all(|s| {
                    r.tuples().all(|t| {
                        if s[a..a + b] != t[a..a + b] {
                            return true;
                        }
                        let mut u = s[..a + b].to_vec();
                        u.extend_from_slice(&t[a + b..]);
                        r.contains(&u)
                    })
                })
            }
            Test::Incl(k) => {
                let k = *k;
                let second: std::collections::BTreeSet<&[Elem]> =
                    r.tuples().map(|t| &t[k..]).collect();
                r.tuples().all(|t| second.contains(&t[..k]))
            }
            Test::Nt => r.len() < universe.len(),
            Test::False => false,
            Test::Fo(phi) => {
                let m = Overlay::bare(universe).with("R", r.clone());
                tarski_sentence(&m, phi)?
            }
            Test::Custom(f) => f(universe, r)?,
        })
    }

    /// The atom `#name(v)`, splitting `v` into this dependency's groups.
    pub fn atom(&self, v: &[Var]) -> Result<Formula, DepError> {
        if v.len() != self.0.arity {
            return Err(DepError::Arity {
                dep: self.0.name.clone(),
                expected: self.0.arity,
                got: v.len(),
            });
        }
        let mut groups = Vec::new();
        let mut at = 0;
        for &g in &self.0.groups {
            groups.push(v[at..at + g].to_vec());
            at += g;
        }
        Ok(Formula::Dep(DepAtom::new(&self.0.atom, groups)))
    }

    /// `X(v) ⊆ P` and `<P, X(v)> ∈ D`.
    pub fn relativized_holds(&self, p: &[Elem], x: &Team, v: &[Var]) -> Result<bool, DepError> {
        let r = x
            .project(v)
            .map_err(|_| DepError::Unknown(format!("variables of {}", self.0.name)))?;
        if !r.within(p) {
            return Ok(false);
        }
        self.holds(p, &r)
    }
}

/// The dependencies an evaluation may use, keyed by atom name.
#[derive(Clone, Default)]
pub struct Registry {
    user: BTreeMap<String, Dependency>,
}

const BUILTIN_ATOMS: [&str; 7] = ["const", "dep", "indep", "incl", "nt", "cex4", "false"];

impl Registry {
    /// Builtins only.
    pub fn standard() -> Registry {
        Registry::default()
    }

    /// Add a user dependency; its atom name must be new.
    pub fn register(&mut self, d: Dependency) -> Result<(), DepError> {
        let name = d.atom_name().to_string();
        if BUILTIN_ATOMS.contains(&name.as_str()) || self.user.contains_key(&name) {
            return Err(DepError::Duplicate(name));
        }
        self.user.insert(name, d);
        Ok(())
    }

    pub fn with(mut self, d: Dependency) -> Result<Registry, DepError> {
        self.register(d)?;
        Ok(self)
    }

    pub fn user(&self) -> impl Iterator<Item = &Dependency> + '_ {
        self.user.values()
    }

    /// A dependency by CLI name: a builtin name or a registered atom name.
    pub fn lookup(&self, name: &str) -> Result<Dependency, DepError> {
        match self.user.get(name) {
            Some(d) => Ok(d.clone()),
            None => Dependency::builtin(name),
        }
    }

    /// The dependency an atom refers to.
    pub fn resolve(&self, atom: &DepAtom) -> Result<Dependency, DepError> {
        let sizes = atom.group_sizes();
        let split = || DepError::InvalidSplit(atom.to_string());
        let d = match &*atom.name {
            "const" => match sizes[..] {
                [k] => Dependency::constancy(k),
                _ => return Err(split()),
            },
            "dep" => match sizes[..] {
                [j, l] => Dependency::fdep(j, l),
                _ => return Err(split()),
            },
            "indep" => match sizes[..] {
                [a, b, c] => Dependency::indep(a, b, c),
                _ => return Err(split()),
            },
            "incl" => match sizes[..] {
                [a, b] if a == b => Dependency::incl(a),
                _ => return Err(split()),
            },
            "nt" => match sizes[..] {
                [1] => Dependency::nt(),
                _ => return Err(split()),
            },
            "cex4" => match sizes[..] {
                [4] => Dependency::cex4(),
                _ => return Err(split()),
            },
            "false" => Dependency::falsum(atom.arity()),
            name => {
                let d = self
                    .user
                    .get(name)
                    .ok_or_else(|| DepError::Unknown(name.to_string()))?;
                if d.arity() != atom.arity() {
                    return Err(DepError::Arity {
                        dep: name.to_string(),
                        expected: d.arity(),
                        got: atom.arity(),
                    });
                }
                d.clone()
            }
        };
        Ok(d)
    }

    /// Check that every atom of `f` resolves.
    pub fn validate(&self, f: &Formula) -> Result<(), DepError> {
        for a in crate::syntax::dep_atoms(f) {
            self.resolve(a)?;
        }
        Ok(())
    }
}
