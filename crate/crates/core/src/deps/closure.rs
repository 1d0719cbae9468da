//! Exhaustive classification of dependencies over small canonical domains.
//! A relation over `n` elements is a bitmask over the lexicographically
//! ordered tuples of `{0..n-1}^k`.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;

use super::{Cert, CertSource, DepError, Dependency, Property};
use crate::model::{all_tuples, Elem, Relation};

/// Largest number of tuples `m^k` enumerated (2^16 relations).
pub const GUARD: usize = 16;

/// A counterexample to a closure property. For downwards and upwards
/// closure `q` is the subset or superset of `r` that falls outside the
/// dependency; for union closure `r ∪ q` does; for closed-world `q` is
/// absent and `r` behaves differently on its active domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub domain: usize,
    pub r: Relation,
    pub q: Option<Relation>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|M|={} R={:?}", self.domain, self.r)?;
        if let Some(q) = &self.q {
            write!(f, " Q={q:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub holds: bool,
    /// Largest domain size checked.
    pub bound: usize,
    pub witness: Option<Witness>,
}

struct Table {
    tuples: Vec<Vec<Elem>>,
    member: Vec<bool>,
}

impl Table {
    fn build(d: &Dependency, universe: &[Elem]) -> Result<Table, DepError> {
        let k = d.arity();
        let tuples = all_tuples(universe, k);
        if tuples.len() > GUARD {
            return Err(DepError::Guard {
                m: universe.len(),
                k,
            });
        }
        let member = (0u32..1 << tuples.len())
            .into_par_iter()
            .map(|mask| d.holds_unchecked(universe, &relation(&tuples, k, mask)))
            .collect::<Result<Vec<bool>, DepError>>()?;
        Ok(Table {
            tuples,
            member,
        })
    }

    fn canonical(d: &Dependency, n: usize) -> Result<Table, DepError> {
        let u: Vec<Elem> = (0..n as Elem).collect();
        Table::build(d, &u)
    }

    fn rel(&self, mask: u32, k: usize) -> Relation {
        relation(&self.tuples, k, mask)
    }

    fn masks(&self) -> u32 {
        1 << self.tuples.len()
    }

    fn is_member(&self, mask: u32) -> bool {
        self.member[mask as usize]
    }
}

fn relation(tuples: &[Vec<Elem>], k: usize, mask: u32) -> Relation {
    let mut r = Relation::empty(k);
    for (i, t) in tuples.iter().enumerate() {
        if mask >> i & 1 == 1 {
            r.insert(t.clone()).expect("arity matches");
        }
    }
    r
}

fn check_guard(k: usize, m: usize) -> Result<(), DepError> {
    if m == 0 {
        return Err(DepError::Guard { m, k });
    }
    match m.checked_pow(k as u32) {
        Some(n) if n <= GUARD => Ok(()),
        _ => Err(DepError::Guard { m, k }),
    }
}

/// Largest `m' <= m` whose relation enumeration fits the guard.
pub fn clamp_bound(k: usize, m: usize) -> usize {
    (1..=m).rev().find(|&n| check_guard(k, n).is_ok()).unwrap_or(1)
}

/// First mask in `0..limit` for which `bad` finds a partner, scanning in
/// parallel but reporting the least.
fn first_failure(limit: u32, bad: impl Fn(u32) -> Option<u32> + Sync) -> Option<(u32, u32)> {
    (0..limit)
        .into_par_iter()
        .find_map_first(|mask| bad(mask).map(|q| (mask, q)))
}

/// Exhaustively check a closure property over all canonical domains of
/// size `1..=m`.
pub fn check_closure(d: &Dependency, p: Property, m: usize) -> Result<Verdict, DepError> {
    if p == Property::ClosedWorld {
        return check_closed_world(d, m);
    }
    let k = d.arity();
    check_guard(k, m)?;
    for n in 1..=m {
        let t = Table::canonical(d, n)?;
        let width = t.tuples.len();
        let found = match p {
            Property::EmptyTeam => (!t.is_member(0)).then_some((0, None)),
            Property::Downwards => first_failure(t.masks(), |mask| {
                if !t.is_member(mask) {
                    return None;
                }
                (0..width)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| mask & !(1 << i))
                    .find(|&q| !t.is_member(q))
            })
            .map(|(r, q)| (r, Some(q))),
            Property::Upwards => upwards_failure(&t).map(|(r, q)| (r, Some(q))),
            Property::Union => {
                if upwards_failure(&t).is_none() {
                    None
                } else {
                    let members: Vec<u32> = (0..t.masks()).filter(|&m| t.is_member(m)).collect();
                    (0..members.len())
                        .into_par_iter()
                        .find_map_first(|i| {
                            members[i + 1..]
                                .iter()
                                .find(|&&b| !t.is_member(members[i] | b))
                                .map(|&b| (members[i], b))
                        })
                        .map(|(r, q)| (r, Some(q)))
                }
            }
            Property::ClosedWorld => unreachable!(),
        };
        if let Some((r, q)) = found {
            return Ok(Verdict {
                property: p,
                holds: false,
                bound: m,
                witness: Some(Witness {
                    domain: n,
                    r: t.rel(r, k),
                    q: q.map(|q| t.rel(q, k)),
                }),
            });
        }
    }
    Ok(Verdict {
        property: p,
        holds: true,
        bound: m,
        witness: None,
    })
}

fn upwards_failure(t: &Table) -> Option<(u32, u32)> {
    let width = t.tuples.len();
    first_failure(t.masks(), |mask| {
        if !t.is_member(mask) {
            return None;
        }
        (0..width)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| mask | 1 << i)
            .find(|&q| !t.is_member(q))
    })
}

/// Compare membership on each domain with membership on the active domain
/// of the relation. The empty relation is skipped: its active domain is
/// empty and so is not a structure.
pub fn check_closed_world(d: &Dependency, m: usize) -> Result<Verdict, DepError> {
    let k = d.arity();
    check_guard(k, m)?;
    for n in 1..=m {
        let t = Table::canonical(d, n)?;
        let bad = (1..t.masks()).into_par_iter().find_map_first(|mask| {
            let r = t.rel(mask, k);
            match d.holds_unchecked(&r.active_domain(), &r) {
                Ok(v) if v == t.is_member(mask) => None,
                other => Some(other.map(|_| mask)),
            }
        });
        if let Some(found) = bad {
            let mask = found?;
            return Ok(Verdict {
                property: Property::ClosedWorld,
                holds: false,
                bound: m,
                witness: Some(Witness {
                    domain: n,
                    r: t.rel(mask, k),
                    q: None,
                }),
            });
        }
    }
    Ok(Verdict {
        property: Property::ClosedWorld,
        holds: true,
        bound: m,
        witness: None,
    })
}

/// All five properties, each at the largest bound `<= m` the guard admits.
pub fn classify(d: &Dependency, m: usize) -> Result<Vec<Verdict>, DepError> {
    let bound = clamp_bound(d.arity(), m);
    Property::ALL
        .iter()
        .map(|&p| check_closure(d, p, bound))
        .collect()
}

/// Attach verified certificates for every property.
pub fn verify_certs(d: &Dependency, m: usize) -> Result<Dependency, DepError> {
    let mut out = d.clone();
    for v in classify(d, m)? {
        out = out.with_cert(
            v.property,
            Cert {
                holds: v.holds,
                source: CertSource::Verified {
                    max_domain: v.bound,
                },
            },
        );
    }
    Ok(out)
}

/// Look for a permutation of a canonical domain that changes membership.
/// Returns the first offending relation and its image.
pub fn check_iso_invariance(d: &Dependency, m: usize) -> Result<Option<Witness>, DepError> {
    let k = d.arity();
    let m = clamp_bound(k, m);
    for n in 1..=m {
        let t = Table::canonical(d, n)?;
        let index = |tuple: &[Elem]| t.tuples.iter().position(|u| u == tuple).expect("tuple");
        for perm in (0..n as Elem).permutations(n) {
            let image: Vec<usize> = t
                .tuples
                .iter()
                .map(|tu| index(&tu.iter().map(|&e| perm[e as usize]).collect::<Vec<_>>()))
                .collect();
            let bad = first_failure(t.masks(), |mask| {
                let mut q = 0u32;
                for (i, &j) in image.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        q |= 1 << j;
                    }
                }
                (t.is_member(mask) != t.is_member(q)).then_some(q)
            });
            if let Some((r, q)) = bad {
                return Ok(Some(Witness {
                    domain: n,
                    r: t.rel(r, k),
                    q: Some(t.rel(q, k)),
                }));
            }
        }
    }
    Ok(None)
}

fn maximal_masks(t: &Table) -> Vec<u32> {
    let full = t.masks() - 1;
    (0..t.masks())
        .into_par_iter()
        .filter(|&mask| {
            if !t.is_member(mask) {
                return false;
            }
            let comp = full & !mask;
            let mut sub = comp;
            while sub != 0 {
                if t.is_member(mask | sub) {
                    return false;
                }
                sub = (sub - 1) & comp;
            }
            true
        })
        .collect()
}

/// The ⊆-maximal relations over `universe` that belong to `d`.
pub fn compute_dmax(d: &Dependency, universe: &[Elem]) -> Result<Vec<Relation>, DepError> {
    let t = Table::build(d, universe)?;
    Ok(maximal_masks(&t)
        .into_iter()
        .map(|m| t.rel(m, d.arity()))
        .collect())
}

/// `D_max`: the relations that belong to `d` and have no proper superset in
/// `d`, registered under `name`.
pub fn dmax_dependency(d: &Dependency, name: &str) -> Dependency {
    let base = d.clone();
    let k = d.arity();
    let test = move |universe: &[Elem], r: &Relation| -> Result<bool, DepError> {
        if !base.holds_unchecked(universe, r)? {
            return Ok(false);
        }
        let tuples = all_tuples(universe, k);
        let missing: Vec<&Vec<Elem>> = tuples.iter().filter(|t| !r.contains(t)).collect();
        if missing.len() > 24 {
            return Err(DepError::Guard {
                m: universe.len(),
                k,
            });
        }
        for sub in 1u32..1 << missing.len() {
            let mut s = r.clone();
            for (i, t) in missing.iter().enumerate() {
                if sub >> i & 1 == 1 {
                    s.insert((*t).clone()).expect("arity matches");
                }
            }
            if base.holds_unchecked(universe, &s)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    Dependency::custom(name, k, Arc::new(test))
}
