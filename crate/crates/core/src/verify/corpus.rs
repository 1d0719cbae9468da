//! Formula corpora: exhaustive small-depth enumeration over a fixed pool of
//! literals, plus seeded random formulas.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{vars, Var};
use crate::syntax::{parse_formula, Formula};

/// Signature of every corpus formula.
pub const SIGNATURE: [(&str, usize); 2] = [("P", 1), ("R", 2)];

pub fn corpus_vars() -> Vec<Var> {
    vars(&["x", "y"])
}

fn parse_all(texts: &[&str]) -> Vec<Formula> {
    texts
        .iter()
        .map(|t| parse_formula(t).expect("corpus literal parses"))
        .collect()
}

/// The four literals of the exhaustive corpus.
pub fn fo_pool() -> Vec<Formula> {
    parse_all(&["P(x)", "!P(y)", "R(x,y)", "x != y"])
}

/// A wider literal pool for random formulas.
pub fn fo_leaves() -> Vec<Formula> {
    parse_all(&["P(x)", "!P(x)", "P(y)", "!P(y)", "R(x,y)", "!R(x,y)", "R(y,x)", "x = y", "x != y"])
}

/// Dependency atoms mixed into the non-first-order corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomFamily {
    /// Constancy and functional dependence.
    Downwards,
    /// Inclusion.
    Union,
    /// Every standard atom with the empty team property.
    Etp,
}

impl AtomFamily {
    pub fn atoms(self) -> Vec<Formula> {
        match self {
            AtomFamily::Downwards => parse_all(&["#const(x)", "#const(y)", "#dep(x;y)", "#dep(y;x)"]),
            AtomFamily::Union => parse_all(&["#incl(x;y)", "#incl(y;x)"]),
            AtomFamily::Etp => parse_all(&["#const(x)", "#dep(x;y)", "#incl(y;x)", "#indep(x;;y)"]),
        }
    }
}

/// Every formula of depth at most `depth` built from `pool` with `∧`, `∨`
/// and the quantifiers over `vs`. Commutative pairs are generated once.
pub fn exhaustive(pool: &[Formula], depth: usize, vs: &[Var]) -> Vec<Formula> {
    let mut all = pool.to_vec();
    for _ in 0..depth {
        let prev = all.clone();
        for (i, a) in prev.iter().enumerate() {
            for b in &prev[i..] {
                all.push(Formula::and(a.clone(), b.clone()));
                all.push(Formula::or(a.clone(), b.clone()));
            }
        }
        for a in &prev {
            for v in vs {
                all.push(Formula::exists(v.clone(), a.clone()));
                all.push(Formula::forall(v.clone(), a.clone()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        all.retain(|f| seen.insert(f.clone()));
    }
    all
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize, leaves: &[Formula], vs: &[Var]) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaves.choose(rng).expect("nonempty pool").clone();
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 => Formula::and(random_formula(rng, d, leaves, vs), random_formula(rng, d, leaves, vs)),
        1 => Formula::or(random_formula(rng, d, leaves, vs), random_formula(rng, d, leaves, vs)),
        2 => Formula::exists(vs.choose(rng).expect("variables").clone(), random_formula(rng, d, leaves, vs)),
        _ => Formula::forall(vs.choose(rng).expect("variables").clone(), random_formula(rng, d, leaves, vs)),
    }
}

/// `count` random formulas of depth at most `depth`, deterministic in
/// `seed`.
pub fn random_formulas(seed: u64, count: usize, depth: usize, leaves: &[Formula], vs: &[Var]) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_formula(&mut rng, depth, leaves, vs)).collect()
}

/// Depth-2 exhaustive corpus over [`fo_pool`] followed by `random`
/// seeded formulas of depth at most 4.
pub fn fo_corpus(seed: u64, random: usize) -> Vec<Formula> {
    let vs = corpus_vars();
    let mut out = exhaustive(&fo_pool(), 2, &vs);
    out.extend(random_formulas(seed, random, 4, &fo_leaves(), &vs));
    out
}

/// Depth-1 exhaustive formulas over the literals and the atoms of
/// `family`, then `random` seeded formulas of depth at most 3 in which
/// every leaf is an atom with probability one half.
pub fn dep_corpus(family: AtomFamily, seed: u64, random: usize) -> Vec<Formula> {
    let vs = corpus_vars();
    let atoms = family.atoms();
    let mut pool = atoms.clone();
    pool.extend(fo_pool());
    let mut out = exhaustive(&pool, 1, &vs);
    let mut leaves = fo_leaves();
    while leaves.len() > atoms.len() {
        leaves.pop();
    }
    leaves.extend(atoms);
    out.extend(random_formulas(seed, random, 3, &leaves, &vs));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{dep_atoms, is_first_order};

    #[test]
    fn exhaustive_counts() {
        let vs = corpus_vars();
        let pool = fo_pool();
        // 4 literals, C(4,2)+4 unordered pairs per connective, 4 quantifiers each
        let l1 = exhaustive(&pool, 1, &vs);
        assert_eq!(l1.len(), 4 + 2 * 10 + 4 * 4);
        let l2 = exhaustive(&pool, 2, &vs);
        let n = l1.len();
        assert_eq!(l2.len(), n + 2 * (n * (n + 1) / 2) + 4 * n - (l1.len() - 4));
        assert!(l2.iter().all(is_first_order));
    }

    #[test]
    fn random_is_deterministic() {
        let a = fo_corpus(42, 200);
        let b = fo_corpus(42, 200);
        assert_eq!(a, b);
        assert_ne!(a, fo_corpus(43, 200));
    }

    #[test]
    fn dep_corpora_use_their_atoms() {
        for fam in [AtomFamily::Downwards, AtomFamily::Union, AtomFamily::Etp] {
            let c = dep_corpus(fam, 7, 50);
            let names: Vec<String> = fam.atoms().iter().flat_map(|f| dep_atoms(f).into_iter().map(|a| a.name.to_string())).collect();
            assert!(c.iter().any(|f| !dep_atoms(f).is_empty()));
            for f in &c {
                for a in dep_atoms(f) {
                    assert!(names.contains(&a.name.to_string()));
                }
            }
        }
    }
}
