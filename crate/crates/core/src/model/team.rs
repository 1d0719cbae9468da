use std::fmt;

use super::{all_tuples, Assignment, Elem, ModelError, Relation, Var};

/// A finite set of assignments over a common variable domain.
///
/// Teams are kept canonical: variables sorted, rows sorted and deduplicated,
/// each row aligned with the variable list. Two teams are equal iff they
/// denote the same set of assignments over the same domain.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Team {
    vars: Vec<Var>,
    rows: Vec<Vec<Elem>>,
}

impl Team {
    /// Build a team from rows aligned with `vars` (any order, duplicates allowed).
    pub fn new(vars: Vec<Var>, rows: Vec<Vec<Elem>>) -> Result<Team, ModelError> {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&a, &b| vars[a].cmp(&vars[b]));
        for w in order.windows(2) {
            if vars[w[0]] == vars[w[1]] {
                return Err(ModelError::DuplicateVariable(vars[w[0]].clone()));
            }
        }
        let mut out_rows = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != vars.len() {
                return Err(ModelError::Arity {
                    expected: vars.len(),
                    got: row.len(),
                    tuple: row,
                });
            }
            out_rows.push(order.iter().map(|&i| row[i]).collect());
        }
        let sorted_vars = order.iter().map(|&i| vars[i].clone()).collect();
        Ok(Team::from_canonical_parts(sorted_vars, out_rows))
    }

    /// `vars` must already be sorted and distinct; rows are sorted here.
    pub(crate) fn from_canonical_parts(vars: Vec<Var>, mut rows: Vec<Vec<Elem>>) -> Team {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        rows.sort_unstable();
        rows.dedup();
        Team { vars, rows }
    }

    /// The empty team over `vars`.
    pub fn empty(vars: Vec<Var>) -> Result<Team, ModelError> {
        Team::new(vars, vec![])
    }

    /// `{ε}`: the team holding only the empty assignment.
    pub fn unit() -> Team {
        Team {
            vars: vec![],
            rows: vec![vec![]],
        }
    }

    /// The full team `M^vars`.
    pub fn full(vars: Vec<Var>, universe: &[Elem]) -> Result<Team, ModelError> {
        let k = vars.len();
        Team::new(vars, all_tuples(universe, k))
    }

    pub fn from_assignments<I>(vars: Vec<Var>, rows: I) -> Result<Team, ModelError>
    where
        I: IntoIterator<Item = Assignment>,
    {
        let mut out = Vec::new();
        for a in rows {
            let mut row = Vec::with_capacity(vars.len());
            for v in &vars {
                row.push(*a.get(v).ok_or_else(|| ModelError::UnknownVariable(v.clone()))?);
            }
            if a.len() != vars.len() {
                return Err(ModelError::NotASubdomain(a.keys().cloned().collect()));
            }
            out.push(row);
        }
        Team::new(vars, out)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, v: &Var) -> Option<usize> {
        self.vars.binary_search(v).ok()
    }

    fn columns(&self, vs: &[Var]) -> Result<Vec<usize>, ModelError> {
        vs.iter()
            .map(|v| self.column(v).ok_or_else(|| ModelError::UnknownVariable(v.clone())))
            .collect()
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.rows
            .iter()
            .map(move |r| self.vars.iter().cloned().zip(r.iter().copied()).collect())
    }

    /// `X(v)`: the relation `{ s(v) : s ∈ X }`. Variables may repeat.
    pub fn project(&self, vs: &[Var]) -> Result<Relation, ModelError> {
        let cols = self.columns(vs)?;
        let tuples = self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect());
        Relation::from_tuples(vs.len(), tuples)
    }

    /// `X|V`: every row cut down to the variables in `vs`.
    pub fn restrict(&self, vs: &[Var]) -> Result<Team, ModelError> {
        let mut keep: Vec<Var> = vs.to_vec();
        keep.sort();
        keep.dedup();
        let missing: Vec<Var> = keep.iter().filter(|v| self.column(v).is_none()).cloned().collect();
        if !missing.is_empty() {
            return Err(ModelError::NotASubdomain(missing));
        }
        Ok(self.restrict_unchecked(&keep))
    }

    /// Restriction to a sorted, distinct subset of the domain. Variables not in
    /// the domain are skipped.
    pub(crate) fn restrict_unchecked(&self, sorted: &[Var]) -> Team {
        if sorted.len() == self.vars.len() {
            return self.clone();
        }
        let mut cols = Vec::with_capacity(sorted.len());
        let mut kept = Vec::with_capacity(sorted.len());
        for v in sorted {
            if let Some(c) = self.column(v) {
                cols.push(c);
                kept.push(v.clone());
            }
        }
        if kept.len() == self.vars.len() {
            return self.clone();
        }
        let rows = self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        Team::from_canonical_parts(kept, rows)
    }

    /// Keep the rows at the given positions.
    pub fn subteam(&self, keep: impl Fn(usize) -> bool) -> Team {
        Team {
            vars: self.vars.clone(),
            rows: self
                .rows
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, r)| r.clone())
                .collect(),
        }
    }

    /// Rows selected by bit `i` of `mask` (teams with at most 64 rows).
    pub fn submask(&self, mask: u64) -> Team {
        self.subteam(|i| mask >> i & 1 == 1)
    }

    pub fn filter(&self, mut keep: impl FnMut(&[Elem]) -> bool) -> Team {
        Team {
            vars: self.vars.clone(),
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
        }
    }

    pub fn union(&self, other: &Team) -> Result<Team, ModelError> {
        if self.vars != other.vars {
            return Err(ModelError::NotASubdomain(other.vars.clone()));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Team::from_canonical_parts(self.vars.clone(), rows))
    }

    pub fn is_subteam(&self, other: &Team) -> bool {
        self.vars == other.vars && self.rows.iter().all(|r| other.rows.binary_search(r).is_ok())
    }

    fn supplement_layout(&self, vs: &[Var]) -> Result<(Vec<Var>, Vec<Slot>), ModelError> {
        for (i, v) in vs.iter().enumerate() {
            if vs[..i].contains(v) {
                return Err(ModelError::DuplicateVariable(v.clone()));
            }
        }
        let mut all: Vec<Var> = self.vars.clone();
        all.extend(vs.iter().cloned());
        all.sort();
        all.dedup();
        let slots = all
            .iter()
            .map(|v| match vs.iter().position(|w| w == v) {
                Some(j) => Slot::New(j),
                None => Slot::Old(self.column(v).expect("old variable")),
            })
            .collect();
        Ok((all, slots))
    }

    /// `X[H/v]`: row `i` is extended with every tuple in `h[i]`.
    pub fn supplement(&self, h: &[Vec<Vec<Elem>>], vs: &[Var]) -> Result<Team, ModelError> {
        if h.len() != self.rows.len() {
            return Err(ModelError::SupplementShape {
                expected: self.rows.len(),
                got: h.len(),
            });
        }
        let (all, slots) = self.supplement_layout(vs)?;
        let mut rows = Vec::new();
        for (i, (row, values)) in self.rows.iter().zip(h).enumerate() {
            if values.is_empty() {
                return Err(ModelError::EmptySupplement { row: i });
            }
            for m in values {
                if m.len() != vs.len() {
                    return Err(ModelError::Arity {
                        expected: vs.len(),
                        got: m.len(),
                        tuple: m.clone(),
                    });
                }
                rows.push(fill(&slots, row, m));
            }
        }
        Ok(Team::from_canonical_parts(all, rows))
    }

    /// `X[m/v]` for a single fixed tuple.
    pub fn supplement_const(&self, m: &[Elem], vs: &[Var]) -> Result<Team, ModelError> {
        let h = vec![vec![m.to_vec()]; self.rows.len()];
        self.supplement(&h, vs)
    }

    /// `X[M/v]`: every row extended with every tuple over `universe`.
    pub fn duplicate(&self, vs: &[Var], universe: &[Elem]) -> Result<Team, ModelError> {
        let (all, slots) = self.supplement_layout(vs)?;
        let tuples = all_tuples(universe, vs.len());
        let mut rows = Vec::with_capacity(self.rows.len() * tuples.len());
        for row in &self.rows {
            for m in &tuples {
                rows.push(fill(&slots, row, m));
            }
        }
        Ok(Team::from_canonical_parts(all, rows))
    }

    /// Domain of `X[H/v]` and where each of its columns comes from.
    pub(crate) fn extension_layout(&self, vs: &[Var]) -> Result<(Vec<Var>, Vec<Slot>), ModelError> {
        self.supplement_layout(vs)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Slot {
    Old(usize),
    New(usize),
}

pub(crate) fn fill(slots: &[Slot], row: &[Elem], m: &[Elem]) -> Vec<Elem> {
    slots
        .iter()
        .map(|s| match *s {
            Slot::Old(c) => row[c],
            Slot::New(j) => m[j],
        })
        .collect()
}

impl fmt::Debug for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Team[")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]{{")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            if r.is_empty() {
                write!(f, "ε")?;
            }
            for (j, e) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
        }
        write!(f, "}}")
    }
}

/// Every `X[H/v]` for nonempty `H(s) ⊆ M^k`, as an odometer over per-row
/// subset masks. The first row varies slowest.
pub struct LaxSupplements {
    base: Team,
    all: Vec<Var>,
    slots: Vec<Slot>,
    tuples: Vec<Vec<Elem>>,
    masks: Vec<u64>,
    limit: u64,
    done: bool,
}

impl Iterator for LaxSupplements {
    type Item = Team;

    fn next(&mut self) -> Option<Team> {
        if self.done {
            return None;
        }
        let mut rows = Vec::new();
        for (row, &mask) in self.base.rows.iter().zip(&self.masks) {
            for (j, m) in self.tuples.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    rows.push(fill(&self.slots, row, m));
                }
            }
        }
        let out = Team::from_canonical_parts(self.all.clone(), rows);
        // advance: last row fastest
        let mut i = self.masks.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.masks[i] < self.limit {
                self.masks[i] += 1;
                break;
            }
            self.masks[i] = 1;
        }
        Some(out)
    }
}

/// Stream every lax supplementation `X[H/v]` of `x` over `universe`.
///
/// The count is `∏_{s∈X} (2^{|M|^k} - 1)`; `|M|^k` must be at most 63.
pub fn enumerate_lax_supplements(
    x: &Team,
    vs: &[Var],
    universe: &[Elem],
) -> Result<LaxSupplements, ModelError> {
    let (all, slots) = x.supplement_layout(vs)?;
    let tuples = all_tuples(universe, vs.len());
    assert!(tuples.len() < 64, "too many candidate tuples for a mask");
    let limit = (1u64 << tuples.len()) - 1;
    Ok(LaxSupplements {
        masks: vec![1; x.len()],
        done: limit == 0 && !x.is_empty(),
        base: x.clone(),
        all,
        slots,
        tuples,
        limit,
    })
}

/// Every pair `(Y, Z)` with `Y ∪ Z = X`, labelling each row as left, right
/// or both. There are `3^|X|` pairs.
pub fn enumerate_covers(x: &Team) -> impl Iterator<Item = (Team, Team)> + '_ {
    let n = x.len() as u32;
    let total = 3u64.pow(n);
    (0..total).map(move |code| {
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut c = code;
        for row in &x.rows {
            match c % 3 {
                0 => left.push(row.clone()),
                1 => right.push(row.clone()),
                _ => {
                    left.push(row.clone());
                    right.push(row.clone());
                }
            }
            c /= 3;
        }
        (
            Team {
                vars: x.vars.clone(),
                rows: left,
            },
            Team {
                vars: x.vars.clone(),
                rows: right,
            },
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vars;
    use std::collections::BTreeSet;

    fn team(vs: &[&str], rows: &[&[Elem]]) -> Team {
        Team::new(vars(vs), rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// X over v0 with s0 = 0, s1 = 1.
    fn two_row_x() -> Team {
        team(&["v0"], &[&[0], &[1]])
    }

    #[test]
    fn canonicalizes_column_order() {
        let a = team(&["y", "x"], &[&[1, 0]]);
        let b = team(&["x", "y"], &[&[0, 1]]);
        assert_eq!(a, b);
    }

    #[test]
    fn project_empty_team_is_empty() {
        let x = Team::empty(vars(&["x"])).unwrap();
        assert!(x.project(&vars(&["x"])).unwrap().is_empty());
    }

    #[test]
    fn project_repeated_variable_lands_on_diagonal() {
        let x = team(&["x", "y"], &[&[0, 1], &[1, 1], &[2, 0]]);
        let r = x.project(&vars(&["x", "x"])).unwrap();
        assert!(r.tuples().all(|t| t[0] == t[1]));
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn project_unknown_variable_is_named() {
        let x = team(&["x"], &[&[0]]);
        assert_eq!(
            x.project(&vars(&["z"])),
            Err(ModelError::UnknownVariable(Var::new("z")))
        );
    }

    #[test]
    fn restrict_deduplicates() {
        let x = team(&["x", "y"], &[&[0, 0], &[0, 1]]);
        let r = x.restrict(&vars(&["x"])).unwrap();
        assert_eq!(r, team(&["x"], &[&[0]]));
    }

    #[test]
    fn restrict_to_everything_is_identity() {
        let x = team(&["x", "y"], &[&[0, 0], &[1, 1]]);
        assert_eq!(x.restrict(&vars(&["y", "x"])).unwrap(), x);
    }

    #[test]
    fn restrict_to_nothing_gives_unit() {
        let x = team(&["x", "y"], &[&[0, 0], &[1, 1]]);
        assert_eq!(x.restrict(&[]).unwrap(), Team::unit());
        let empty = Team::empty(vars(&["x"])).unwrap();
        assert_eq!(empty.restrict(&[]).unwrap(), Team::empty(vec![]).unwrap());
    }

    #[test]
    fn restrict_outside_domain_fails() {
        let x = team(&["x"], &[&[0]]);
        assert!(matches!(
            x.restrict(&vars(&["y"])),
            Err(ModelError::NotASubdomain(_))
        ));
    }

    #[test]
    fn supplement_per_row_sets() {
        let x = two_row_x();
        let h = vec![vec![vec![1, 0]], vec![vec![0, 0], vec![0, 1]]];
        let y = x.supplement(&h, &vars(&["v1", "v2"])).unwrap();
        let expected = team(
            &["v0", "v1", "v2"],
            &[&[0, 1, 0], &[1, 0, 0], &[1, 0, 1]],
        );
        assert_eq!(y, expected);
    }

    #[test]
    fn duplicate_two_vars_gives_eight_rows() {
        let y = two_row_x().duplicate(&vars(&["v1", "v2"]), &[0, 1]).unwrap();
        assert_eq!(y.len(), 8);
        let expected: Vec<Vec<Elem>> = (0..8u8)
            .map(|i| vec![i >> 2 & 1, i >> 1 & 1, i & 1])
            .collect();
        assert_eq!(y.rows(), expected.as_slice());
    }

    #[test]
    fn constant_supplement_never_grows() {
        let x = team(&["x", "y"], &[&[0, 0], &[0, 1], &[1, 1]]);
        let y = x.supplement_const(&[0], &vars(&["y"])).unwrap();
        assert!(y.len() <= x.len());
        assert_eq!(y, team(&["x", "y"], &[&[0, 0], &[1, 0]]));
    }

    #[test]
    fn supplement_errors() {
        let x = two_row_x();
        assert_eq!(
            x.supplement(&[vec![vec![0]], vec![]], &vars(&["a"])),
            Err(ModelError::EmptySupplement { row: 1 })
        );
        assert!(matches!(
            x.supplement(&[vec![vec![0, 0]], vec![vec![0, 0]]], &vars(&["a", "a"])),
            Err(ModelError::DuplicateVariable(_))
        ));
        let empty = Team::empty(vars(&["x"])).unwrap();
        assert!(empty.supplement(&[], &vars(&["y"])).unwrap().is_empty());
    }

    #[test]
    fn duplicate_unit() {
        let y = Team::unit().duplicate(&vars(&["x"]), &[0, 1]).unwrap();
        assert_eq!(y, team(&["x"], &[&[0], &[1]]));
    }

    #[test]
    fn duplicate_over_existing_variable_matches_full_supplement() {
        let universe = [0, 1, 2];
        let x = team(&["x", "y"], &[&[0, 0], &[1, 2], &[2, 2]]);
        let dup = x.duplicate(&vars(&["y"]), &universe).unwrap();
        // oracle: supplementation with H(s) = M^k
        let h = vec![all_tuples(&universe, 1); x.len()];
        let sup = x.supplement(&h, &vars(&["y"])).unwrap();
        assert_eq!(dup, sup);
        assert_eq!(dup.len(), 9);
    }

    #[test]
    fn lax_supplement_counts() {
        let one = team(&["x"], &[&[0]]);
        assert_eq!(enumerate_lax_supplements(&one, &vars(&["y"]), &[0, 1]).unwrap().count(), 3);
        let two = team(&["x"], &[&[0], &[1]]);
        assert_eq!(enumerate_lax_supplements(&two, &vars(&["y"]), &[0, 1]).unwrap().count(), 9);
        let empty = Team::empty(vars(&["x"])).unwrap();
        let all: Vec<Team> = enumerate_lax_supplements(&empty, &vars(&["y"]), &[0, 1])
            .unwrap()
            .collect();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_empty());
    }

    #[test]
    fn lax_supplements_are_the_covering_subsets_of_the_duplication() {
        let universe = [0, 1];
        let x = team(&["x"], &[&[0], &[1]]);
        let v = vars(&["y"]);
        let got: BTreeSet<Team> = enumerate_lax_supplements(&x, &v, &universe).unwrap().collect();
        // independent oracle: filter all subsets of X[M/y]
        let dup = x.duplicate(&v, &universe).unwrap();
        let mut want = BTreeSet::new();
        for mask in 0..(1u64 << dup.len()) {
            let y = dup.submask(mask);
            if y.restrict(x.vars()).unwrap() == x {
                want.insert(y);
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn cover_counts() {
        let empty = Team::empty(vars(&["x"])).unwrap();
        let pairs: Vec<_> = enumerate_covers(&empty).collect();
        assert_eq!(pairs, vec![(empty.clone(), empty.clone())]);
        assert_eq!(enumerate_covers(&team(&["x"], &[&[0]])).count(), 3);
        assert_eq!(enumerate_covers(&team(&["x"], &[&[0], &[1]])).count(), 9);
    }
}
