use itertools::Itertools;

use super::VerifyError;
use crate::model::{all_tuples, Elem, Relation, Structure, Team, Var};

/// Largest number of objects a single enumeration may produce.
pub const ENUM_LIMIT: usize = 1 << 22;

fn too_large(what: &'static str, count: f64) -> VerifyError {
    VerifyError::Guard {
        what,
        count: count as u128,
    }
}

/// Every relation of arity `k` over `universe`, ordered by bitmask over
/// the lexicographically ordered tuples.
pub fn enumerate_relations(universe: &[Elem], k: usize) -> Result<Vec<Relation>, VerifyError> {
    let n = (universe.len() as f64).powi(k as i32);
    if n > 22.0 {
        return Err(too_large("relations", 2f64.powf(n)));
    }
    let tuples = all_tuples(universe, k);
    Ok((0u64..1 << tuples.len())
        .map(|mask| {
            let mut r = Relation::empty(k);
            for (i, t) in tuples.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    r.insert(t.clone()).expect("arity matches");
                }
            }
            r
        })
        .collect())
}

/// Every team over `vars` (in the given order) with at most `max_rows`
/// rows, by increasing size.
pub fn enumerate_teams(universe: &[Elem], vars: &[Var], max_rows: usize) -> Result<Vec<Team>, VerifyError> {
    let rows = all_tuples(universe, vars.len());
    let count: f64 = (0..=max_rows.min(rows.len()))
        .map(|r| binomial(rows.len(), r))
        .sum();
    if count > ENUM_LIMIT as f64 {
        return Err(too_large("teams", count));
    }
    let mut out = Vec::with_capacity(count as usize);
    for r in 0..=max_rows.min(rows.len()) {
        for pick in rows.iter().combinations(r) {
            out.push(Team::new(vars.to_vec(), pick.into_iter().cloned().collect())?);
        }
    }
    Ok(out)
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Every structure on the canonical domains `{0..m-1}`, `1 <= m <=
/// max_size`, interpreting each `(symbol, arity)` of `signature`.
pub fn enumerate_models(max_size: usize, signature: &[(&str, usize)]) -> Result<Vec<Structure>, VerifyError> {
    let mut out = Vec::new();
    for m in 1..=max_size {
        let u: Vec<Elem> = (0..m as Elem).collect();
        let choices = signature
            .iter()
            .map(|&(_, k)| enumerate_relations(&u, k))
            .collect::<Result<Vec<_>, _>>()?;
        let count: f64 = choices.iter().map(|c| c.len() as f64).product();
        if out.len() as f64 + count > ENUM_LIMIT as f64 {
            return Err(too_large("models", out.len() as f64 + count));
        }
        for pick in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
            let mut s = Structure::canonical(m)?;
            for (&(sym, _), r) in signature.iter().zip(pick) {
                s.add_relation(sym, r.clone())?;
            }
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vars;

    #[test]
    fn relation_counts() {
        let r = enumerate_relations(&[0, 1], 1).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r[0], Relation::empty(1));
        assert_eq!(r[3], Relation::unary([0, 1]));
        assert_eq!(enumerate_relations(&[0, 1, 2], 2).unwrap().len(), 512);
        assert!(enumerate_relations(&[0, 1, 2], 3).is_err());
    }

    #[test]
    fn team_counts() {
        assert_eq!(enumerate_teams(&[0, 1], &vars(&["x"]), 2).unwrap().len(), 4);
        // C(4,0)+C(4,1)+C(4,2)
        assert_eq!(enumerate_teams(&[0, 1], &vars(&["x", "y"]), 2).unwrap().len(), 11);
        assert_eq!(enumerate_teams(&[0, 1, 2], &vars(&["x", "y"]), 9).unwrap().len(), 512);
    }

    #[test]
    fn model_counts() {
        // sum over m <= 2 of 2^m
        assert_eq!(enumerate_models(2, &[("R", 1)]).unwrap().len(), 2 + 4);
        // sum over m <= 2 of 2^m * 2^(m^2)
        assert_eq!(enumerate_models(2, &[("P", 1), ("R", 2)]).unwrap().len(), 2 * 2 + 4 * 16);
        assert_eq!(enumerate_models(3, &[]).unwrap().len(), 3);
    }
}
