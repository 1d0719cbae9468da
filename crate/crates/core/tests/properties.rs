use std::collections::BTreeSet;

use proptest::prelude::*;
use teamsem::model::{parse_model, parse_team, vars, write_team, Elem, Team};
use teamsem::syntax::parse_formula;
use teamsem::verify::fo_corpus;

const MODEL: &str = "domain 0 1 2\n";

fn team_over_xy() -> impl Strategy<Value = Team> {
    prop::collection::btree_set((0..3u8, 0..3u8), 0..=9).prop_map(|rows: BTreeSet<(Elem, Elem)>| {
        Team::new(vars(&["x", "y"]), rows.into_iter().map(|(a, b)| vec![a, b]).collect()).unwrap()
    })
}

proptest! {
    #[test]
    fn duplicate_multiplies_rows(x in team_over_xy(), k in 1usize..3) {
        let fresh: Vec<String> = (0..k).map(|i| format!("d{i}")).collect();
        let fresh: Vec<&str> = fresh.iter().map(String::as_str).collect();
        let y = x.duplicate(&vars(&fresh), &[0, 1, 2]).unwrap();
        prop_assert_eq!(y.len(), x.len() * 3usize.pow(k as u32));
        prop_assert_eq!(y.restrict(&vars(&["x", "y"])).unwrap(), x);
    }

    #[test]
    fn supplement_restricts_back(x in team_over_xy(), picks in prop::collection::vec(1u8..8, 9)) {
        // nonempty value sets drawn from a bitmask over {0, 1, 2}
        let h: Vec<Vec<Vec<Elem>>> = (0..x.len())
            .map(|i| (0..3u8).filter(|e| picks[i] >> e & 1 == 1).map(|e| vec![e]).collect())
            .collect();
        let y = x.supplement(&h, &vars(&["z"])).unwrap();
        let want: usize = h.iter().map(Vec::len).sum();
        prop_assert_eq!(y.len(), want);
        prop_assert_eq!(y.restrict(&vars(&["x", "y"])).unwrap(), x);
    }

    #[test]
    fn team_text_round_trips(x in team_over_xy()) {
        let m = parse_model(MODEL).unwrap();
        prop_assert_eq!(parse_team(&write_team(&x, &m), &m).unwrap(), x);
    }

    #[test]
    fn printed_formulas_reparse(seed in any::<u64>()) {
        for f in fo_corpus(seed, 10).into_iter().rev().take(10) {
            prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }
}
