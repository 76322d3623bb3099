mod common;

use std::sync::Arc;

use proptest::prelude::*;

use markov_persuasion::mcgame::{matrix_game_value, sorin_identity_check};
use markov_persuasion::persuasion::{bellman_step, concave_envelope};
use markov_persuasion::{
    invariant_distribution, Belief, GridValueFunction, PersuasionInstance, SimplexGrid,
    StochasticMatrix,
};

fn stochastic(k: usize) -> impl Strategy<Value = StochasticMatrix> {
    prop::collection::vec(prop::collection::vec(0.01f64..1.0, k), k).prop_map(|rows| {
        let rows = rows
            .into_iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.into_iter().map(|x| x / s).collect()
            })
            .collect();
        StochasticMatrix::new(rows).unwrap()
    })
}

fn tables(k: usize, actions: usize) -> impl Strategy<Value = PersuasionInstance> {
    let t = prop::collection::vec(prop::collection::vec(0.0f64..1.0, actions), k);
    (t.clone(), t).prop_map(move |(s, r)| {
        let names = (0..actions).map(|b| format!("b{b}")).collect();
        PersuasionInstance::from_tables(names, s, r).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariant_distribution_is_fixed(m in stochastic(3)) {
        let pi = invariant_distribution(&m);
        let next = m.apply(pi.as_slice());
        for (a, b) in next.iter().zip(pi.as_slice()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!((pi.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn envelope_is_concave_majorant(f in prop::collection::vec(-1.0f64..1.0, 41)) {
        let grid = Arc::new(SimplexGrid::new(2, 40).unwrap());
        let order: Vec<usize> = {
            let mut o: Vec<usize> = (0..grid.len()).collect();
            o.sort_by(|&a, &b| grid.point(a)[0].total_cmp(&grid.point(b)[0]));
            o
        };
        let mut vals = vec![0.0; grid.len()];
        for (i, &g) in order.iter().enumerate() {
            vals[g] = f[i];
        }
        let v = GridValueFunction::new(grid.clone(), vals).unwrap();
        let cav = concave_envelope(&v).unwrap();
        let oracle = common::cav_pairs(&f);
        for (i, &g) in order.iter().enumerate() {
            prop_assert!((cav.values()[g] - oracle[i]).abs() < 1e-12);
        }
        prop_assert!(cav.midpoint_concavity_violation() <= 1e-12);
    }

    #[test]
    fn bellman_is_monotone_and_contracting(
        inst in tables(2, 3),
        m in stochastic(2),
        delta in 0.0f64..0.95,
        a in prop::collection::vec(0.0f64..1.0, 21),
        shift in 0.0f64..0.5,
    ) {
        let grid = Arc::new(SimplexGrid::new(2, 20).unwrap());
        let v = GridValueFunction::new(grid.clone(), a.clone()).unwrap();
        let w = GridValueFunction::new(grid, a.iter().map(|x| x + shift).collect()).unwrap();
        let tv = bellman_step(&v, &inst, &m, delta).unwrap();
        let tw = bellman_step(&w, &inst, &m, delta).unwrap();
        for (x, y) in tv.values().iter().zip(tw.values()) {
            prop_assert!(*x <= y + 1e-12);
        }
        prop_assert!(tv.sup_distance(&tw) <= delta * shift + 1e-12);
    }

    #[test]
    fn game_value_lies_between_pure_bounds(
        g in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 3), 2..5),
    ) {
        let s = matrix_game_value(&g).unwrap();
        let lower = g.iter().map(|r| r.iter().cloned().fold(f64::INFINITY, f64::min)).fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..3).map(|j| g.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max)).fold(f64::INFINITY, f64::min);
        prop_assert!(s.value >= lower - 1e-9 && s.value <= upper + 1e-9);
        prop_assert!((s.row_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((s.col_strategy.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // the row strategy guarantees the value against every column
        for j in 0..3 {
            let pay: f64 = g.iter().zip(&s.row_strategy).map(|(r, p)| r[j] * p).sum();
            prop_assert!(pay >= s.value - 1e-9);
        }
    }

    #[test]
    fn two_by_two_value_matches_formula(
        a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0,
    ) {
        let s = matrix_game_value(&[vec![a, b], vec![c, d]]).unwrap();
        prop_assert!((s.value - common::value_2x2([[a, b], [c, d]])).abs() < 1e-9);
    }

    #[test]
    fn decomposition_identity_holds(
        a in prop::collection::vec(-1.0f64..1.0, 600),
        mu in 0.1f64..0.5,
        gap in 0.05f64..0.5,
    ) {
        let lambda = (mu + gap).min(1.0);
        let chk = sorin_identity_check(&a, mu, lambda, 400, 1.0).unwrap();
        prop_assert!(chk.pass(), "{:?}", chk);
    }

    #[test]
    fn beliefs_reject_bad_weights(w in prop::collection::vec(-0.5f64..1.0, 3)) {
        let s: f64 = w.iter().sum();
        let ok = w.iter().all(|x| *x >= 0.0) && (s - 1.0).abs() < 1e-9;
        prop_assert_eq!(Belief::new(w).is_ok(), ok);
    }
}
