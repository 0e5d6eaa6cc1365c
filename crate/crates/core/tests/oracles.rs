//! Library routines against brute-force reimplementations on random data.

mod common;

use common::*;
use proptest::prelude::*;
use rumix::discretize::{entropy, weighted_split_entropy};
use rumix::rule::{covers, subsumes};

#[test]
fn entropy_of_three_to_one() {
    // 2 - (3/4) log2 3
    let exact = 2.0 - 0.75 * 3f64.log2();
    let h: f64 = entropy(&[3, 1]).unwrap();
    assert!((h - exact).abs() < 1e-9);
    assert!((h - 0.811_278_124_459_132_8).abs() < 1e-9);
}

#[test]
fn exact_entropy_tie_takes_the_smaller_cut() {
    // both midpoints leave a pure singleton beside a 3:2:1 side
    let pts = [(0, 0), (5, 2), (1, 2), (1, 0), (1, 0), (1, 1), (1, 2)];
    check_best_split(&pts).unwrap();
    let got = rumix::discretize::best_split(&[0.0, 2.5, 0.5, 0.5, 0.5, 0.5, 0.5], &[0, 2, 2, 0, 0, 1, 2]).unwrap();
    assert_eq!(got.cut_value, 0.25);
}

proptest! {
    #![proptest_config(cases(1000))]

    #[test]
    fn best_split_matches_exhaustive_scan(pts in split_points()) {
        check_best_split(&pts).map_err(TestCaseError::fail)?;
        let values: Vec<f64> = pts.iter().map(|p| p.0 as f64 * 0.5).collect();
        let labels: Vec<usize> = pts.iter().map(|p| p.1).collect();
        for w in [0.25, 1.75, 3.0] {
            let lib: f64 = weighted_split_entropy(&values, &labels, w).unwrap();
            prop_assert!((lib - split_info(&values, &labels, w)).abs() < 1e-12);
        }
    }

    #[test]
    fn flip_scans_match_greedy_replay(shape in small_table(30)) {
        check_flip_replay(&shape).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn fitness_matches_naive_recount(
        shape in small_table(30),
        pattern in prop::collection::vec(any::<bool>(), 12),
        gamma in 0.05f64..0.95,
    ) {
        check_fitness(&shape, &pattern, gamma).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn coverage_and_subsumption(
        shape in small_table(100),
        a in prop::collection::vec(any::<bool>(), 12),
        b in prop::collection::vec(any::<bool>(), 12),
    ) {
        let data = dataset(&shape);
        let s = rule_with(&data.schema, &a, 0, 0);
        let mut g = rule_with(&data.schema, &b, 0, 1);
        g.bits = g.bits.or(&s.bits);
        prop_assert!(subsumes(&g, &s));
        for inst in &data.instances {
            let cs = covers(&s, &inst.bits, &data.schema).unwrap();
            prop_assert_eq!(cs, naive_covers(&s.bits, &inst.bits, &data.schema));
            if cs {
                prop_assert!(covers(&g, &inst.bits, &data.schema).unwrap());
            }
        }
    }
}
