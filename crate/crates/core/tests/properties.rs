use mallows::dist::{conditional_l_given_r, displacement_pmf, fdd_probability, FddQuery};
use mallows::perm::{
    adjacent_swap_r, count_inversions, eliminate_left, eliminate_right, inversion_counts_window,
    invert_window, truncate,
};
use mallows::qseries::{q_pochhammer, Extent};
use mallows::samplers::{
    q_shuffle_from_draws, sample_two_sided_interlacing, sample_two_sided_inversion,
};
use mallows::{GeomStream, Interval, PermWindow, QParam, QPochhammerTable, YoungDiagram};
use proptest::prelude::*;

fn arb_word(max_n: usize) -> impl Strategy<Value = Vec<i64>> {
    (1..=max_n).prop_flat_map(|n| Just((1..=n as i64).collect::<Vec<_>>()).prop_shuffle())
}

fn arb_q() -> impl Strategy<Value = f64> {
    0.05f64..0.95
}

fn distinct(v: &[i64]) -> bool {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] < w[1])
}

proptest! {
    #[test]
    fn codecs_invert_counts(word in arb_word(9)) {
        let w = PermWindow::from_word(word.clone()).unwrap();
        let ic = inversion_counts_window(&w);
        prop_assert_eq!(eliminate_right(ic.r()).unwrap(), w.clone());
        prop_assert_eq!(eliminate_left(ic.ell()).unwrap(), w);
        let inv = count_inversions(&word);
        prop_assert_eq!(ic.r().iter().sum::<u64>(), inv);
        prop_assert_eq!(ic.ell().iter().sum::<u64>(), inv);
    }

    #[test]
    fn swap_rule_matches_letter_swap(word in arb_word(9), i in 0usize..8) {
        prop_assume!(i + 1 < word.len());
        let before = inversion_counts_window(&PermWindow::from_word(word.clone()).unwrap());
        let mut swapped = word.clone();
        swapped.swap(i, i + 1);
        let after = inversion_counts_window(&PermWindow::from_word(swapped).unwrap());
        let (a, b) = adjacent_swap_r(before.r()[i], before.r()[i + 1]);
        prop_assert_eq!((after.r()[i], after.r()[i + 1]), (a, b));
        prop_assert_eq!(adjacent_swap_r(a, b), (before.r()[i], before.r()[i + 1]));
    }

    #[test]
    fn q_shuffle_takes_ranked_unused_values(draws in prop::collection::vec(0u64..6, 1..30)) {
        let word = q_shuffle_from_draws(&draws);
        prop_assert_eq!(word.len(), draws.len());
        for (k, &d) in draws.iter().enumerate() {
            let expected = (1i64..)
                .filter(|v| !word[..k].contains(v))
                .nth(d as usize)
                .unwrap();
            prop_assert_eq!(word[k], expected);
        }
    }

    #[test]
    fn inverse_is_an_involution(word in arb_word(9), lo in -5i64..5) {
        let shifted: Vec<i64> = word.iter().map(|v| v + lo - 1).collect();
        let w = PermWindow::new(lo, shifted).unwrap();
        let inv = invert_window(&w).unwrap();
        prop_assert_eq!(invert_window(&inv).unwrap(), w.clone());
        prop_assert_eq!(inv.inversions(), w.inversions());
        prop_assert_eq!(truncate(&w, w.interval()).unwrap(), w);
    }

    #[test]
    fn transpose_is_an_involution(mut parts in prop::collection::vec(1u64..8, 0..8)) {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let d = YoungDiagram::new(parts).unwrap();
        prop_assert_eq!(d.transpose().size(), d.size());
        prop_assert_eq!(d.transpose().transpose(), d);
    }

    #[test]
    fn pochhammer_table_matches_direct_products(q in arb_q(), n in 0u64..60) {
        let p = QParam::new(q).unwrap();
        let t = QPochhammerTable::new(&p);
        let (direct, _) = q_pochhammer(Extent::Finite(n), &p);
        prop_assert!((t.get(n) - direct).abs() <= 1e-13);
        prop_assert!(t.get(n) >= t.infinite() - t.infinite_error() - 1e-15);
    }

    #[test]
    fn displacement_law_symmetric_and_normalized(q in arb_q()) {
        let t = QPochhammerTable::new(&QParam::new(q).unwrap());
        let pmf = displacement_pmf(&t, 12);
        for d in 1..=12 {
            prop_assert_eq!(pmf.prob(d), pmf.prob(-d));
        }
        let gap = 1.0 - pmf.total();
        prop_assert!(gap >= -1e-12 && gap <= pmf.tail_bound + 1e-12);
    }

    #[test]
    fn conditional_left_law_normalized(q in 0.05f64..0.8, r in 0u64..10) {
        let t = QPochhammerTable::new(&QParam::new(q).unwrap());
        let total: f64 = (0..400).map(|l| conditional_l_given_r(&t, r, l)).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn colliding_queries_have_zero_probability(q in arb_q(), d in -4i64..4) {
        let t = QPochhammerTable::new(&QParam::new(q).unwrap());
        // positions 1 and 2 both sent to d + 1
        let v = fdd_probability(&t, &FddQuery::new(vec![d, d - 1]).unwrap(), 1e-12).unwrap();
        prop_assert_eq!(v.value, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn two_sided_windows_are_injective(seed in any::<u64>(), q in arb_q(), lo in -20i64..0, len in 1usize..30) {
        let p = QParam::new(q).unwrap();
        let t = QPochhammerTable::new(&p);
        let window = Interval::new(lo, lo + len as i64 - 1).unwrap();
        let mut s = GeomStream::new(seed, &p);
        let (a, _) = sample_two_sided_interlacing(window, &t, &mut s);
        prop_assert!(distinct(a.values()));
        let b = sample_two_sided_inversion(window, &p, &mut s, 1e-9).unwrap();
        prop_assert!(distinct(b.window.values()));
        prop_assert_eq!(b.window.interval(), window);
    }
}
