use proptest::prelude::*;
use ttpack_core::bitset::pair_count;
use ttpack_core::enumeration::{canonical_form, canonical_labeling, is_isomorphic};
use ttpack_core::packing::{greedy_packing, max_packing_exact, verify_packing};
use ttpack_core::tournament::binomial;
use ttpack_core::{ScoreSequence, Tournament};

fn tournament(max_n: usize) -> impl Strategy<Value = Tournament> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| Tournament::random(n, seed).unwrap())
}

fn relabeled() -> impl Strategy<Value = (Tournament, Vec<usize>)> {
    (1..=9usize, any::<u64>()).prop_flat_map(|(n, seed)| {
        let t = Tournament::random(n, seed).unwrap();
        (Just(t), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reverse_is_an_involution(t in tournament(80)) {
        prop_assert_eq!(t.reverse().reverse(), t);
    }

    #[test]
    fn census_identities(t in tournament(40)) {
        let c = t.census();
        let n = t.n() as u64;
        prop_assert_eq!(c.transitive + c.cyclic, binomial(n, 3));
        prop_assert_eq!(c.transitive, t.transitive_by_degrees());
        prop_assert_eq!(t.reverse().census(), c);
        if n >= 3 {
            prop_assert!(8 * c.transitive >= n * (n - 1) * (n - 3));
        }
    }

    #[test]
    fn scores_satisfy_landau(t in tournament(60)) {
        let s = t.score_sequence();
        prop_assert!(s.satisfies_landau());
        prop_assert_eq!(s.as_slice().iter().sum::<usize>(), pair_count(t.n()));
        prop_assert_eq!(t.reverse().score_sequence(), s.complement());
        let reparsed: ScoreSequence = s.to_string().parse().unwrap();
        prop_assert_eq!(reparsed, s);
    }

    #[test]
    fn text_round_trip(t in tournament(100)) {
        let text = t.to_text();
        prop_assert_eq!(Tournament::parse(&text).unwrap(), t);
    }

    #[test]
    fn canonical_form_is_a_relabeling_invariant((t, perm) in relabeled()) {
        let u = t.relabel(&perm).unwrap();
        prop_assert_eq!(canonical_form(&t).unwrap(), canonical_form(&u).unwrap());
        prop_assert!(is_isomorphic(&t, &u).unwrap());
        let (form, labeling) = canonical_labeling(&t).unwrap();
        prop_assert_eq!(t.relabel(&labeling).unwrap(), form.to_tournament());
        prop_assert_eq!(canonical_form(&form.to_tournament()).unwrap(), form);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_invariants(n in 3..=10usize, seed in any::<u64>()) {
        let t = Tournament::random(n, seed).unwrap();
        let exact = max_packing_exact(&t, 3, None).unwrap();
        prop_assert!(exact.optimal);
        prop_assert!(verify_packing(&t, &exact));
        prop_assert!(exact.value() <= pair_count(n) / 3);
        prop_assert_eq!(max_packing_exact(&t.reverse(), 3, None).unwrap().value(), exact.value());
        let greedy = greedy_packing(&t, 3, seed).unwrap();
        prop_assert!(verify_packing(&t, &greedy));
        prop_assert!(greedy.value() <= exact.value());
    }
}
