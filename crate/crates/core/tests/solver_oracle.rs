//! Exact solver against exhaustive subset enumeration.

use ttpack_core::enumeration::enumerate_nonisomorphic;
use ttpack_core::packing::{enumerate_copies, max_packing_exact, verify_packing, CopyList};
use ttpack_core::Tournament;

/// Largest pairwise edge-disjoint subset, by trying every subset of copies.
fn brute_force(copies: &CopyList) -> usize {
    let m = copies.len();
    assert!(m <= 22, "{m} copies is too many to enumerate");
    let masks: Vec<u128> = (0..m)
        .map(|c| copies.edge_ids(c).iter().fold(0u128, |acc, &e| acc | 1 << e))
        .collect();
    let mut best = 0;
    for subset in 0u32..1 << m {
        let size = subset.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut used = 0u128;
        let disjoint = (0..m).filter(|&c| subset >> c & 1 == 1).all(|c| {
            let ok = used & masks[c] == 0;
            used |= masks[c];
            ok
        });
        if disjoint {
            best = size;
        }
    }
    best
}

#[test]
fn every_small_class_matches_brute_force() {
    for n in 1..=5 {
        for t in enumerate_nonisomorphic(n).unwrap() {
            for k in 3..=4 {
                if k > n {
                    continue;
                }
                let copies = enumerate_copies(&t, k).unwrap();
                let p = max_packing_exact(&t, k, None).unwrap();
                assert!(p.optimal);
                assert!(verify_packing(&t, &p));
                assert_eq!(p.value(), brute_force(&copies), "n={n} k={k}\n{t}");
            }
        }
    }
}

#[test]
fn random_hosts_match_brute_force() {
    let mut checked = 0;
    for seed in 0..400 {
        let n = 6 + (seed % 3) as usize;
        let t = Tournament::random(n, seed).unwrap();
        for k in 3..=4 {
            let copies = enumerate_copies(&t, k).unwrap();
            if copies.len() > 22 {
                continue;
            }
            let p = max_packing_exact(&t, k, None).unwrap();
            assert_eq!(p.value(), brute_force(&copies), "seed={seed} k={k}");
            checked += 1;
        }
    }
    assert!(checked >= 200, "only {checked} instances were small enough");
}
