//! Seed derivation and the counter-based coin used for random orientations.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used whenever a caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x7474_7061_636b_0001;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `master`; independent of the order streams are consumed in.
pub fn sub_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Fair coin for counter `index` under `seed`.
pub fn coin(seed: u64, index: u64) -> bool {
    sub_seed(seed, index) >> 63 == 1
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform permutation of `0..n`.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from_seed(seed));
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_is_deterministic_and_complete() {
        let p = permutation(49, 17);
        assert_eq!(p, permutation(49, 17));
        let mut s = p.clone();
        s.sort_unstable();
        assert_eq!(s, (0..49).collect::<Vec<_>>());
        assert_ne!(p, permutation(49, 18));
    }

    #[test]
    fn coin_is_roughly_fair() {
        let heads = (0..20_000).filter(|&i| coin(3, i)).count();
        assert!((9_500..10_500).contains(&heads), "{heads}");
    }
}
