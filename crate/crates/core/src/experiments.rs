//! Random-tournament experiments: per-edge copy counts and greedy packing
//! density.

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::{edge_index, pair_count, EdgeSet};
use crate::error::{Error, Result};
use crate::packing::{enumerate_copies, greedy_from_copies, CopyList, Packing};
use crate::report::ratio;
use crate::rng;
use crate::tournament::{binomial, Tournament};
use crate::Rational;

#[derive(Clone, Debug, Serialize)]
pub struct EdgeCopyStats {
    pub n: usize,
    pub k: usize,
    pub copies: u64,
    /// Copies through each edge, indexed by lexicographic pair rank.
    #[serde(skip)]
    pub counts: Vec<u64>,
    #[serde(serialize_with = "ratio")]
    pub mean: Rational,
    pub min: u64,
    pub max: u64,
    /// `C(n-2, k-2) k! / 2^C(k,2)` for a uniformly random tournament.
    #[serde(serialize_with = "ratio")]
    pub expectation: Rational,
}

fn limit_for(k: usize, edge_stats: bool) -> Result<usize> {
    match (k, edge_stats) {
        (3, true) => Ok(200),
        (3, false) => Ok(500),
        (4, _) => Ok(60),
        _ => Err(Error::InvalidArgument(format!("k must be 3 or 4, got {k}"))),
    }
}

pub fn copy_count_expectation(n: usize, k: usize) -> Rational {
    let factorial: u64 = (1..=k as u64).product();
    Rational::new(
        (binomial(n as u64 - 2, k as u64 - 2) * factorial) as i64,
        1i64 << binomial(k as u64, 2),
    )
}

pub fn edge_copy_stats(t: &Tournament, k: usize) -> Result<EdgeCopyStats> {
    let limit = limit_for(k, true)?;
    if t.n() > limit {
        return Err(Error::TooLarge { what: "edge statistics vertex count", limit, got: t.n() });
    }
    let copies = enumerate_copies(t, k)?;
    let mut counts = vec![0u64; pair_count(t.n())];
    for c in 0..copies.len() {
        for &e in copies.edge_ids(c) {
            counts[e as usize] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    Ok(EdgeCopyStats {
        n: t.n(),
        k,
        copies: copies.len() as u64,
        mean: Rational::new(total as i64, counts.len() as i64),
        min: counts.iter().copied().min().unwrap_or(0),
        max: counts.iter().copied().max().unwrap_or(0),
        expectation: copy_count_expectation(t.n(), k),
        counts,
    })
}

impl EdgeCopyStats {
    /// `mean * C(n,2) == copies * C(k,2)`.
    pub fn handshake_holds(&self) -> bool {
        self.mean * Rational::from_integer(pair_count(self.n) as i64)
            == Rational::from_integer((self.copies * binomial(self.k as u64, 2)) as i64)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityTrial {
    pub trial: usize,
    pub copies: usize,
    pub covered_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub improve: bool,
    /// `1/(k(k-1))`: the asymptotic `P_k / n^2` of a random tournament.
    #[serde(serialize_with = "ratio")]
    pub reference_density: Rational,
    pub mean_covered_fraction: f64,
    pub per_trial: Vec<DensityTrial>,
}

impl DensityReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,copies,covered_fraction\n");
        for t in &self.per_trial {
            s.push_str(&format!("{},{},{}\n", t.trial, t.copies, t.covered_fraction));
        }
        s
    }
}

pub fn covered_fraction(n: usize, k: usize, copies: usize) -> f64 {
    let edges = pair_count(n);
    if edges == 0 {
        return 0.0;
    }
    (copies * k * (k - 1) / 2) as f64 / edges as f64
}

/// Tries to replace one packed copy by two edge-disjoint copies on free edges
/// until no replacement exists. Never decreases the packing size.
pub fn improve_packing(copies: &CopyList, packing: &mut Packing) {
    let n = copies.n();
    let mut through: Vec<Vec<u32>> = vec![Vec::new(); pair_count(n)];
    for c in 0..copies.len() {
        for &e in copies.edge_ids(c) {
            through[e as usize].push(c as u32);
        }
    }
    let edge_ids = |vs: &[usize]| -> Vec<usize> {
        let mut ids = Vec::new();
        for (a, &x) in vs.iter().enumerate() {
            for &y in &vs[a + 1..] {
                ids.push(edge_index(n, x, y));
            }
        }
        ids
    };
    let free = |covered: &EdgeSet, c: u32| copies.edge_ids(c as usize).iter().all(|&e| !covered.contains(e as usize));
    let mut improved = true;
    while improved {
        improved = false;
        let mut i = 0;
        while i < packing.copies.len() {
            let old = edge_ids(&packing.copies[i]);
            for &e in &old {
                packing.covered_edges.remove(e);
            }
            let mut candidates: Vec<u32> = old
                .iter()
                .flat_map(|&e| through[e].iter().copied())
                .filter(|&c| free(&packing.covered_edges, c))
                .collect();
            candidates.sort_unstable();
            candidates.dedup();
            let pair = candidates.iter().enumerate().find_map(|(a, &x)| {
                candidates[a + 1..].iter().copied().find(|&y| {
                    copies.edge_ids(x as usize).iter().all(|e| !copies.edge_ids(y as usize).contains(e))
                }).map(|y| (x, y))
            });
            match pair {
                Some((x, y)) => {
                    packing.copies.swap_remove(i);
                    packing.push(copies.vertex_set(x as usize));
                    packing.push(copies.vertex_set(y as usize));
                    improved = true;
                }
                None => {
                    for &e in &old {
                        packing.covered_edges.insert(e);
                    }
                    i += 1;
                }
            }
        }
    }
}

/// Greedy packings of seeded random tournaments; trial `i` uses the
/// tournament and scan order derived from `(seed, i)`.
pub fn density_experiment(n: usize, k: usize, trials: usize, seed: u64, improve: bool) -> Result<DensityReport> {
    let limit = limit_for(k, false)?;
    if n > limit {
        return Err(Error::TooLarge { what: "density experiment vertex count", limit, got: n });
    }
    let per_trial: Vec<DensityTrial> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (t, packing) = density_trial(n, k, seed, trial, improve)?;
            debug_assert!(crate::packing::verify_packing(&t, &packing));
            Ok(DensityTrial { trial, copies: packing.value(), covered_fraction: covered_fraction(n, k, packing.value()) })
        })
        .collect::<Result<_>>()?;
    let mean = if trials == 0 { 0.0 } else { per_trial.iter().map(|t| t.covered_fraction).sum::<f64>() / trials as f64 };
    Ok(DensityReport {
        n,
        k,
        trials,
        seed,
        improve,
        reference_density: Rational::new(1, (k * (k - 1)) as i64),
        mean_covered_fraction: mean,
        per_trial,
    })
}

/// The tournament and packing of one density trial.
pub fn density_trial(n: usize, k: usize, seed: u64, trial: usize, improve: bool) -> Result<(Tournament, Packing)> {
    let trial_seed = rng::sub_seed(seed, trial as u64);
    let t = Tournament::random(n, trial_seed)?;
    if n < k {
        return Ok((t, Packing::empty(n, k)));
    }
    let copies = enumerate_copies(&t, k)?;
    let mut packing = greedy_from_copies(&copies, rng::sub_seed(trial_seed, 1));
    if improve {
        improve_packing(&copies, &mut packing);
    }
    Ok((t, packing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::{max_packing_exact, verify_packing};

    #[test]
    fn edge_stats_examples() {
        let n = 9;
        let tt = Tournament::transitive(n).unwrap();
        let s = edge_copy_stats(&tt, 3).unwrap();
        assert_eq!(s.counts[edge_index(n, 0, n - 1)], (n - 2) as u64);
        let c3 = edge_copy_stats(&Tournament::cycle3(), 3).unwrap();
        assert!(c3.counts.iter().all(|&c| c == 0));
        assert_eq!(copy_count_expectation(60, 3), Rational::new(87, 2));
        assert!(edge_copy_stats(&Tournament::random(61, 0).unwrap(), 4).is_err());
        assert!(edge_copy_stats(&tt, 5).is_err());
    }

    #[test]
    fn per_edge_count_is_complement_of_cyclic_completions() {
        for seed in 0..10 {
            let t = Tournament::random(15, seed).unwrap();
            let s = edge_copy_stats(&t, 3).unwrap();
            assert!(s.handshake_holds());
            for x in 0..15 {
                for y in x + 1..15 {
                    let (u, v) = if t.has_edge(x, y) { (x, y) } else { (y, x) };
                    let cyclic = (0..15).filter(|&w| t.has_edge(v, w) && t.has_edge(w, u)).count();
                    assert_eq!(s.counts[edge_index(15, x, y)], (13 - cyclic) as u64);
                }
            }
        }
    }

    #[test]
    fn density_small() {
        let r = density_experiment(3, 3, 20, 1, false).unwrap();
        assert!(r.per_trial.iter().all(|t| t.covered_fraction == 0.0 || t.covered_fraction == 1.0));
        assert!(density_experiment(501, 3, 1, 0, false).is_err());
        let csv = r.to_csv();
        assert!(csv.starts_with("trial,copies,covered_fraction\n"));
        assert_eq!(csv.lines().count(), 21);
    }

    #[test]
    fn density_greedy_below_exact() {
        for trial in 0..50 {
            let (t, p) = density_trial(10, 3, 77, trial, false).unwrap();
            assert!(verify_packing(&t, &p));
            assert!(p.value() <= max_packing_exact(&t, 3, None).unwrap().value());
        }
    }

    #[test]
    fn improvement_never_hurts() {
        for trial in 0..10 {
            let (t, plain) = density_trial(30, 3, 5, trial, false).unwrap();
            let (t2, better) = density_trial(30, 3, 5, trial, true).unwrap();
            assert_eq!(t, t2);
            assert!(verify_packing(&t, &better));
            assert!(better.value() >= plain.value());
        }
    }
}
