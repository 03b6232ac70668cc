//! Canonical forms and isomorph-free enumeration of small tournaments.
//!
//! The canonical code of a tournament is the lexicographically smallest
//! upper-triangle string (`1` = forward edge) over all vertex relabellings.
//! Codes are stored as integers whose most significant of the `C(n,2)` bits
//! is the first character, so integer order is string order.
//!
//! The minimum is found position by position. Row `i` of the string only
//! depends on which vertex sits at position `i` and on which later positions
//! hold its in- and out-neighbours, so the smallest row is obtained by putting
//! in-neighbours first inside every cell of the current ordered partition.
//! Only vertices of the first cell whose row is minimal are branched on.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bitset::{edge_index, pair_count};
use crate::error::{Error, Result};
use crate::tournament::{ScoreSequence, Tournament};

/// Largest order accepted by [`canonical_form`].
pub const MAX_CANONICAL: usize = 10;
/// Largest order accepted by [`enumerate_nonisomorphic`].
pub const MAX_ENUMERATION: usize = 8;

/// Number of isomorphism classes for `n = 1..=8`.
pub const CLASS_COUNTS: [usize; 8] = [1, 1, 2, 4, 12, 56, 456, 6880];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    n: usize,
    code: u64,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// The tournament whose labelling realises the code.
    pub fn to_tournament(&self) -> Tournament {
        let len = pair_count(self.n);
        Tournament::from_fn(self.n, |i, j| {
            self.code >> (len - 1 - edge_index(self.n, i, j)) & 1 == 1
        })
        .expect("canonical forms have 1 <= n <= 10")
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let len = pair_count(self.n);
        for b in (0..len).rev() {
            f.write_str(if self.code >> b & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for CanonicalForm {
    type Err = Error;

    /// Parses a bare code string; `n` is recovered from its length.
    fn from_str(s: &str) -> Result<Self> {
        let len = s.len();
        let n = (1..=MAX_CANONICAL)
            .find(|&n| pair_count(n) == len)
            .ok_or_else(|| Error::parse(0, format!("length {len} is not C(n,2) for n <= {MAX_CANONICAL}")))?;
        let mut code = 0u64;
        for (i, b) in s.bytes().enumerate() {
            code = code << 1
                | match b {
                    b'0' => 0,
                    b'1' => 1,
                    _ => return Err(Error::parse(i, "code may contain only '0' and '1'")),
                };
        }
        Ok(CanonicalForm { n, code })
    }
}

/// Code of `t` under its current labelling.
pub fn labelled_code(t: &Tournament) -> u64 {
    let n = t.n();
    let mut code = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            code = code << 1 | t.has_edge(i, j) as u64;
        }
    }
    code
}

struct Canonizer<'a> {
    t: &'a Tournament,
    len: usize,
    best: Option<(u64, Vec<usize>)>,
}

impl Canonizer<'_> {
    // Row bits for placing `v` next, and the refined partition that realises them.
    fn row(&self, cells: &[Vec<usize>], v: usize) -> (u64, Vec<Vec<usize>>) {
        let mut row = 0u64;
        let mut next = Vec::with_capacity(cells.len() + 1);
        for cell in cells {
            let (ins, outs): (Vec<usize>, Vec<usize>) = cell
                .iter()
                .copied()
                .filter(|&u| u != v)
                .partition(|&u| self.t.has_edge(u, v));
            row <<= ins.len();
            row = row << outs.len() | ((1u64 << outs.len()) - 1);
            if !ins.is_empty() {
                next.push(ins);
            }
            if !outs.is_empty() {
                next.push(outs);
            }
        }
        (row, next)
    }

    fn search(&mut self, cells: Vec<Vec<usize>>, placed: &mut Vec<usize>, prefix: u64, prefix_len: usize) {
        if let Some((best, _)) = &self.best {
            let best_prefix = if prefix_len == 0 { 0 } else { best >> (self.len - prefix_len) };
            if prefix > best_prefix {
                return;
            }
        }
        let remaining: usize = cells.iter().map(Vec::len).sum();
        if remaining <= 1 {
            let mut order = placed.clone();
            order.extend(cells.iter().flatten());
            if self.best.as_ref().is_none_or(|(b, _)| prefix < *b) {
                self.best = Some((prefix, order));
            }
            return;
        }
        let options: Vec<(usize, u64, Vec<Vec<usize>>)> = cells[0]
            .iter()
            .map(|&v| {
                let (row, next) = self.row(&cells, v);
                (v, row, next)
            })
            .collect();
        let min_row = options.iter().map(|o| o.1).min().expect("first cell is non-empty");
        let row_len = remaining - 1;
        for (v, row, next) in options {
            if row != min_row {
                continue;
            }
            placed.push(v);
            self.search(next, placed, prefix << row_len | row, prefix_len + row_len);
            placed.pop();
        }
    }
}

/// Canonical form together with a labelling `perm` (vertex `v` goes to
/// position `perm[v]`) that realises it.
pub fn canonical_labeling(t: &Tournament) -> Result<(CanonicalForm, Vec<usize>)> {
    let n = t.n();
    if n > MAX_CANONICAL {
        return Err(Error::TooLarge {
            what: "canonical form vertex count",
            limit: MAX_CANONICAL,
            got: n,
        });
    }
    let mut c = Canonizer {
        t,
        len: pair_count(n),
        best: None,
    };
    c.search(vec![(0..n).collect()], &mut Vec::with_capacity(n), 0, 0);
    let (code, order) = c.best.expect("search always reaches a leaf");
    let mut perm = vec![0; n];
    for (pos, &v) in order.iter().enumerate() {
        perm[v] = pos;
    }
    Ok((CanonicalForm { n, code }, perm))
}

pub fn canonical_form(t: &Tournament) -> Result<CanonicalForm> {
    canonical_labeling(t).map(|(c, _)| c)
}

pub fn is_isomorphic(a: &Tournament, b: &Tournament) -> Result<bool> {
    Ok(a.n() == b.n() && canonical_form(a)? == canonical_form(b)?)
}

/// One canonical form per isomorphism class of `n`-vertex tournaments, in
/// increasing code order.
pub fn enumerate_classes(n: usize) -> Result<Vec<CanonicalForm>> {
    if n == 0 || n > MAX_ENUMERATION {
        return Err(Error::TooLarge {
            what: "enumeration order",
            limit: MAX_ENUMERATION,
            got: n,
        });
    }
    let mut classes = vec![CanonicalForm { n: 1, code: 0 }];
    for m in 2..=n {
        classes = extend_classes(&classes, m);
    }
    Ok(classes)
}

// Adds vertex `m - 1` to every representative in all 2^(m-1) ways.
fn extend_classes(previous: &[CanonicalForm], m: usize) -> Vec<CanonicalForm> {
    let found: BTreeSet<CanonicalForm> = previous
        .par_iter()
        .flat_map_iter(|rep| {
            let base = rep.to_tournament();
            (0u64..1 << (m - 1)).map(move |beats| {
                let t = Tournament::from_fn(m, |i, j| {
                    if j == m - 1 {
                        beats >> i & 1 == 0
                    } else {
                        base.has_edge(i, j)
                    }
                })
                .expect("m <= 8");
                canonical_form(&t).expect("m <= 8")
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    found.into_iter().collect()
}

/// Representatives of every isomorphism class, in canonical code order.
pub fn enumerate_nonisomorphic(n: usize) -> Result<Vec<Tournament>> {
    Ok(enumerate_classes(n)?.iter().map(CanonicalForm::to_tournament).collect())
}

pub fn filter_by_score(list: &[Tournament], score: &ScoreSequence) -> Vec<Tournament> {
    list.iter()
        .filter(|t| &t.score_sequence() == score)
        .cloned()
        .collect()
}

/// Score sequences of the `n`-vertex classes with exactly `cyclic` directed triangles.
pub fn scores_with_triangle_count(n: usize, cyclic: u64) -> Result<BTreeSet<ScoreSequence>> {
    Ok(enumerate_nonisomorphic(n)?
        .iter()
        .filter(|t| t.census().cyclic == cyclic)
        .map(Tournament::score_sequence)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn brute_canonical(t: &Tournament) -> u64 {
        (0..t.n())
            .permutations(t.n())
            .map(|p| labelled_code(&t.relabel(&p).unwrap()))
            .min()
            .unwrap()
    }

    fn all_labelled(n: usize) -> impl Iterator<Item = Tournament> {
        (0u64..1 << pair_count(n))
            .map(move |bits| Tournament::from_fn(n, |i, j| bits >> edge_index(n, i, j) & 1 == 1).unwrap())
    }

    #[test]
    fn matches_unpruned_definition_for_small_n() {
        for n in 1..=5 {
            for t in all_labelled(n) {
                let c = canonical_form(&t).unwrap();
                assert_eq!(c.code(), brute_canonical(&t), "{t:?}");
            }
        }
    }

    #[test]
    fn matches_unpruned_definition_on_random_samples() {
        for seed in 0..40 {
            let n = 6 + seed as usize % 2;
            let t = Tournament::random(n, seed).unwrap();
            assert_eq!(canonical_form(&t).unwrap().code(), brute_canonical(&t));
        }
    }

    #[test]
    fn labeling_realises_code() {
        for seed in 0..20 {
            let t = Tournament::random(9, seed).unwrap();
            let (c, perm) = canonical_labeling(&t).unwrap();
            assert_eq!(labelled_code(&t.relabel(&perm).unwrap()), c.code());
            assert_eq!(c.to_tournament(), t.relabel(&perm).unwrap());
        }
    }

    #[test]
    fn relabelled_copies_share_a_code() {
        let c3 = Tournament::cycle3();
        let other = c3.reverse();
        assert_eq!(canonical_form(&c3).unwrap(), canonical_form(&other).unwrap());
        let tt4 = Tournament::transitive(4).unwrap();
        let codes: BTreeSet<_> = (0..4)
            .permutations(4)
            .map(|p| canonical_form(&tt4.relabel(&p).unwrap()).unwrap())
            .collect();
        assert_eq!(codes.len(), 1);
    }

    #[test]
    fn labelled_five_vertex_tournaments_give_twelve_codes() {
        let codes: BTreeSet<_> = all_labelled(5).map(|t| canonical_form(&t).unwrap()).collect();
        assert_eq!(codes.len(), 12);
        assert_eq!(codes.into_iter().collect::<Vec<_>>(), enumerate_classes(5).unwrap());
    }

    #[test]
    fn orderly_counts_agree_with_brute_force() {
        for n in 1..=5 {
            let brute: BTreeSet<_> = all_labelled(n).map(|t| canonical_form(&t).unwrap()).collect();
            let orderly = enumerate_classes(n).unwrap();
            assert_eq!(orderly.len(), CLASS_COUNTS[n - 1]);
            assert_eq!(orderly, brute.into_iter().collect::<Vec<_>>());
        }
        assert_eq!(enumerate_nonisomorphic(4).unwrap().len(), 4);
    }

    #[test]
    fn limits() {
        assert!(enumerate_classes(9).is_err());
        assert!(enumerate_classes(0).is_err());
        assert!(canonical_form(&Tournament::random(11, 1).unwrap()).is_err());
    }

    #[test]
    fn three_vertex_scores() {
        let classes = enumerate_nonisomorphic(3).unwrap();
        assert_eq!(classes.len(), 2);
        let cyc = filter_by_score(&classes, &"1,1,1".parse().unwrap());
        assert_eq!(cyc.len(), 1);
        assert_eq!(cyc[0].census().cyclic, 1);
        let s = scores_with_triangle_count(3, 1).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec!["1,1,1".parse().unwrap()]);
    }

    #[test]
    fn code_string_round_trip() {
        let t = Tournament::random(8, 3).unwrap();
        let c = canonical_form(&t).unwrap();
        let s = c.to_string();
        assert_eq!(s.len(), 28);
        assert_eq!(s.parse::<CanonicalForm>().unwrap(), c);
        // A code is itself a valid tournament body.
        let t2 = Tournament::parse(&format!("n=8\n{s}\n")).unwrap();
        assert_eq!(canonical_form(&t2).unwrap(), c);
        assert_eq!(labelled_code(&t2), c.code());
    }
}
