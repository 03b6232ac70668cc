//! Tournament representation, triple censuses and basic transforms.
//!
//! A tournament on `n` vertices is stored as one out-neighbour bitset per
//! vertex. Vertices are `0..n`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bitset::{edge_index, pair_count};
use crate::error::{Error, Result};
use crate::rng;
use crate::Rational;

/// Largest supported vertex count. Small-order algorithms (canonical forms,
/// exact packing, transitive subsets) impose their own tighter caps.
pub const MAX_VERTICES: usize = 512;

/// Vertex cap for [`Tournament::max_transitive_subset`].
pub const MAX_TRANSITIVE_SEARCH: usize = 24;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    words: usize,
    out: Vec<u64>,
}

/// Counts of transitive triples and directed triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TriangleCensus {
    pub transitive: u64,
    pub cyclic: u64,
}

/// Out-degrees sorted non-increasingly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ScoreSequence(Vec<usize>);

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VERTICES {
        return Err(Error::VertexCount {
            n,
            max: MAX_VERTICES,
        });
    }
    Ok(())
}

impl Tournament {
    /// Builds a tournament from an orientation rule: `forward(i, j)` for
    /// `i < j` is true when the edge goes `i -> j`.
    pub fn from_fn(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_n(n)?;
        let words = n.div_ceil(64);
        let mut t = Tournament {
            n,
            words,
            out: vec![0; n * words],
        };
        for i in 0..n {
            for j in i + 1..n {
                if forward(i, j) {
                    t.set(i, j);
                } else {
                    t.set(j, i);
                }
            }
        }
        Ok(t)
    }

    /// The transitive tournament `TT_n`: `i -> j` whenever `i < j`.
    pub fn transitive(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| true)
    }

    /// The directed 3-cycle `0 -> 1 -> 2 -> 0`.
    pub fn cycle3() -> Self {
        Self::from_fn(3, |i, j| !(i == 0 && j == 2)).expect("n=3 is valid")
    }

    /// Each pair oriented by an independent fair coin keyed by `(seed, pair index)`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        Self::from_fn(n, |i, j| rng::coin(seed, edge_index(n, i, j) as u64))
    }

    #[inline]
    fn set(&mut self, u: usize, v: usize) {
        self.out[u * self.words + v / 64] |= 1 << (v % 64);
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn out_row(&self, v: usize) -> &[u64] {
        &self.out[v * self.words..(v + 1) * self.words]
    }

    /// Out-neighbourhood as a single word; only for `n <= 64`.
    #[inline]
    pub fn out_mask(&self, v: usize) -> u64 {
        assert!(self.n <= 64, "out_mask needs n <= 64");
        self.out[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.out_degree(v)).collect()
    }

    pub fn score_sequence(&self) -> ScoreSequence {
        ScoreSequence::new(self.out_degrees())
    }

    pub fn edge_count(&self) -> usize {
        pair_count(self.n)
    }

    /// Re-checks the orientation invariants. Constructors cannot produce an
    /// invalid value, so this is for tests and foreign data.
    pub fn is_valid(&self) -> bool {
        let loops = (0..self.n).any(|v| self.has_edge(v, v));
        let pairs = (0..self.n).all(|u| {
            (u + 1..self.n).all(|v| self.has_edge(u, v) != self.has_edge(v, u))
        });
        let stray = (0..self.n).any(|u| {
            (self.n..self.words * 64).any(|v| self.out[u * self.words + v / 64] >> (v % 64) & 1 == 1)
        });
        let degree_sum: usize = self.out_degrees().iter().sum();
        !loops && pairs && !stray && degree_sum == pair_count(self.n)
    }

    /// Whether `{x, y, z}` induces a transitive triple.
    #[inline]
    pub fn triple_is_transitive(&self, x: usize, y: usize, z: usize) -> bool {
        let xy = self.has_edge(x, y);
        let yz = self.has_edge(y, z);
        let zx = self.has_edge(z, x);
        !(xy == yz && yz == zx)
    }

    /// Transitive-triple count from the degree-sum identity.
    pub fn transitive_by_degrees(&self) -> u64 {
        let n = self.n as u64;
        let twice: u64 = self
            .out_degrees()
            .into_iter()
            .map(|d| {
                let d = d as u64;
                binomial(d, 2) + binomial(n - 1 - d, 2)
            })
            .sum();
        twice / 2
    }

    /// Counts transitive triples by enumerating every 3-subset and checks the
    /// result against the degree-sum formula.
    pub fn census(&self) -> TriangleCensus {
        let n = self.n;
        let mut transitive = 0u64;
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    if self.triple_is_transitive(x, y, z) {
                        transitive += 1;
                    }
                }
            }
        }
        let by_degrees = self.transitive_by_degrees();
        assert_eq!(
            transitive, by_degrees,
            "triple enumeration disagrees with degree-sum identity"
        );
        TriangleCensus {
            transitive,
            cyclic: binomial(n as u64, 3) - transitive,
        }
    }

    /// Every edge flipped.
    pub fn reverse(&self) -> Tournament {
        Self::from_fn(self.n, |i, j| self.has_edge(j, i)).expect("same n")
    }

    /// Subtournament on `subset`, relabelled `0..|S|` in ascending vertex order.
    pub fn induced(&self, subset: &[usize]) -> Result<Tournament> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut s = subset.to_vec();
        s.sort_unstable();
        for w in s.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateVertex(w[0]));
            }
        }
        if let Some(&v) = s.last().filter(|&&v| v >= self.n) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Self::from_fn(s.len(), |i, j| self.has_edge(s[i], s[j]))
    }

    /// Tournament in which vertex `v` is renamed `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Tournament> {
        if perm.len() != self.n {
            return Err(Error::SizeMismatch(format!(
                "permutation of length {} for n={}",
                perm.len(),
                self.n
            )));
        }
        let mut inverse = vec![usize::MAX; self.n];
        for (v, &p) in perm.iter().enumerate() {
            if p >= self.n || inverse[p] != usize::MAX {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            inverse[p] = v;
        }
        Self::from_fn(self.n, |i, j| self.has_edge(inverse[i], inverse[j]))
    }

    pub fn is_transitive(&self) -> bool {
        self.census().cyclic == 0
    }

    /// A largest vertex set inducing a transitive subtournament, ascending.
    pub fn max_transitive_subset(&self) -> Result<Vec<usize>> {
        if self.n > MAX_TRANSITIVE_SEARCH {
            return Err(Error::TooLarge {
                what: "max_transitive_subset vertex count",
                limit: MAX_TRANSITIVE_SEARCH,
                got: self.n,
            });
        }
        let all = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let mut best = 0u64;
        self.extend_chain(0, all, &mut best);
        Ok(mask_to_vec(best))
    }

    // `chain` is transitive and every vertex of `candidates` is beaten by all of
    // it, so any transitive subset of the candidates extends the chain.
    fn extend_chain(&self, chain: u64, candidates: u64, best: &mut u64) {
        if chain.count_ones() > best.count_ones() {
            *best = chain;
        }
        if chain.count_ones() + candidates.count_ones() <= best.count_ones() {
            return;
        }
        let mut rest = candidates;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.extend_chain(chain | 1 << v, candidates & self.out_mask(v), best);
        }
    }

    /// Two-line text form: `n=<int>` then the upper triangle in row-major
    /// pair order, `1` meaning `i -> j`.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        s.reserve(pair_count(self.n) + 1);
        for i in 0..self.n {
            for j in i + 1..self.n {
                s.push(if self.has_edge(i, j) { '1' } else { '0' });
            }
        }
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Tournament> {
        let bytes = text.as_bytes();
        if !text.starts_with("n=") {
            return Err(Error::parse(0, "expected header \"n=<int>\""));
        }
        let header_end = text.find('\n').unwrap_or(text.len());
        let digits = text[2..header_end].trim_end_matches('\r');
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(2, "vertex count must be a decimal integer"));
        }
        let n: usize = digits
            .parse()
            .map_err(|_| Error::parse(2, "vertex count out of range"))?;
        check_n(n).map_err(|e| Error::parse(2, e.to_string()))?;
        let body_start = (header_end + 1).min(bytes.len());
        let body_end = text[body_start..]
            .find('\n')
            .map_or(bytes.len(), |p| body_start + p);
        let body = text[body_start..body_end].trim_end_matches('\r');
        let expected = pair_count(n);
        if let Some(pos) = body.bytes().position(|b| b != b'0' && b != b'1') {
            return Err(Error::parse(body_start + pos, "edge string may contain only '0' and '1'"));
        }
        if body.len() != expected {
            return Err(Error::parse(
                body_start + body.len().min(expected),
                format!("expected {expected} edge characters, found {}", body.len()),
            ));
        }
        if let Some(pos) = text[body_end..].bytes().position(|b| !b.is_ascii_whitespace()) {
            return Err(Error::parse(body_end + pos, "trailing data after edge string"));
        }
        let body = body.as_bytes();
        Self::from_fn(n, |i, j| body[edge_index(n, i, j)] == b'1')
    }
}

impl fmt::Display for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tournament({})", self.to_text().trim_end().replace('\n', " "))
    }
}

impl FromStr for Tournament {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tournament::parse(s)
    }
}

pub(crate) fn mask_to_vec(mut mask: u64) -> Vec<usize> {
    let mut v = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        v.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    v
}

/// Lower bound `k(k-1)(k-3)/8` on the number of transitive triples of any
/// `k`-vertex tournament.
pub fn transitive_lower_bound(k: usize) -> Result<Rational> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k must be at least 3, got {k}")));
    }
    let k = k as i64;
    Ok(Rational::new(k * (k - 1) * (k - 3), 8))
}

impl ScoreSequence {
    /// Sorts `degrees` non-increasingly.
    pub fn new(mut degrees: Vec<usize>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        ScoreSequence(degrees)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Landau's condition: the `m` smallest scores sum to at least `C(m,2)`,
    /// with equality for `m = n`.
    pub fn satisfies_landau(&self) -> bool {
        let mut prefix = 0u64;
        for (m, &s) in self.0.iter().rev().enumerate() {
            prefix += s as u64;
            if prefix < binomial(m as u64 + 1, 2) {
                return false;
            }
        }
        prefix == binomial(self.0.len() as u64, 2)
    }

    /// Score obtained by reversing every edge.
    pub fn complement(&self) -> ScoreSequence {
        let n = self.0.len();
        ScoreSequence::new(self.0.iter().map(|&d| n - 1 - d).collect())
    }
}

impl fmt::Display for ScoreSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for ScoreSequence {
    type Err = Error;

    /// Comma-separated out-degrees, any order.
    fn from_str(s: &str) -> Result<Self> {
        let mut degrees = Vec::new();
        let mut offset = 0;
        for part in s.split(',') {
            let d = part
                .trim()
                .parse()
                .map_err(|_| Error::parse(offset, format!("bad score entry {part:?}")))?;
            degrees.push(d);
            offset += part.len() + 1;
        }
        let seq = ScoreSequence::new(degrees);
        if !seq.satisfies_landau() {
            return Err(Error::InvalidArgument(format!("{seq} is not a tournament score sequence")));
        }
        Ok(seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qr7() -> Tournament {
        Tournament::from_fn(7, |i, j| matches!((j - i) % 7, 1 | 2 | 4)).unwrap()
    }

    fn brute_transitive(t: &Tournament) -> u64 {
        let n = t.n();
        let mut count = 0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if x != y && y != z && x != z && t.has_edge(x, y) && t.has_edge(x, z) && t.has_edge(y, z) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn census_examples() {
        let tt3 = Tournament::transitive(3).unwrap();
        assert_eq!(tt3.census(), TriangleCensus { transitive: 1, cyclic: 0 });
        assert_eq!(Tournament::cycle3().census(), TriangleCensus { transitive: 0, cyclic: 1 });
        assert_eq!(qr7().census(), TriangleCensus { transitive: 21, cyclic: 14 });
        assert_eq!(brute_transitive(&qr7()), 21);
        let tt7 = Tournament::transitive(7).unwrap();
        assert_eq!(tt7.census(), TriangleCensus { transitive: 35, cyclic: 0 });
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(transitive_lower_bound(7).unwrap(), Rational::from_integer(21));
        assert_eq!(transitive_lower_bound(3).unwrap(), Rational::from_integer(0));
        assert_eq!(transitive_lower_bound(4).unwrap(), Rational::new(3, 2));
        assert!(transitive_lower_bound(2).is_err());
    }

    #[test]
    fn reverse_examples() {
        let tt3 = Tournament::transitive(3).unwrap();
        let r = tt3.reverse();
        assert!(r.has_edge(2, 0) && r.has_edge(2, 1) && r.has_edge(1, 0));
        assert_eq!(r.census().transitive, 1);
        let c = Tournament::cycle3().reverse();
        assert!(c.has_edge(1, 0) && c.has_edge(2, 1) && c.has_edge(0, 2));
        assert_eq!(c.census().cyclic, 1);
    }

    #[test]
    fn reverse_complements_scores() {
        let base = Tournament::random(7, 5).unwrap();
        let r = base.reverse();
        assert_eq!(r.score_sequence(), base.score_sequence().complement());
        let s: ScoreSequence = "4,4,3,3,3,3,1".parse().unwrap();
        assert_eq!(s.complement(), "5,3,3,3,3,2,2".parse().unwrap());
    }

    #[test]
    fn induced_examples() {
        let tt7 = Tournament::transitive(7).unwrap();
        assert_eq!(tt7.induced(&[5, 1, 3]).unwrap(), Tournament::transitive(3).unwrap());
        let t = Tournament::random(9, 2).unwrap();
        assert_eq!(t.induced(&(0..9).collect::<Vec<_>>()).unwrap(), t);
        let sub = qr7().induced(&[0, 1, 3]).unwrap();
        // 0->1, 1->3, 3->0 under the residues {1,2,4}.
        assert_eq!(sub.census().transitive, brute_transitive(&sub));
        assert_eq!(sub.census().cyclic, 1);
        assert!(matches!(t.induced(&[]), Err(Error::EmptySubset)));
        assert!(matches!(t.induced(&[0, 9]), Err(Error::VertexOutOfRange { .. })));
        assert!(matches!(t.induced(&[1, 1]), Err(Error::DuplicateVertex(1))));
    }

    #[test]
    fn random_tournament_contract() {
        let t1 = Tournament::random(1, 99).unwrap();
        assert_eq!(t1.edge_count(), 0);
        assert_eq!(Tournament::random(20, 7).unwrap(), Tournament::random(20, 7).unwrap());
        assert!(Tournament::random(0, 1).is_err());
        assert!(Tournament::random(MAX_VERTICES + 1, 1).is_err());
    }

    #[test]
    fn random_tournament_triangle_mean() {
        let draws = 1000;
        let ts: Vec<f64> = (0..draws)
            .map(|s| Tournament::random(7, s).unwrap().census().cyclic as f64)
            .collect();
        let mean = ts.iter().sum::<f64>() / draws as f64;
        let var = ts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        assert!((mean - 35.0 / 4.0).abs() <= 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn transitive_subsets() {
        let tt7 = Tournament::transitive(7).unwrap();
        assert!(tt7.is_transitive());
        assert_eq!(tt7.max_transitive_subset().unwrap().len(), 7);
        let c3 = Tournament::cycle3();
        assert!(!c3.is_transitive());
        assert_eq!(c3.max_transitive_subset().unwrap().len(), 2);
        let q = qr7();
        let best = q.max_transitive_subset().unwrap();
        assert_eq!(best.len(), 3);
        assert!(q.induced(&best).unwrap().is_transitive());
        assert!(Tournament::random(25, 0).unwrap().max_transitive_subset().is_err());
    }

    #[test]
    fn max_transitive_subset_matches_brute_force() {
        for seed in 0..30 {
            let n = 4 + (seed as usize % 7);
            let t = Tournament::random(n, seed).unwrap();
            let brute = (0u32..1 << n)
                .filter(|&m| t.induced(&mask_to_vec(m as u64)).is_ok_and(|s| s.is_transitive()))
                .map(|m| m.count_ones())
                .max()
                .unwrap();
            let got = t.max_transitive_subset().unwrap();
            assert_eq!(got.len() as u32, brute);
            assert!(t.induced(&got).unwrap().is_transitive());
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let t = Tournament::random(11, 4).unwrap();
        let text = t.to_text();
        assert_eq!(Tournament::parse(&text).unwrap(), t);
        assert_eq!(Tournament::parse(&text).unwrap().to_text(), text);
        assert_eq!(Tournament::cycle3().to_text(), "n=3\n101\n");
        assert_eq!(Tournament::parse("n=1\n").unwrap().n(), 1);
        match Tournament::parse("n=3\n1x1\n") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        match Tournament::parse("n=3\n10\n") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Tournament::parse("m=3"), Err(Error::Parse { offset: 0, .. })));
        assert!(Tournament::parse("n=3\n101\nextra").is_err());
    }

    #[test]
    fn landau_condition() {
        assert!(ScoreSequence::new(vec![1, 1, 1]).satisfies_landau());
        assert!(!ScoreSequence::new(vec![2, 2, 0]).satisfies_landau());
        assert!(!ScoreSequence::new(vec![0, 0, 3]).satisfies_landau());
        assert!("3,3,0".parse::<ScoreSequence>().is_err());
    }
}
