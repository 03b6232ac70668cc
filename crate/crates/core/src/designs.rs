//! Block designs: Steiner triple systems on 7 and 9 points and the lines of
//! the affine plane of order 7.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::rng;
use crate::tournament::Tournament;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockDesign {
    pub point_count: usize,
    pub block_size: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl BlockDesign {
    /// Sorts each block and the block list.
    pub fn normalized(mut self) -> Self {
        for b in &mut self.blocks {
            b.sort_unstable();
        }
        self.blocks.sort();
        self
    }

    /// Image under the point map `i -> perm[i]`, normalized.
    pub fn permuted(&self, perm: &[usize]) -> BlockDesign {
        BlockDesign {
            point_count: self.point_count,
            block_size: self.block_size,
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|&p| perm[p]).collect())
                .collect(),
        }
        .normalized()
    }

    /// Uniform block size, points in range, and every pair in exactly one block.
    pub fn verify(&self) -> bool {
        let v = self.point_count;
        let mut seen = vec![false; v * v];
        let mut pairs = 0;
        for b in &self.blocks {
            if b.len() != self.block_size || b.iter().any(|&p| p >= v) {
                return false;
            }
            for (i, &x) in b.iter().enumerate() {
                for &y in &b[i + 1..] {
                    if x == y {
                        return false;
                    }
                    let key = x.min(y) * v + x.max(y);
                    if seen[key] {
                        return false;
                    }
                    seen[key] = true;
                    pairs += 1;
                }
            }
        }
        pairs == v * v.saturating_sub(1) / 2
    }

    pub fn replication(&self, point: usize) -> usize {
        self.blocks.iter().filter(|b| b.contains(&point)).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("v={} k={} b={}\n", self.point_count, self.block_size, self.blocks.len());
        for b in &self.blocks {
            s.push_str(&b.iter().join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<BlockDesign> {
        let header = text.lines().next().unwrap_or_default();
        let mut fields = [None; 3];
        for (slot, key) in ["v=", "k=", "b="].iter().enumerate() {
            fields[slot] = header
                .split_whitespace()
                .nth(slot)
                .and_then(|f| f.strip_prefix(key))
                .and_then(|x| x.parse::<usize>().ok());
        }
        let [Some(v), Some(k), Some(b)] = fields else {
            return Err(Error::parse(0, "expected header \"v=<points> k=<blocksize> b=<blocks>\""));
        };
        let mut blocks = Vec::with_capacity(b);
        let mut offset = header.len() + 1;
        for line in text.lines().skip(1).take(b) {
            let block: Vec<usize> = line
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::parse(offset, format!("bad point {x:?}"))))
                .collect::<Result<_>>()?;
            if block.len() != k || block.iter().any(|&p| p >= v) {
                return Err(Error::parse(offset, "block has wrong size or out-of-range point"));
            }
            blocks.push(block);
            offset += line.len() + 1;
        }
        if blocks.len() != b {
            return Err(Error::parse(text.len(), format!("expected {b} blocks, found {}", blocks.len())));
        }
        Ok(BlockDesign {
            point_count: v,
            block_size: k,
            blocks,
        })
    }

    /// Bitmask encoding used to deduplicate permutation orbits.
    fn key(&self) -> Vec<u64> {
        let mut k: Vec<u64> = self
            .blocks
            .iter()
            .map(|b| b.iter().fold(0u64, |m, &p| m | 1 << p))
            .collect();
        k.sort_unstable();
        k
    }
}

impl fmt::Display for BlockDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Blocks `{i, i+1, i+3} mod 7`.
pub fn fano_plane() -> BlockDesign {
    BlockDesign {
        point_count: 7,
        block_size: 3,
        blocks: (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect(),
    }
    .normalized()
}

/// Lines of the affine plane of order 3, the base STS(9).
pub fn sts9_base() -> BlockDesign {
    BlockDesign {
        point_count: 9,
        block_size: 3,
        blocks: affine_lines(3),
    }
    .normalized()
}

fn orbit(base: &BlockDesign) -> Vec<BlockDesign> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for perm in (0..base.point_count).permutations(base.point_count) {
        let d = base.permuted(&perm);
        if seen.insert(d.key()) {
            out.push(d);
        }
    }
    out.sort_by_key(BlockDesign::key);
    out
}

/// Every labelled STS(7) on points `0..7`, as the permutation orbit of the Fano plane.
pub fn all_sts7() -> &'static [BlockDesign] {
    static ALL: OnceLock<Vec<BlockDesign>> = OnceLock::new();
    ALL.get_or_init(|| orbit(&fano_plane()))
}

/// Every labelled STS(9) on points `0..9`.
pub fn all_sts9() -> &'static [BlockDesign] {
    static ALL: OnceLock<Vec<BlockDesign>> = OnceLock::new();
    ALL.get_or_init(|| orbit(&sts9_base()))
}

/// The Fano plane under a seeded uniform permutation; uniform over [`all_sts7`].
pub fn random_sts7(seed: u64) -> BlockDesign {
    fano_plane().permuted(&rng::permutation(7, seed))
}

/// Number of blocks of `design` inducing a directed triangle in `t`.
pub fn sts_triangle_count(t: &Tournament, design: &BlockDesign) -> Result<usize> {
    if t.n() != design.point_count || design.block_size != 3 {
        return Err(Error::SizeMismatch(format!(
            "tournament on {} vertices vs design v={} k={}",
            t.n(),
            design.point_count,
            design.block_size
        )));
    }
    Ok(design
        .blocks
        .iter()
        .filter(|b| !t.triple_is_transitive(b[0], b[1], b[2]))
        .count())
}

// Point (x, y) of F_q x F_q is x*q + y. Lines y = s*x + c, plus x = c.
fn affine_lines(q: usize) -> Vec<Vec<usize>> {
    let mut lines = Vec::with_capacity(q * (q + 1));
    for slope in 0..q {
        for intercept in 0..q {
            lines.push((0..q).map(|x| x * q + (slope * x + intercept) % q).collect());
        }
    }
    for c in 0..q {
        lines.push((0..q).map(|y| c * q + y).collect());
    }
    lines
}

/// The 56 lines of AG(2,7): a decomposition of `K_49` into copies of `K_7`.
pub fn ag2_lines(q: usize) -> Result<BlockDesign> {
    if q != 7 {
        return Err(Error::InvalidArgument(format!("only q=7 is supported, got {q}")));
    }
    Ok(BlockDesign {
        point_count: q * q,
        block_size: q,
        blocks: affine_lines(q),
    }
    .normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn fano_properties() {
        let f = fano_plane();
        assert!(f.verify());
        assert_eq!(f.blocks.len(), 7);
        let mut broken = f.clone();
        broken.blocks[0][0] = broken.blocks[0][1];
        assert!(!broken.verify());
        let mut swapped = f.clone();
        swapped.blocks[0][0] = (0..7).find(|p| !f.blocks[0].contains(p)).unwrap();
        assert!(!swapped.verify());
    }

    #[test]
    fn sts7_orbit() {
        let all = all_sts7();
        assert_eq!(all.len(), 30);
        assert!(all.iter().all(BlockDesign::verify));
        // Every triple lies in 6 of the 30 systems.
        for t in (0..7).combinations(3) {
            let hits = all.iter().filter(|d| d.blocks.contains(&t)).count();
            assert_eq!(hits, 6, "{t:?}");
        }
        let r = random_sts7(5);
        assert_eq!(r, random_sts7(5));
        assert!(all.contains(&r));
    }

    #[test]
    fn sts9_orbit() {
        assert!(sts9_base().verify());
        assert_eq!(sts9_base().blocks.len(), 12);
        // 9! / |AGL(2,3)| = 362880 / 432.
        assert_eq!(all_sts9().len(), 840);
    }

    #[test]
    fn affine_plane() {
        let d = ag2_lines(7).unwrap();
        assert_eq!(d.blocks.len(), 56);
        assert!(d.verify());
        assert!((0..49).all(|p| d.replication(p) == 8));
        assert!(ag2_lines(5).is_err());
    }

    #[test]
    fn triangle_counts() {
        let tt7 = Tournament::transitive(7).unwrap();
        assert!(all_sts7().iter().all(|d| sts_triangle_count(&tt7, d).unwrap() == 0));
        let qr7 = Tournament::from_fn(7, |i, j| matches!((j - i) % 7, 1 | 2 | 4)).unwrap();
        let total: usize = all_sts7().iter().map(|d| sts_triangle_count(&qr7, d).unwrap()).sum();
        assert_eq!(Rational::new(total as i64, 30), Rational::new(14, 5));
        assert!(sts_triangle_count(&Tournament::transitive(8).unwrap(), &fano_plane()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let d = ag2_lines(7).unwrap();
        let text = d.to_text();
        assert!(text.starts_with("v=49 k=7 b=56\n"));
        assert_eq!(BlockDesign::parse(&text).unwrap(), d);
        assert!(BlockDesign::parse("v=7 k=3 b=1\n0 1 9\n").is_err());
        assert!(BlockDesign::parse("v=7 k=3\n").is_err());
    }
}
