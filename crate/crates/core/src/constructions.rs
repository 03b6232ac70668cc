//! Extremal constructions: the cyclically oriented Turán 3-partite tournament,
//! the quadratic-residue tournament on 7 vertices, and blow-ups.
//!
//! The Turán construction orients cross edges `V1 -> V2 -> V3 -> V1`. The
//! printed source lists the `V2`-`V3` edges as oriented "from V1 to V2"; only
//! the cyclic reading makes every cross-class triple a directed triangle, which
//! is what the upper bound needs.

use serde::Serialize;

use crate::bitset::pair_count;
use crate::error::{Error, Result};
use crate::packing::enumerate_copies;
use crate::rng;
use crate::tournament::{Tournament, MAX_VERTICES};

/// Note emitted alongside generated Turán tournaments.
pub const TURAN_ORIENTATION_NOTE: &str =
    "cross edges oriented V1->V2->V3->V1; the source's V2-V3 rule (\"from V1 to V2\") is read as V2->V3";

/// Orientation rule for edges inside a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filler {
    /// Lower index beats higher index.
    Transitive,
    /// Independent fair coins keyed by the seed.
    Random { seed: u64 },
}

impl Filler {
    fn forward(self, i: usize, j: usize, n: usize) -> bool {
        match self {
            Filler::Transitive => true,
            Filler::Random { seed } => rng::coin(seed, crate::bitset::edge_index(n, i, j) as u64),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ConstructionKind {
    Turan3,
    Qr7,
    Blowup { factor: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub n: usize,
    pub filler: Filler,
}

impl ConstructionSpec {
    pub fn turan3(n: usize, filler: Filler) -> Self {
        ConstructionSpec {
            kind: ConstructionKind::Turan3,
            n,
            filler,
        }
    }

    pub fn qr7() -> Self {
        ConstructionSpec {
            kind: ConstructionKind::Qr7,
            n: 7,
            filler: Filler::Transitive,
        }
    }

    pub fn qr7_blowup(factor: usize, filler: Filler) -> Self {
        ConstructionSpec {
            kind: ConstructionKind::Blowup { factor },
            n: 7 * factor,
            filler,
        }
    }

    pub fn build(&self) -> Result<Tournament> {
        match self.kind {
            ConstructionKind::Turan3 => turan3_tournament(self.n, self.filler),
            ConstructionKind::Qr7 => Ok(qr7()),
            ConstructionKind::Blowup { factor } => {
                if factor == 0 || 7 * factor != self.n {
                    return Err(Error::InvalidArgument(format!(
                        "blow-up of QR7 by {factor} cannot have {} vertices",
                        self.n
                    )));
                }
                blowup(&qr7(), factor, self.filler)
            }
        }
    }
}

/// Class sizes: `ceil(n/3)` first, the rest split as evenly as possible.
pub fn turan3_class_sizes(n: usize) -> [usize; 3] {
    let first = n.div_ceil(3);
    let rest = n - first;
    [first, rest.div_ceil(2), rest / 2]
}

/// Class index of each vertex; classes occupy consecutive index ranges.
pub fn turan3_classes(n: usize) -> Vec<usize> {
    turan3_class_sizes(n)
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
        .collect()
}

/// `ceil(n(n-1)/6 - n/3) = ceil(n(n-3)/6)`.
pub fn conjectured_minimum(n: usize) -> usize {
    (n * n.saturating_sub(3)).div_ceil(6)
}

pub fn intra_class_edges(class_of: &[usize]) -> usize {
    let mut sizes = std::collections::BTreeMap::new();
    for &c in class_of {
        *sizes.entry(c).or_insert(0usize) += 1;
    }
    sizes.values().map(|&s| pair_count(s)).sum()
}

pub fn turan3_tournament(n: usize, filler: Filler) -> Result<Tournament> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("turan3 needs n >= 3, got {n}")));
    }
    let class = turan3_classes(n);
    let t = Tournament::from_fn(n, |i, j| {
        let (a, b) = (class[i], class[j]);
        if a == b {
            filler.forward(i, j, n)
        } else {
            (a + 1) % 3 == b
        }
    })?;
    if !every_transitive_triple_uses_intra_edge(&t, &class) {
        return Err(Error::Verification("turan3 produced a rainbow transitive triple".into()));
    }
    Ok(t)
}

/// True when no transitive triple meets three distinct classes.
pub fn every_transitive_triple_uses_intra_edge(t: &Tournament, class_of: &[usize]) -> bool {
    let n = t.n();
    for x in 0..n {
        for y in x + 1..n {
            if class_of[x] == class_of[y] {
                continue;
            }
            for z in y + 1..n {
                if class_of[z] != class_of[x] && class_of[z] != class_of[y] && t.triple_is_transitive(x, y, z) {
                    return false;
                }
            }
        }
    }
    true
}

/// Vertices `0..7`, `i -> j` iff `j - i` is a nonzero square mod 7.
pub fn qr7() -> Tournament {
    Tournament::from_fn(7, |i, j| matches!((j - i) % 7, 1 | 2 | 4)).expect("n=7 is valid")
}

/// Replaces vertex `v` by the class `v*factor .. (v+1)*factor`; cross edges
/// follow the base tournament.
pub fn blowup(base: &Tournament, factor: usize, filler: Filler) -> Result<Tournament> {
    let n = base.n().checked_mul(factor).filter(|&n| factor >= 1 && n <= MAX_VERTICES);
    let Some(n) = n else {
        return Err(Error::TooLarge {
            what: "blow-up vertex count",
            limit: MAX_VERTICES,
            got: base.n().saturating_mul(factor),
        });
    };
    let t = Tournament::from_fn(n, |i, j| {
        let (a, b) = (i / factor, j / factor);
        if a == b {
            filler.forward(i, j, n)
        } else {
            base.has_edge(a, b)
        }
    })?;
    // A TT_4-free base forces every TT_4 of the blow-up to reuse a class.
    if base.n() >= 4 && n <= 64 && enumerate_copies(base, 4)?.is_empty() {
        let class: Vec<usize> = (0..n).map(|v| v / factor).collect();
        if !every_copy_uses_intra_edge(&t, 4, &class)? {
            return Err(Error::Verification("blow-up has a TT_4 across four classes".into()));
        }
    }
    Ok(t)
}

/// True when every `TT_k` copy of `t` has two vertices in a common class.
pub fn every_copy_uses_intra_edge(t: &Tournament, k: usize, class_of: &[usize]) -> Result<bool> {
    let copies = enumerate_copies(t, k)?;
    Ok((0..copies.len()).all(|c| {
        let vs = copies.ordered_vertices(c);
        vs.iter()
            .enumerate()
            .any(|(a, &x)| vs[a + 1..].iter().any(|&y| class_of[x as usize] == class_of[y as usize]))
    }))
}
