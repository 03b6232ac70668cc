//! Copies of `TT_k`, exact maximum packings, greedy packings and certificate
//! checking.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::bitset::{edge_index, pair_count, EdgeSet};
use crate::error::{Error, Result};
use crate::rng;
use crate::tournament::Tournament;

/// Largest edge count the exact solver handles (one `u128` mask per copy).
pub const MAX_EXACT_EDGES: usize = 128;

/// All transitive `k`-vertex subtournaments of a host.
///
/// Each copy is stored with its vertices in transitive order (source first)
/// together with the indices of its `C(k,2)` edges. Copies are ordered by
/// their sorted vertex sets.
#[derive(Clone, Debug)]
pub struct CopyList {
    n: usize,
    k: usize,
    vertices: Vec<u16>,
    edges: Vec<u32>,
}

impl CopyList {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.vertices.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices of copy `i`, source first.
    pub fn ordered_vertices(&self, i: usize) -> &[u16] {
        &self.vertices[i * self.k..(i + 1) * self.k]
    }

    pub fn vertex_set(&self, i: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.ordered_vertices(i).iter().map(|&x| x as usize).collect();
        v.sort_unstable();
        v
    }

    pub fn edge_ids(&self, i: usize) -> &[u32] {
        let m = self.k * (self.k - 1) / 2;
        &self.edges[i * m..(i + 1) * m]
    }

    /// Directed edges `(tail, head)` of copy `i`, sorted.
    pub fn directed_edges(&self, i: usize) -> Vec<(usize, usize)> {
        let order = self.ordered_vertices(i);
        let mut e = Vec::with_capacity(self.k * (self.k - 1) / 2);
        for a in 0..order.len() {
            for b in a + 1..order.len() {
                e.push((order[a] as usize, order[b] as usize));
            }
        }
        e.sort_unstable();
        e
    }

    /// Checks that every copy is a transitive subtournament of `t` with
    /// consistent edge indices and that no vertex set repeats.
    pub fn validate(&self, t: &Tournament) -> Result<()> {
        if t.n() != self.n {
            return Err(Error::SizeMismatch(format!("copy list for n={} used with n={}", self.n, t.n())));
        }
        let mut seen = HashSet::new();
        for i in 0..self.len() {
            let order = self.ordered_vertices(i);
            for a in 0..order.len() {
                for b in a + 1..order.len() {
                    if !t.has_edge(order[a] as usize, order[b] as usize) {
                        return Err(Error::InvalidArgument(format!("copy {i} is not transitive in the host")));
                    }
                }
            }
            let mut expected: Vec<u32> = self
                .directed_edges(i)
                .into_iter()
                .map(|(u, v)| edge_index(self.n, u.min(v), u.max(v)) as u32)
                .collect();
            expected.sort_unstable();
            let mut stored = self.edge_ids(i).to_vec();
            stored.sort_unstable();
            if stored != expected || !seen.insert(self.vertex_set(i)) {
                return Err(Error::InvalidArgument(format!("copy {i} is inconsistent or duplicated")));
            }
        }
        Ok(())
    }
}

/// All vertex subsets of size `k` inducing a transitive subtournament.
pub fn enumerate_copies(t: &Tournament, k: usize) -> Result<CopyList> {
    let n = t.n();
    if k < 3 || k > n {
        return Err(Error::CopySize { k, n });
    }
    let mut list = CopyList {
        n,
        k,
        vertices: Vec::new(),
        edges: Vec::new(),
    };
    let mut chosen = Vec::with_capacity(k);
    collect_copies(t, k, 0, &mut chosen, &mut list);
    Ok(list)
}

fn collect_copies(t: &Tournament, k: usize, from: usize, chosen: &mut Vec<usize>, out: &mut CopyList) {
    if chosen.len() == k {
        // In a transitive set the in-set out-degrees are k-1, ..., 0.
        let mut order = chosen.clone();
        order.sort_by_key(|&v| std::cmp::Reverse(chosen.iter().filter(|&&u| t.has_edge(v, u)).count()));
        out.vertices.extend(order.iter().map(|&v| v as u16));
        for a in 0..k {
            for b in a + 1..k {
                let (x, y) = (chosen[a], chosen[b]);
                out.edges.push(edge_index(t.n(), x, y) as u32);
            }
        }
        return;
    }
    for v in from..=t.n() - (k - chosen.len()) {
        // Adding v keeps the set transitive iff it closes no directed triangle.
        let closes_cycle = chosen.iter().enumerate().any(|(a, &x)| {
            chosen[a + 1..].iter().any(|&y| !t.triple_is_transitive(x, y, v))
        });
        if closes_cycle {
            continue;
        }
        chosen.push(v);
        collect_copies(t, k, v + 1, chosen, out);
        chosen.pop();
    }
}

/// An edge-disjoint set of `TT_k` copies in an `n`-vertex host.
#[derive(Clone, Debug, Serialize)]
pub struct Packing {
    pub n: usize,
    pub k: usize,
    /// Vertex sets of the members, each ascending.
    pub copies: Vec<Vec<usize>>,
    #[serde(skip)]
    pub covered_edges: EdgeSet,
    /// True only when the search proved `copies.len()` is the packing number.
    pub optimal: bool,
    pub nodes_explored: u64,
}

impl Packing {
    pub fn empty(n: usize, k: usize) -> Self {
        Packing {
            n,
            k,
            copies: Vec::new(),
            covered_edges: EdgeSet::new(pair_count(n)),
            optimal: false,
            nodes_explored: 0,
        }
    }

    pub fn value(&self) -> usize {
        self.copies.len()
    }

    /// Adds a copy by vertex set, marking its pairs covered. Does not check
    /// transitivity or disjointness; see [`verify_packing`].
    pub fn push(&mut self, mut vertices: Vec<usize>) {
        vertices.sort_unstable();
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                self.covered_edges.insert(edge_index(self.n, vertices[a], vertices[b]));
            }
        }
        self.copies.push(vertices);
    }

    fn from_members(list: &CopyList, members: &[u32]) -> Self {
        let mut p = Packing::empty(list.n, list.k);
        for &c in members {
            p.push(list.vertex_set(c as usize));
        }
        p
    }
}

/// Search limits for [`max_packing_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub time_budget: Option<Duration>,
    /// Stop as soon as a packing of this size is found.
    pub stop_at: Option<usize>,
}

pub fn max_packing_exact(t: &Tournament, k: usize, time_budget: Option<Duration>) -> Result<Packing> {
    let copies = enumerate_copies(t, k)?;
    max_packing_with(
        t,
        &copies,
        SolveOptions {
            time_budget,
            stop_at: None,
        },
    )
}

/// Branch and bound over edges: take the lowest coverable edge and branch on
/// every live copy through it, then on leaving that edge uncovered.
pub fn max_packing_with(t: &Tournament, copies: &CopyList, options: SolveOptions) -> Result<Packing> {
    copies.validate(t)?;
    let edges = pair_count(t.n());
    if edges > MAX_EXACT_EDGES {
        return Err(Error::TooLarge {
            what: "exact solver edge count",
            limit: MAX_EXACT_EDGES,
            got: edges,
        });
    }
    let masks: Vec<u128> = (0..copies.len())
        .map(|c| copies.edge_ids(c).iter().fold(0u128, |m, &e| m | 1 << e))
        .collect();
    let mut per_edge = vec![Vec::new(); edges];
    for (c, &m) in masks.iter().enumerate() {
        let mut rest = m;
        while rest != 0 {
            per_edge[rest.trailing_zeros() as usize].push(c as u32);
            rest &= rest - 1;
        }
    }
    let n = t.n();
    let incident: Vec<u128> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| u != v)
                .fold(0u128, |m, u| m | 1 << edge_index(n, u.min(v), u.max(v)))
        })
        .collect();
    let mut search = Search {
        masks: &masks,
        incident,
        k: copies.k(),
        per_edge,
        edges_per_copy: (copies.k() * (copies.k() - 1) / 2) as u32,
        best: Vec::new(),
        current: Vec::new(),
        nodes: 0,
        deadline: options.time_budget.map(|b| Instant::now() + b),
        stop_at: options.stop_at,
        halted: false,
    };
    let all: Vec<u32> = (0..masks.len() as u32).collect();
    let full = if edges == 128 { u128::MAX } else { (1u128 << edges) - 1 };
    search.dfs(full, &all);
    let mut packing = Packing::from_members(copies, &search.best);
    packing.optimal = !search.halted;
    packing.nodes_explored = search.nodes;
    Ok(packing)
}

struct Search<'a> {
    masks: &'a [u128],
    incident: Vec<u128>,
    k: usize,
    per_edge: Vec<Vec<u32>>,
    edges_per_copy: u32,
    best: Vec<u32>,
    current: Vec<u32>,
    nodes: u64,
    deadline: Option<Instant>,
    stop_at: Option<usize>,
    halted: bool,
}

impl Search<'_> {
    fn record(&mut self, extra: &[u32]) {
        if self.current.len() + extra.len() > self.best.len() {
            self.best = self.current.iter().chain(extra).copied().collect();
            if self.stop_at.is_some_and(|s| self.best.len() >= s) {
                self.halted = true;
            }
        }
    }

    // Edges that every packing must hit once per copy: a greedy hitting set of
    // the live copies bounds the number of disjoint copies among them.
    fn hitting_bound(&self, live: &[u32]) -> usize {
        let mut alive = live.to_vec();
        let mut picked = 0;
        let mut counts = [0u32; 128];
        while !alive.is_empty() {
            counts.fill(0);
            for &c in &alive {
                let mut m = self.masks[c as usize];
                while m != 0 {
                    counts[m.trailing_zeros() as usize] += 1;
                    m &= m - 1;
                }
            }
            let (edge, _) = counts.iter().enumerate().max_by_key(|&(e, &c)| (c, std::cmp::Reverse(e))).unwrap();
            alive.retain(|&c| self.masks[c as usize] >> edge & 1 == 0);
            picked += 1;
        }
        picked
    }

    // A copy through v uses k-1 of v's edges, so the edges left uncovered have
    // degree congruent to v's coverable degree mod k-1 at every vertex, and
    // their number is congruent to the coverable edge count mod C(k,2).
    fn degree_bound(&self, coverable: u128) -> usize {
        let m = self.edges_per_copy as usize;
        let total = coverable.count_ones() as usize;
        let mut residues = 0;
        let mut by_vertex = 0;
        for &inc in &self.incident {
            let d = (inc & coverable).count_ones() as usize;
            residues += d % (self.k - 1);
            by_vertex += d / (self.k - 1);
        }
        let mut left = residues.div_ceil(2);
        while left < total && !(total - left).is_multiple_of(m) {
            left += 1;
        }
        // An even graph with one or two edges does not exist.
        if self.k == 3 && residues == 0 && (left == 1 || left == 2) {
            left += 3;
        }
        ((total.saturating_sub(left)) / m).min(by_vertex / self.k)
    }

    fn dfs(&mut self, avail: u128, parent_live: &[u32]) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(512) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.halted = true;
        }
        if self.halted {
            return;
        }
        let live: Vec<u32> = parent_live
            .iter()
            .copied()
            .filter(|&c| self.masks[c as usize] & !avail == 0)
            .collect();
        let have = self.current.len();
        if live.is_empty() {
            self.record(&[]);
            return;
        }
        let coverable = live.iter().fold(0u128, |m, &c| m | self.masks[c as usize]);
        let cheap = self.degree_bound(coverable);
        if have + cheap <= self.best.len() {
            return;
        }
        let mut greedy = Vec::new();
        let mut used = 0u128;
        for &c in &live {
            if self.masks[c as usize] & used == 0 {
                used |= self.masks[c as usize];
                greedy.push(c);
            }
        }
        self.record(&greedy);
        if self.halted || greedy.len() == cheap {
            return;
        }
        let bound = cheap.min(self.hitting_bound(&live));
        if have + bound <= self.best.len() || greedy.len() == bound {
            return;
        }
        let edge = coverable.trailing_zeros() as usize;
        let through: Vec<u32> = self.per_edge[edge]
            .iter()
            .copied()
            .filter(|&c| self.masks[c as usize] & !avail == 0)
            .collect();
        for c in through {
            self.current.push(c);
            self.dfs(avail & !self.masks[c as usize], &live);
            self.current.pop();
            if self.halted {
                return;
            }
        }
        self.dfs(avail & !(1u128 << edge), &live);
    }
}

/// Random-order maximal packing: scan all copies in a seeded shuffled order
/// and keep each one whose edges are still free.
pub fn greedy_packing(t: &Tournament, k: usize, seed: u64) -> Result<Packing> {
    let copies = enumerate_copies(t, k)?;
    Ok(greedy_from_copies(&copies, seed))
}

pub fn greedy_from_copies(copies: &CopyList, seed: u64) -> Packing {
    let mut order: Vec<u32> = (0..copies.len() as u32).collect();
    order.shuffle(&mut rng::rng_from_seed(seed));
    let mut packing = Packing::empty(copies.n(), copies.k());
    for c in order {
        let ids = copies.edge_ids(c as usize);
        if ids.iter().all(|&e| !packing.covered_edges.contains(e as usize)) {
            packing.push(copies.vertex_set(c as usize));
        }
    }
    packing
}

/// Certificate check that uses only the host's adjacency: every member has
/// `k` distinct in-range vertices inducing a transitive subtournament, members
/// share no pair, and the recorded covered-edge set is their union.
pub fn verify_packing(t: &Tournament, p: &Packing) -> bool {
    if p.n != t.n() || p.k < 3 {
        return false;
    }
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    for member in &p.copies {
        let distinct: HashSet<usize> = member.iter().copied().collect();
        if member.len() != p.k || distinct.len() != p.k || member.iter().any(|&v| v >= t.n()) {
            return false;
        }
        // Transitive iff the in-set out-degrees are pairwise distinct.
        let degrees: HashSet<usize> = member
            .iter()
            .map(|&v| member.iter().filter(|&&u| t.has_edge(v, u)).count())
            .collect();
        if degrees.len() != p.k {
            return false;
        }
        for (a, &x) in member.iter().enumerate() {
            for &y in &member[a + 1..] {
                if !pairs.insert((x.min(y), x.max(y))) {
                    return false;
                }
            }
        }
    }
    let recorded: HashSet<(usize, usize)> = p
        .covered_edges
        .iter()
        .map(|e| crate::bitset::edge_pair(t.n(), e))
        .collect();
    p.covered_edges.capacity() == pair_count(t.n()) && recorded == pairs
}
