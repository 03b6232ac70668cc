//! Machine checks of the packing bounds: the exhaustive 7-vertex sweep, exact
//! minima of the packing number, the random-subtournament identity, the
//! linear program over triangle classes, and the randomized decomposition
//! pipeline on 49 vertices.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::designs::{ag2_lines, all_sts7, all_sts9, BlockDesign};
use crate::enumeration::CanonicalForm;
use crate::error::{Error, Result};
use crate::packing::{enumerate_copies, max_packing_exact, max_packing_with, verify_packing, Packing, SolveOptions};
use crate::report::{ratio, ratios};
use crate::rng;
use crate::tournament::{binomial, ScoreSequence, Tournament};
use crate::Rational;

/// Block count of the K_7-decomposition of K_49.
pub const PIPELINE_BLOCKS: usize = 56;
pub const PIPELINE_ORDER: usize = 49;

/// Expected per-block packing lower bound from the LP over triangle classes.
pub fn lp_block_value() -> Rational {
    Rational::new(153, 28)
}

/// Leading constant of the resulting `c n^2` lower bound: `(1/42) * 153/28`.
pub fn asymptotic_constant() -> Rational {
    Rational::new(51, 392)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassRecord {
    pub code: String,
    pub cyclic: u64,
    pub packing: usize,
    pub score: ScoreSequence,
}

#[derive(Clone, Debug, Serialize)]
pub struct JointCell {
    pub cyclic: u64,
    pub packing: usize,
    pub classes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SevenVertexReport {
    pub class_count: usize,
    /// `t <= 4` implies `P = 7`.
    pub few_triangles_perfect: bool,
    /// `t <= 11` implies `P >= 6`.
    pub at_most_eleven_gives_six: bool,
    /// `P >= 5` for every class.
    pub always_five: bool,
    pub min_packing: usize,
    pub joint: Vec<JointCell>,
    pub records: Vec<ClassRecord>,
}

fn solve_class(c: &CanonicalForm) -> Result<ClassRecord> {
    let t = c.to_tournament();
    let p = max_packing_exact(&t, 3, None)?;
    debug_assert!(p.optimal);
    Ok(ClassRecord {
        code: c.to_string(),
        cyclic: t.census().cyclic,
        packing: p.value(),
        score: t.score_sequence(),
    })
}

/// Solves every 7-vertex class exactly and checks the three implications.
/// A violated implication is an error naming the offending class.
pub fn verify_seven_vertex_claims(classes: &[CanonicalForm]) -> Result<SevenVertexReport> {
    if classes.iter().any(|c| c.n() != 7) {
        return Err(Error::InvalidArgument("expected 7-vertex classes".into()));
    }
    let records: Vec<ClassRecord> = classes.par_iter().map(solve_class).collect::<Result<_>>()?;
    for r in &records {
        let violated = if r.cyclic <= 4 && r.packing != 7 {
            Some("t <= 4 but P != 7")
        } else if r.cyclic <= 11 && r.packing < 6 {
            Some("t <= 11 but P < 6")
        } else if r.packing < 5 {
            Some("P < 5")
        } else {
            None
        };
        if let Some(what) = violated {
            return Err(Error::Verification(format!(
                "class {} (t={}, P={}): {what}",
                r.code, r.cyclic, r.packing
            )));
        }
    }
    let mut joint: BTreeMap<(u64, usize), usize> = BTreeMap::new();
    for r in &records {
        *joint.entry((r.cyclic, r.packing)).or_default() += 1;
    }
    Ok(SevenVertexReport {
        class_count: records.len(),
        few_triangles_perfect: true,
        at_most_eleven_gives_six: true,
        always_five: true,
        min_packing: records.iter().map(|r| r.packing).min().unwrap_or(0),
        joint: joint
            .into_iter()
            .map(|((cyclic, packing), classes)| JointCell { cyclic, packing, classes })
            .collect(),
        records,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FMinRecord {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "f")]
    pub f_value: usize,
    pub argmin: Vec<String>,
    pub class_count: usize,
}

/// Exact minimum of the `TT_k` packing number over the given classes (all of
/// one order). Classes are solved in parallel against a shared running
/// minimum; a solve stops once it reaches that minimum, and the classes that
/// could attain the final minimum are then re-solved without early exit.
pub fn f_min(classes: &[CanonicalForm], k: usize) -> Result<FMinRecord> {
    let n = classes.first().map(CanonicalForm::n).ok_or_else(|| Error::InvalidArgument("no classes".into()))?;
    if classes.iter().any(|c| c.n() != n) {
        return Err(Error::InvalidArgument("classes of mixed order".into()));
    }
    if k > n {
        return Ok(FMinRecord { n, k, f_value: 0, argmin: classes.iter().map(|c| c.to_string()).collect(), class_count: classes.len() });
    }
    let running = AtomicUsize::new(usize::MAX);
    let first: Vec<usize> = classes
        .par_iter()
        .map(|c| {
            let t = c.to_tournament();
            let copies = enumerate_copies(&t, k)?;
            let stop = running.load(Ordering::Relaxed);
            let opts = SolveOptions { time_budget: None, stop_at: (stop != usize::MAX).then_some(stop) };
            let p = max_packing_with(&t, &copies, opts)?;
            if p.optimal {
                running.fetch_min(p.value(), Ordering::Relaxed);
            }
            Ok(p.value())
        })
        .collect::<Result<_>>()?;
    let f_value = running.load(Ordering::Relaxed);
    // First-pass values are lower bounds; only classes at the minimum can attain it.
    let argmin: Vec<String> = classes
        .par_iter()
        .zip(first.par_iter())
        .filter(|&(_, &v)| v == f_value)
        .map(|(c, _)| -> Result<Option<String>> {
            let p = max_packing_exact(&c.to_tournament(), k, None)?;
            Ok((p.value() == f_value).then(|| c.to_string()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(FMinRecord { n, k, f_value, argmin, class_count: classes.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetExpectation {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "ratio")]
    pub exact_expectation: Rational,
    #[serde(serialize_with = "ratio")]
    pub lower_bound: Rational,
    /// Average over all `C(n,m)` induced subtournaments, when `n <= 10`.
    #[serde(serialize_with = "opt_ratio")]
    pub brute_force: Option<Rational>,
}

fn opt_ratio<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => ratio(r, s),
        None => s.serialize_none(),
    }
}

/// Expected transitive-triple count of a uniformly random `m`-vertex induced
/// subtournament, `a(T) m(m-1)(m-2) / (n(n-1)(n-2))`, and its lower bound
/// `(3/4) ((n-3)/(n-2)) C(m,3)`.
pub fn subset_expectation(t: &Tournament, m: usize) -> Result<SubsetExpectation> {
    let n = t.n();
    if m < 3 || m > n {
        return Err(Error::InvalidArgument(format!("need 3 <= m <= n, got m={m}, n={n}")));
    }
    let a = t.census().transitive as i64;
    let (ni, mi) = (n as i64, m as i64);
    let exact = Rational::new(a * mi * (mi - 1) * (mi - 2), ni * (ni - 1) * (ni - 2));
    let lower = Rational::new(3, 4) * Rational::new(ni - 3, ni - 2) * Rational::from_integer(binomial(m as u64, 3) as i64);
    if exact < lower {
        return Err(Error::Verification(format!("expectation {exact} below bound {lower}")));
    }
    let brute_force = if n <= 10 {
        let (sum, count) = (0..n).combinations(m).fold((0i64, 0i64), |(s, c), subset| {
            let sub = t.induced(&subset).expect("valid subset");
            (s + sub.census().transitive as i64, c + 1)
        });
        let avg = Rational::new(sum, count);
        if avg != exact {
            return Err(Error::Verification(format!("closed form {exact} != brute-force average {avg}")));
        }
        Some(avg)
    } else {
        None
    };
    Ok(SubsetExpectation { n, m, exact_expectation: exact, lower_bound: lower, brute_force })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    #[serde(serialize_with = "ratio")]
    pub minimum: Rational,
    #[serde(serialize_with = "ratios")]
    pub argmin: [Rational; 3],
}

/// Minimises `v1 p1 + v2 p2 + v3 p3` over `p >= 0`, `p1 + p2 + p3 = 1`,
/// `c2 p2 + c3 p3 <= budget` by enumerating the vertices of the feasible
/// polygon in the `(p2, p3)` plane. Ties go to the first vertex found.
pub fn lp_step(budget: Rational, values: [Rational; 3], costs: [Rational; 2]) -> Result<LpSolution> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    let [v1, v2, v3] = values;
    if !(v1 >= v2 && v2 >= v3 && v3 >= zero) {
        return Err(Error::InvalidArgument("values must satisfy v1 >= v2 >= v3 >= 0".into()));
    }
    if costs.iter().any(|&c| c <= zero) {
        return Err(Error::InvalidArgument("costs must be positive".into()));
    }
    // Half-planes a*p2 + b*p3 <= c.
    let constraints = [
        (-one, zero, zero),
        (zero, -one, zero),
        (one, one, one),
        (costs[0], costs[1], budget),
    ];
    let feasible = |p2: Rational, p3: Rational| constraints.iter().all(|&(a, b, c)| a * p2 + b * p3 <= c);
    let mut best: Option<LpSolution> = None;
    for (i, j) in (0..4).tuple_combinations() {
        let (a1, b1, c1) = constraints[i];
        let (a2, b2, c2) = constraints[j];
        let det = a1 * b2 - a2 * b1;
        if det == zero {
            continue;
        }
        let p2 = (c1 * b2 - c2 * b1) / det;
        let p3 = (a1 * c2 - a2 * c1) / det;
        if !feasible(p2, p3) {
            continue;
        }
        let p1 = one - p2 - p3;
        let value = v1 * p1 + v2 * p2 + v3 * p3;
        if best.as_ref().is_none_or(|b| value < b.minimum) {
            best = Some(LpSolution { minimum: value, argmin: [p1, p2, p3] });
        }
    }
    best.ok_or_else(|| Error::Infeasible(format!("no feasible point for budget {budget}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub total: usize,
    /// Blocks with `t <= 4`, `5 <= t <= 11`, `t >= 12`.
    pub class_counts: [usize; 3],
    pub verified: bool,
    #[serde(skip)]
    pub packing: Packing,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub block_count: usize,
    pub floor: usize,
    pub min_total: usize,
    pub max_total: usize,
    /// Number of blocks (over all trials) by exact packing value.
    pub block_value_histogram: BTreeMap<usize, usize>,
    #[serde(serialize_with = "ratios")]
    pub class_probabilities: [Rational; 3],
    #[serde(serialize_with = "ratio")]
    pub mean_block_packing: Rational,
    #[serde(serialize_with = "ratio")]
    pub lp_block_value: Rational,
    #[serde(serialize_with = "ratio")]
    pub asymptotic_constant: Rational,
    /// Mean trial total divided by `n^2`.
    pub mean_total_over_n_squared: f64,
    pub all_verified: bool,
    pub per_trial: Vec<TrialRecord>,
}

fn triangle_class(cyclic: u64) -> usize {
    match cyclic {
        0..=4 => 0,
        5..=11 => 1,
        _ => 2,
    }
}

/// One trial: relabel the decomposition by a random permutation, pack each
/// block exactly and merge the block packings.
pub fn pipeline_trial(t: &Tournament, design: &BlockDesign, trial: usize, seed: u64) -> Result<(TrialRecord, Vec<usize>)> {
    let sigma = rng::permutation(t.n(), seed);
    let mut packing = Packing::empty(t.n(), 3);
    let mut class_counts = [0; 3];
    let mut values = Vec::with_capacity(design.blocks.len());
    for block in &design.blocks {
        let mut verts: Vec<usize> = block.iter().map(|&i| sigma[i]).collect();
        verts.sort_unstable();
        let sub = t.induced(&verts)?;
        class_counts[triangle_class(sub.census().cyclic)] += 1;
        let local = max_packing_exact(&sub, 3, None)?;
        values.push(local.value());
        for copy in &local.copies {
            packing.push(copy.iter().map(|&v| verts[v]).collect());
        }
    }
    packing.optimal = false;
    let verified = verify_packing(t, &packing);
    Ok((
        TrialRecord { trial, seed, total: packing.value(), class_counts, verified, packing },
        values,
    ))
}

pub fn block_pipeline(t: &Tournament, trials: usize, seed: u64) -> Result<PipelineReport> {
    block_pipeline_with(t, &ag2_lines(7)?, trials, seed)
}

/// Runs `trials` independent trials (sub-seeds derived from `seed` and the
/// trial index). Fails if a trial total drops below `5 * blocks` or a merged
/// packing does not verify.
pub fn block_pipeline_with(t: &Tournament, design: &BlockDesign, trials: usize, seed: u64) -> Result<PipelineReport> {
    if t.n() != PIPELINE_ORDER {
        return Err(Error::SizeMismatch(format!("pipeline needs n={PIPELINE_ORDER}, got {}", t.n())));
    }
    if design.point_count != t.n() || design.block_size != 7 || !design.verify() {
        return Err(Error::InvalidArgument("pipeline needs a K_7-decomposition of the vertex set".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let results: Vec<(TrialRecord, Vec<usize>)> = (0..trials)
        .into_par_iter()
        .map(|i| pipeline_trial(t, design, i, rng::sub_seed(seed, i as u64)))
        .collect::<Result<_>>()?;
    let blocks = design.blocks.len();
    let floor = 5 * blocks;
    let mut histogram = BTreeMap::new();
    let mut classes = [0i64; 3];
    for (rec, values) in &results {
        for &v in values {
            *histogram.entry(v).or_insert(0) += 1;
        }
        for (c, &x) in classes.iter_mut().zip(&rec.class_counts) {
            *c += x as i64;
        }
        if rec.total < floor {
            return Err(Error::Verification(format!("trial {} total {} below floor {floor}", rec.trial, rec.total)));
        }
        if !rec.verified {
            return Err(Error::Verification(format!("trial {} packing failed verification", rec.trial)));
        }
    }
    let slots = (trials * blocks) as i64;
    let sum: usize = results.iter().map(|(r, _)| r.total).sum();
    let per_trial: Vec<TrialRecord> = results.into_iter().map(|(r, _)| r).collect();
    Ok(PipelineReport {
        n: t.n(),
        trials,
        seed,
        block_count: blocks,
        floor,
        min_total: per_trial.iter().map(|r| r.total).min().unwrap_or(0),
        max_total: per_trial.iter().map(|r| r.total).max().unwrap_or(0),
        block_value_histogram: histogram,
        class_probabilities: classes.map(|c| Rational::new(c, slots)),
        mean_block_packing: Rational::new(sum as i64, slots),
        lp_block_value: lp_block_value(),
        asymptotic_constant: asymptotic_constant(),
        mean_total_over_n_squared: sum as f64 / trials as f64 / (t.n() * t.n()) as f64,
        all_verified: per_trial.iter().all(|r| r.verified),
        per_trial,
    })
}

/// A Steiner triple system on the vertex set whose blocks all induce
/// transitive triples, searched over every labelled STS(7) or STS(9).
pub fn transitive_sts_search(t: &Tournament) -> Result<Option<BlockDesign>> {
    let systems = match t.n() {
        7 => all_sts7(),
        9 => all_sts9(),
        n => return Err(Error::InvalidArgument(format!("transitive STS search supports n in {{7, 9}}, got {n}"))),
    };
    Ok(systems
        .iter()
        .find(|d| d.blocks.iter().all(|b| t.triple_is_transitive(b[0], b[1], b[2])))
        .cloned())
}
