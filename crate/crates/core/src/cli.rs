//! Command-line front end. [`dispatch`] parses arguments, runs one
//! subcommand and returns the process exit code: 0 on success, 1 when a
//! checked claim fails, 2 on usage errors and malformed input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::{block_pipeline, f_min, lp_step, verify_seven_vertex_claims, FMinRecord};
use crate::cache;
use crate::constructions::{blowup, conjectured_minimum, qr7, turan3_tournament, Filler, TURAN_ORIENTATION_NOTE};
use crate::designs::{ag2_lines, all_sts7, fano_plane, BlockDesign};
use crate::enumeration::{enumerate_classes, scores_with_triangle_count, CanonicalForm, MAX_ENUMERATION};
use crate::error::{Error, Result};
use crate::experiments::{density_experiment, edge_copy_stats};
use crate::packing::{max_packing_exact, verify_packing, Packing};
use crate::report::{parse_ratio, Envelope};
use crate::rng::DEFAULT_SEED;
use crate::tournament::{ScoreSequence, Tournament};
use crate::Rational;

#[derive(Debug, Parser)]
#[command(name = "ttpack", version, about = "Packings of edge-disjoint transitive subtournaments")]
pub struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List isomorphism classes of a given order, by score or triangle count.
    Enumerate(EnumerateArgs),
    /// Exact maximum packing of one tournament.
    Solve(SolveArgs),
    /// Check a claim or a certificate; exits 1 when it fails.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Minimum packing number over all classes of one order.
    Fmin(FminArgs),
    /// Block-decomposition lower bound on a 49-vertex tournament.
    Pipeline(PipelineArgs),
    /// Worst-case per-block value under a triangle budget.
    Lp(LpArgs),
    /// Emit an extremal tournament.
    Construct(ConstructArgs),
    /// Random-tournament experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Transitive and cyclic triple counts.
    Census(InputArgs),
    /// Emit a block design.
    Design(DesignArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("filter").required(true).args(["score", "t"])))]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated out-degrees.
    #[arg(long)]
    pub score: Option<String>,
    /// List the score sequences of classes with this many cyclic triangles.
    #[arg(long)]
    pub t: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long)]
    pub budget_ms: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Every 7-vertex class against the three packing implications.
    #[command(name = "lemma22")]
    SevenVertex,
    /// Minimum packing number against the conjectured value for small orders.
    Conjecture {
        #[arg(long, default_value_t = 7)]
        max_n: usize,
    },
    /// Pair-balance of a design file.
    Design(InputArgs),
    /// Independent check of a packing certificate.
    Packing {
        #[arg(long = "in")]
        input: PathBuf,
        /// JSON with `k` and `copies`, as written by `solve`.
        #[arg(long)]
        packing: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct FminArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    /// Triangle budget per block, `p/q` or an integer.
    #[arg(long)]
    pub budget: String,
    #[arg(long, default_value = "7,6,5")]
    pub values: String,
    #[arg(long, default_value = "5,12")]
    pub costs: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FillerKind {
    Transitive,
    Random,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["turan3", "qr7", "blowup"])))]
pub struct ConstructArgs {
    #[arg(long)]
    pub turan3: bool,
    #[arg(long)]
    pub qr7: bool,
    /// Blow up QR7 by this factor.
    #[arg(long)]
    pub blowup: Option<usize>,
    #[arg(long, required_if_eq("turan3", "true"))]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = FillerKind::Transitive)]
    pub filler: FillerKind,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Greedy packing density of seeded random tournaments.
    Density {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        improve: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Copies through each edge of one seeded random tournament.
    EdgeStats {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("which").required(true).args(["fano", "ag2", "all_sts7"])))]
pub struct DesignArgs {
    #[arg(long)]
    pub fano: bool,
    #[arg(long)]
    pub ag2: bool,
    #[arg(long)]
    pub all_sts7: bool,
}

/// Certificate file read by `verify packing`.
#[derive(Debug, Deserialize)]
pub struct PackingFile {
    pub k: usize,
    pub copies: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize)]
struct SolveReport<'a> {
    n: usize,
    k: usize,
    value: usize,
    optimal: bool,
    copies: &'a [Vec<usize>],
    nodes_explored: u64,
}

/// Outcome of one subcommand: text to emit and whether its check passed.
struct Outcome {
    text: String,
    passed: bool,
    /// Lines for standard error.
    notes: Vec<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true, notes: Vec::new() }
    }

    fn checked(text: String, passed: bool) -> Self {
        Outcome { text, passed, notes: Vec::new() }
    }
}

fn json_report<T: Serialize>(seed: u64, config: serde_json::Value, report: &T) -> String {
    let mut s = Envelope::new(seed, config, report).to_json();
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_tournament(path: &Path) -> Result<Tournament> {
    Tournament::parse(&read_text(path)?)
}

fn parse_ratios<const N: usize>(s: &str, what: &str) -> Result<[Rational; N]> {
    let v: Vec<Rational> = s
        .split(',')
        .map(|x| parse_ratio(x).ok_or_else(|| Error::InvalidArgument(format!("bad {what} entry {x:?}"))))
        .collect::<Result<_>>()?;
    v.try_into()
        .map_err(|v: Vec<Rational>| Error::InvalidArgument(format!("{what}: expected {N} entries, got {}", v.len())))
}

fn load_classes(n: usize) -> Result<Vec<CanonicalForm>> {
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge { what: "enumeration order", limit: MAX_ENUMERATION, got: n });
    }
    // Small orders are cheaper to rebuild than to cache.
    if n <= 6 {
        return enumerate_classes(n);
    }
    cache::load_or_build(&cache::cache_dir(), n)
}

/// Parses `argv` (program name first), runs the command and writes the
/// report to `stdout` or the `--out` file. Diagnostics go to `stderr`.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.workers {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            Ok(pool) => pool.install(|| run(&cli.command)),
            Err(e) => Err(Error::InvalidArgument(format!("cannot start {w} workers: {e}"))),
        },
        None => run(&cli.command),
    };
    match outcome {
        Ok(outcome) => {
            for note in &outcome.notes {
                let _ = writeln!(stderr, "note: {note}");
            }
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.text),
                None => stdout.write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return 2;
            }
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Verification(_) => 1,
                _ => 2,
            }
        }
    }
}

fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Enumerate(a) => enumerate(a),
        Command::Solve(a) => solve(a),
        Command::Verify(v) => verify(v),
        Command::Fmin(a) => {
            let record = f_min(&load_classes(a.n)?, a.k)?;
            Ok(Outcome::ok(json_report(DEFAULT_SEED, json!({"command": "fmin", "n": a.n, "k": a.k}), &record)))
        }
        Command::Pipeline(a) => {
            let t = read_tournament(&a.input)?;
            let report = block_pipeline(&t, a.trials, a.seed)?;
            let config = json!({"command": "pipeline", "in": a.input, "trials": a.trials, "seed": a.seed});
            Ok(Outcome::checked(json_report(a.seed, config, &report), report.all_verified))
        }
        Command::Lp(a) => {
            let budget = parse_ratio(&a.budget).ok_or_else(|| Error::InvalidArgument(format!("bad budget {:?}", a.budget)))?;
            let solution = lp_step(budget, parse_ratios(&a.values, "values")?, parse_ratios(&a.costs, "costs")?)?;
            let config = json!({"command": "lp", "budget": a.budget, "values": a.values, "costs": a.costs});
            Ok(Outcome::ok(json_report(DEFAULT_SEED, config, &solution)))
        }
        Command::Construct(a) => construct(a),
        Command::Experiment(e) => experiment(e),
        Command::Census(a) => {
            let c = read_tournament(&a.input)?.census();
            let config = json!({"command": "census", "in": a.input});
            Ok(Outcome::ok(json_report(DEFAULT_SEED, config, &json!({"a": c.transitive, "t": c.cyclic}))))
        }
        Command::Design(a) => {
            let designs: Vec<BlockDesign> = if a.fano {
                vec![fano_plane()]
            } else if a.ag2 {
                vec![ag2_lines(7)?]
            } else {
                all_sts7().to_vec()
            };
            Ok(Outcome::ok(designs.iter().map(BlockDesign::to_text).collect()))
        }
    }
}

fn enumerate(a: &EnumerateArgs) -> Result<Outcome> {
    if let Some(t) = a.t {
        let scores = scores_with_triangle_count(a.n, t)?;
        let config = json!({"command": "enumerate", "n": a.n, "t": t});
        let report = json!({"n": a.n, "t": t, "count": scores.len(), "scores": scores.iter().map(|s| s.to_string()).collect::<Vec<_>>()});
        return Ok(Outcome::ok(json_report(DEFAULT_SEED, config, &report)));
    }
    let score_text = a.score.as_deref().unwrap_or_default();
    let score: ScoreSequence = score_text.parse()?;
    if score.len() != a.n {
        return Err(Error::SizeMismatch(format!("score has {} entries, n={}", score.len(), a.n)));
    }
    let classes: Vec<String> = load_classes(a.n)?
        .into_iter()
        .filter(|c| c.to_tournament().score_sequence() == score)
        .map(|c| c.to_string())
        .collect();
    let config = json!({"command": "enumerate", "n": a.n, "score": score_text});
    let report = json!({"n": a.n, "score": score.to_string(), "count": classes.len(), "classes": classes});
    Ok(Outcome::ok(json_report(DEFAULT_SEED, config, &report)))
}

fn solve(a: &SolveArgs) -> Result<Outcome> {
    let t = read_tournament(&a.input)?;
    let p = max_packing_exact(&t, a.k, a.budget_ms.map(Duration::from_millis))?;
    let text = match a.format {
        Format::Text => {
            let mut s = format!("value={} optimal={}\n", p.value(), p.optimal);
            for c in &p.copies {
                s.push_str(&c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
                s.push('\n');
            }
            s
        }
        Format::Json | Format::Csv => {
            let report = SolveReport {
                n: p.n,
                k: p.k,
                value: p.value(),
                optimal: p.optimal,
                copies: &p.copies,
                nodes_explored: p.nodes_explored,
            };
            let config = json!({"command": "solve", "in": a.input, "k": a.k, "budget_ms": a.budget_ms});
            json_report(DEFAULT_SEED, config, &report)
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct ConjectureRow {
    n: usize,
    f: usize,
    conjectured: usize,
    matches: bool,
}

fn verify(v: &VerifyCommand) -> Result<Outcome> {
    match v {
        VerifyCommand::SevenVertex => {
            let report = verify_seven_vertex_claims(&load_classes(7)?)?;
            Ok(Outcome::ok(json_report(DEFAULT_SEED, json!({"command": "verify lemma22"}), &report)))
        }
        VerifyCommand::Conjecture { max_n } => {
            if !(3..=MAX_ENUMERATION).contains(max_n) {
                return Err(Error::InvalidArgument(format!("max-n must be in 3..={MAX_ENUMERATION}")));
            }
            let rows: Vec<ConjectureRow> = (3..=*max_n)
                .map(|n| {
                    let FMinRecord { f_value, .. } = f_min(&load_classes(n)?, 3)?;
                    let conjectured = conjectured_minimum(n);
                    Ok(ConjectureRow { n, f: f_value, conjectured, matches: f_value == conjectured })
                })
                .collect::<Result<_>>()?;
            let passed = rows.iter().all(|r| r.matches);
            let config = json!({"command": "verify conjecture", "max_n": max_n});
            Ok(Outcome::checked(json_report(DEFAULT_SEED, config, &json!({"rows": rows, "all_match": passed})), passed))
        }
        VerifyCommand::Design(a) => {
            let d = BlockDesign::parse(&read_text(&a.input)?)?;
            let valid = d.verify();
            let report = json!({"points": d.point_count, "block_size": d.block_size, "blocks": d.blocks.len(), "valid": valid});
            let config = json!({"command": "verify design", "in": a.input});
            Ok(Outcome::checked(json_report(DEFAULT_SEED, config, &report), valid))
        }
        VerifyCommand::Packing { input, packing } => {
            let t = read_tournament(input)?;
            let file: PackingFile = serde_json::from_str(&read_text(packing)?).map_err(|e| {
                let offset = read_text(packing).map(|s| line_col_offset(&s, e.line(), e.column())).unwrap_or(0);
                Error::parse(offset, e.to_string())
            })?;
            let (valid, reason) = check_certificate(&t, &file);
            let mut report = json!({"n": t.n(), "k": file.k, "value": file.copies.len(), "valid": valid});
            if let Some(reason) = reason {
                report["reason"] = json!(reason);
            }
            let config = json!({"command": "verify packing", "in": input, "packing": packing});
            Ok(Outcome::checked(json_report(DEFAULT_SEED, config, &report), valid))
        }
    }
}

fn line_col_offset(text: &str, line: usize, column: usize) -> usize {
    let before: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    before + column.saturating_sub(1)
}

fn check_certificate(t: &Tournament, file: &PackingFile) -> (bool, Option<String>) {
    if file.k < 3 || file.k > t.n() {
        return (false, Some(format!("k={} invalid for n={}", file.k, t.n())));
    }
    let mut p = Packing::empty(t.n(), file.k);
    for (i, c) in file.copies.iter().enumerate() {
        let mut sorted = c.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != file.k || sorted.iter().any(|&v| v >= t.n()) {
            return (false, Some(format!("copy {i} is not {} distinct vertices below {}", file.k, t.n())));
        }
        p.push(sorted);
    }
    if verify_packing(t, &p) {
        (true, None)
    } else {
        (false, Some("copies are not pairwise edge-disjoint transitive subtournaments".into()))
    }
}

fn construct(a: &ConstructArgs) -> Result<Outcome> {
    let filler = match a.filler {
        FillerKind::Transitive => Filler::Transitive,
        FillerKind::Random => Filler::Random { seed: a.seed },
    };
    let mut notes = Vec::new();
    let t = if a.turan3 {
        let n = a.n.ok_or_else(|| Error::InvalidArgument("--turan3 needs --n".into()))?;
        notes.push(TURAN_ORIENTATION_NOTE.to_string());
        turan3_tournament(n, filler)?
    } else if a.qr7 {
        qr7()
    } else {
        blowup(&qr7(), a.blowup.unwrap_or(1), filler)?
    };
    Ok(Outcome { notes, ..Outcome::ok(t.to_text()) })
}

fn experiment(e: &ExperimentCommand) -> Result<Outcome> {
    match *e {
        ExperimentCommand::Density { n, k, trials, seed, improve, format } => {
            let report = density_experiment(n, k, trials, seed, improve)?;
            let text = match format {
                Format::Csv => report.to_csv(),
                Format::Json | Format::Text => {
                    let config = json!({"command": "experiment density", "n": n, "k": k, "trials": trials, "seed": seed, "improve": improve});
                    json_report(seed, config, &report)
                }
            };
            Ok(Outcome::ok(text))
        }
        ExperimentCommand::EdgeStats { n, k, seed } => {
            let stats = edge_copy_stats(&Tournament::random(n, seed)?, k)?;
            let passed = stats.handshake_holds();
            let config = json!({"command": "experiment edge-stats", "n": n, "k": k, "seed": seed});
            Ok(Outcome::checked(json_report(seed, config, &stats), passed))
        }
    }
}
