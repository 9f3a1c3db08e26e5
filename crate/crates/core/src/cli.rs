//! `arbor` command-line interface. Every subcommand prints one compact JSON
//! document (or JSON lines for `bench`) on stdout; failures print an error
//! object on stderr.
//!
//! Exit codes: 0 success, 1 operation error or failed verification, 2 parse
//! or parameter error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decomp::{build_hierarchy, hierarchy_violations, Hierarchy, DEFAULT_TRIALS_MULT};
use crate::error::{Error, Result};
use crate::gen::{generate, GenKind};
use crate::graph::{cut_values, vertex_mask, EdgeSet};
use crate::io::{parse_graph, serialize_graph, ParsedGraph};
use crate::mincut::{approx_rooted_mincut, MincutConfig};
use crate::oracle::{exact_rooted_mincut, verify_packing};
use crate::packing::{pack, PackConfig, PackingResult};
use crate::scalar::{parse_phi, Phi};

#[derive(Debug, Parser)]
#[command(name = "arbor", version, about = "Expander hierarchies, rooted min-cut and arborescence packing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Random seed.
    #[arg(long, env = "ARBOR_SEED", default_value_t = 0)]
    seed: u64,
}

fn phi_arg(text: &str) -> std::result::Result<Phi, String> {
    match parse_phi(text) {
        Some(p) if p > Phi::from_integer(0) && p <= Phi::new(1, 2) => Ok(p),
        _ => Err(format!("expected a rational in (0, 1/2], got {text:?}")),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an expander hierarchy.
    Hierarchy {
        input: PathBuf,
        #[arg(long, value_parser = phi_arg, default_value = "1/16")]
        phi: Phi,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Approximate (or exact) s-rooted minimum cut.
    Mincut {
        input: PathBuf,
        /// Samples per component are ceil(trials_mult * log2 n).
        #[arg(long, default_value_t = DEFAULT_TRIALS_MULT)]
        trials_mult: u32,
        #[arg(long, value_parser = phi_arg, default_value = "1/16")]
        phi: Phi,
        /// Use the exact oracle instead of the hierarchy.
        #[arg(long)]
        exact: bool,
        /// Also report the exact value and the ratio.
        #[arg(long)]
        compare: bool,
        /// List every evaluated candidate.
        #[arg(long)]
        verbose: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Pack k arborescences or certify a cut with fewer than k edges.
    Pack {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = phi_arg, default_value = "1/16")]
        phi: Phi,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Check a JSON result against its input graph with the exact oracles.
    Verify { result: PathBuf, input: PathBuf },
    /// Generate an instance in the text format.
    Gen(GenArgs),
    /// Run mincut and pack over every `.dmc` file in a directory.
    Bench {
        corpus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS_MULT)]
        trials_mult: u32,
        #[arg(long, value_parser = phi_arg, default_value = "1/16")]
        phi: Phi,
        /// Packing target; defaults to each instance's exact connectivity.
        #[arg(long)]
        k: Option<usize>,
        /// Record wall time (makes output machine-dependent).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum GenName {
    RandomGnm,
    DagLayered,
    TwoCliquesBridge,
    CyclePlusChords,
    KnownPacking,
}

#[derive(Debug, Args)]
struct GenArgs {
    kind: GenName,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 30)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    layers: usize,
    #[arg(long, default_value_t = 3)]
    width: usize,
    #[arg(long, default_value_t = 0)]
    extra: usize,
    #[arg(long, default_value_t = 4)]
    size: usize,
    #[arg(long, default_value_t = 4)]
    chords: usize,
    #[arg(long, default_value_t = 1)]
    max_cap: u64,
    /// Write to a file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
}

impl GenArgs {
    fn kind(&self) -> GenKind {
        match self.kind {
            GenName::RandomGnm => GenKind::RandomGnm { n: self.n, m: self.m, max_cap: self.max_cap },
            GenName::DagLayered => GenKind::DagLayered {
                layers: self.layers,
                width: self.width,
                extra: self.extra,
                max_cap: self.max_cap,
            },
            GenName::TwoCliquesBridge => GenKind::TwoCliquesBridge { size: self.size },
            GenName::CyclePlusChords => GenKind::CyclePlusChords { n: self.n, chords: self.chords, max_cap: self.max_cap },
            GenName::KnownPacking => GenKind::KnownPacking { n: self.n, k: self.k, extra: self.extra },
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub edges: Vec<usize>,
    pub capacity: u64,
    #[serde(with = "crate::scalar::phi_string")]
    pub achieved_phi: Phi,
    /// Components of `G \ E_{>level}`.
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HierarchyReport {
    pub kind: String,
    pub n: usize,
    pub m: usize,
    pub source: usize,
    pub seed: u64,
    #[serde(with = "crate::scalar::phi_string")]
    pub phi_target: Phi,
    pub num_levels: usize,
    pub levels: Vec<LevelReport>,
}

impl HierarchyReport {
    fn new(g: &crate::Graph, h: &Hierarchy, seed: u64) -> Self {
        let levels = (1..=h.num_levels())
            .map(|i| LevelReport {
                level: i,
                edges: h.level(i).to_vec(),
                capacity: h.level(i).capacity(g),
                achieved_phi: h.achieved_phi()[i - 1],
                components: h.partition(i).components().to_vec(),
            })
            .collect();
        HierarchyReport {
            kind: "hierarchy".into(),
            n: g.n(),
            m: g.m(),
            source: g.source(),
            seed,
            phi_target: h.phi_target(),
            num_levels: h.num_levels(),
            levels,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CandidateReport {
    pub level: usize,
    pub component: usize,
    pub sampled_vertex: usize,
    pub rho: u64,
    pub cut: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MincutReport {
    pub kind: String,
    /// `"approx"` or `"exact"`.
    pub method: String,
    pub value: u64,
    /// The sink side: a vertex set without the source entered by `value`.
    pub cut: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates_evaluated: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_vs_exact: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<CandidateReport>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PackReport {
    pub kind: String,
    pub k: usize,
    pub seed: u64,
    #[serde(with = "crate::scalar::phi_string")]
    pub phi: Phi,
    #[serde(flatten)]
    pub result: PackingResult,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub kind: String,
    pub checked: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_connectivity: Option<u64>,
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub levels: usize,
    pub value: u64,
    pub exact: u64,
    pub ratio: Option<f64>,
    pub k: usize,
    /// `"arborescences"`, `"cut"` or `"unsupported"`.
    pub pack_outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub congestion: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_delta: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

fn ratio(value: u64, exact: u64) -> Option<f64> {
    match (value, exact) {
        (0, 0) => Some(1.0),
        (_, 0) => None,
        _ => Some(value as f64 / exact as f64),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path, err: &mut dyn Write) -> Result<ParsedGraph> {
    let parsed = parse_graph(&read_text(path)?)?;
    let d = parsed.dropped;
    if d.self_loops + d.into_source > 0 {
        // Diagnostics go to stderr so stdout stays a single JSON document.
        let _ = writeln!(
            err,
            "c dropped {} self-loop(s) and {} arc(s) into the source",
            d.self_loops, d.into_source
        );
    }
    Ok(parsed)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

fn cmd_mincut(
    path: &Path,
    trials_mult: u32,
    phi: Phi,
    exact: bool,
    compare: bool,
    verbose: bool,
    seed: u64,
    err: &mut dyn Write,
) -> Result<String> {
    let g = load(path, err)?.graph;
    if exact {
        let c = exact_rooted_mincut(&g)?;
        return Ok(to_json(&MincutReport {
            kind: "mincut".into(),
            method: "exact".into(),
            value: c.value,
            cut: c.sink_side,
            level: None,
            seed: None,
            num_levels: None,
            candidates_evaluated: None,
            exact: None,
            ratio_vs_exact: None,
            candidates: None,
        }));
    }
    let h = build_hierarchy(&g, phi, seed)?;
    let out = approx_rooted_mincut(&g, &h, &MincutConfig { trials_mult, seed })?;
    let exact_value = if compare { Some(exact_rooted_mincut(&g)?.value) } else { None };
    let candidates = verbose.then(|| {
        out.candidates
            .iter()
            .map(|c| CandidateReport {
                level: c.level,
                component: c.component,
                sampled_vertex: c.sampled_vertex,
                rho: c.rho,
                cut: c.vertex_set.clone(),
            })
            .collect()
    });
    Ok(to_json(&MincutReport {
        kind: "mincut".into(),
        method: "approx".into(),
        value: out.best.rho,
        cut: out.best.vertex_set.clone(),
        level: Some(out.best.level),
        seed: Some(seed),
        num_levels: Some(h.num_levels()),
        candidates_evaluated: Some(out.candidates.len()),
        exact: exact_value,
        ratio_vs_exact: exact_value.and_then(|e| ratio(out.best.rho, e)),
        candidates,
    }))
}

fn verify_hierarchy(g: &crate::Graph, report: &HierarchyReport) -> Result<VerifyReport> {
    let mut failures = Vec::new();
    let levels = report
        .levels
        .iter()
        .map(|l| EdgeSet::from_ids(g.m(), l.edges.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    let phis = report.levels.iter().map(|l| l.achieved_phi).collect();
    let h = Hierarchy::from_levels(g, levels, report.phi_target, phis)?;
    failures.extend(hierarchy_violations(g, &h));
    for l in &report.levels {
        if h.partition(l.level).components() != l.components.as_slice() {
            failures.push(format!("level {}: reported components differ from recomputed ones", l.level));
        }
        if h.level(l.level).capacity(g) != l.capacity {
            failures.push(format!("level {}: reported capacity differs", l.level));
        }
    }
    Ok(VerifyReport { kind: "verification".into(), checked: "hierarchy".into(), ok: failures.is_empty(), exact_connectivity: None, failures })
}

fn verify_mincut(g: &crate::Graph, report: &MincutReport) -> Result<VerifyReport> {
    let mut failures = Vec::new();
    let exact = exact_rooted_mincut(g)?.value;
    if report.cut.is_empty() {
        failures.push("cut is empty".into());
    }
    if report.cut.iter().any(|&v| v >= g.n()) {
        failures.push("cut names a vertex out of range".into());
    } else {
        if report.cut.contains(&g.source()) {
            failures.push("cut contains the source".into());
        }
        let rho = cut_values(g, &vertex_mask(g.n(), &report.cut)).1;
        if rho != report.value {
            failures.push(format!("value {} reported, cut re-evaluates to {rho}", report.value));
        }
    }
    if report.value < exact {
        failures.push(format!("value {} below the exact minimum {exact}", report.value));
    }
    if report.method == "exact" && report.value != exact {
        failures.push(format!("exact method reported {}, oracle gives {exact}", report.value));
    }
    Ok(VerifyReport {
        kind: "verification".into(),
        checked: "mincut".into(),
        ok: failures.is_empty(),
        exact_connectivity: Some(exact),
        failures,
    })
}

fn cmd_verify(result: &Path, input: &Path, err: &mut dyn Write) -> Result<VerifyReport> {
    let text = read_text(result)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::MalformedInput(format!("result JSON: {e}")))?;
    let kind = value.get("kind").and_then(Value::as_str).unwrap_or("").to_string();
    let g = load(input, err)?.graph;
    let bad = |e: serde_json::Error| Error::MalformedInput(format!("{kind} result: {e}"));
    match kind.as_str() {
        "hierarchy" => verify_hierarchy(&g, &serde_json::from_value(value).map_err(bad)?),
        "mincut" => verify_mincut(&g, &serde_json::from_value(value).map_err(bad)?),
        "packing" => {
            let report: PackReport = serde_json::from_value(value).map_err(bad)?;
            let r = verify_packing(&g, &report.result, report.k);
            Ok(VerifyReport {
                kind: "verification".into(),
                checked: "packing".into(),
                ok: r.ok,
                exact_connectivity: Some(r.exact_connectivity),
                failures: r.failures,
            })
        }
        other => Err(Error::MalformedInput(format!("unknown result kind {other:?}"))),
    }
}

fn bench_one(path: &Path, trials_mult: u32, phi: Phi, k: Option<usize>, timing: bool, seed: u64) -> Result<BenchRecord> {
    let start = Instant::now();
    let g = parse_graph(&read_text(path)?)?.graph;
    let h = build_hierarchy(&g, phi, seed)?;
    let approx = approx_rooted_mincut(&g, &h, &MincutConfig { trials_mult, seed })?;
    let exact = exact_rooted_mincut(&g)?.value;
    let k = k.unwrap_or(exact as usize).max(1);
    let (pack_outcome, congestion, cut_delta) = match pack(&g, k, &PackConfig { phi, seed }) {
        Ok(PackingResult::Arborescences(p)) => ("arborescences", Some(p.congestion), None),
        Ok(PackingResult::Cut(c)) => ("cut", None, Some(c.delta)),
        Err(Error::Unsupported(_)) => ("unsupported", None, None),
        Err(e) => return Err(e),
    };
    let wall_ms = timing.then(|| (start.elapsed().as_secs_f64() * 1e6).round() / 1e3);
    Ok(BenchRecord {
        instance: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        n: g.n(),
        m: g.m(),
        seed,
        levels: h.num_levels(),
        value: approx.best.rho,
        exact,
        ratio: ratio(approx.best.rho, exact),
        k,
        pack_outcome: pack_outcome.into(),
        congestion,
        cut_delta,
        wall_ms,
    })
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Hierarchy { input, phi, seed } => {
            let g = load(&input, err)?.graph;
            let h = build_hierarchy(&g, phi, seed.seed)?;
            writeln!(out, "{}", to_json(&HierarchyReport::new(&g, &h, seed.seed)))?;
        }
        Command::Mincut { input, trials_mult, phi, exact, compare, verbose, seed } => {
            let text = cmd_mincut(&input, trials_mult, phi, exact, compare, verbose, seed.seed, err)?;
            writeln!(out, "{text}")?;
        }
        Command::Pack { input, k, phi, seed } => {
            let g = load(&input, err)?.graph;
            let result = pack(&g, k, &PackConfig { phi, seed: seed.seed })?;
            writeln!(out, "{}", to_json(&PackReport { kind: "packing".into(), k, seed: seed.seed, phi, result }))?;
        }
        Command::Verify { result, input } => {
            let report = cmd_verify(&result, &input, err)?;
            writeln!(out, "{}", to_json(&report))?;
            return Ok(report.ok);
        }
        Command::Gen(args) => {
            let g = generate(&args.kind(), args.seed.seed)?;
            let text = format!("c {} seed {}\n{}", args.kind().name(), args.seed.seed, serialize_graph(&g));
            match &args.output {
                Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
                None => write!(out, "{text}")?,
            }
        }
        Command::Bench { corpus, trials_mult, phi, k, timing, seed } => {
            let entries = std::fs::read_dir(&corpus).map_err(|e| Error::Io(format!("{}: {e}", corpus.display())))?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "dmc"))
                .collect();
            files.sort();
            let records: Vec<Result<BenchRecord>> =
                files.par_iter().map(|p| bench_one(p, trials_mult, phi, k, timing, seed.seed)).collect();
            for (path, r) in files.iter().zip(records) {
                let r = r.map_err(|e| match e {
                    Error::Parse { line, message } => {
                        Error::Parse { line, message: format!("{}: {message}", path.display()) }
                    }
                    other => other,
                })?;
                writeln!(out, "{}", to_json(&r))?;
            }
        }
    }
    Ok(true)
}

/// Runs the CLI with explicit streams; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "{}", to_json(&ErrorReport { error: e.kind(), message: e.to_string() }));
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    }
}
