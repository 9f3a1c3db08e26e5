//! Exact references and verifiers.
//!
//! Everything here is deliberately simple and independent of the
//! approximation code it checks: rooted connectivity by `n - 1` max-flows or
//! by subset enumeration, cut expansion by subset enumeration, and
//! arborescence validity by direct counting.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{cut_values, mask_to_vec, restricted_degrees, vertex_mask, DirectedGraph, EdgeSet, Partition};
use crate::maxflow::{max_flow, FlowProblem};
use crate::packing::PackingResult;
use crate::scalar::{Capacity, Phi};

/// Largest `n` accepted by the exhaustive routines.
pub const ENUMERATION_LIMIT: usize = 16;

/// A rooted cut given by its sink side `T` (the side not containing the source).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedCut<C> {
    pub value: C,
    pub sink_side: Vec<usize>,
}

fn require_non_root<C: Capacity>(g: &DirectedGraph<C>) -> Result<()> {
    if g.n() < 2 {
        return Err(Error::Parameter("rooted min-cut needs a vertex besides the source".into()));
    }
    Ok(())
}

/// Exact s-rooted minimum cut as the minimum over `t != s` of max-flow(s, t).
///
/// The witness is the maximal sink side of the first minimizing `t`.
pub fn exact_rooted_mincut<C: Capacity>(g: &DirectedGraph<C>) -> Result<RootedCut<C>> {
    require_non_root(g)?;
    let s = g.source();
    let big = g.total_capacity() + C::one();
    let mut best: Option<RootedCut<C>> = None;
    for t in (0..g.n()).filter(|&t| t != s) {
        let r = max_flow(&FlowProblem::single(g, s, t, big, big));
        if best.as_ref().map_or(true, |b| r.value < b.value) {
            best = Some(RootedCut { value: r.value, sink_side: r.min_cut_side });
        }
    }
    Ok(best.expect("at least one non-root vertex"))
}

/// Brute-force s-rooted minimum cut over every non-empty `S` avoiding the source.
pub fn enumerate_rooted_mincut<C: Capacity>(g: &DirectedGraph<C>) -> Result<RootedCut<C>> {
    require_non_root(g)?;
    check_scale(g.n())?;
    let s = g.source();
    let others: Vec<usize> = (0..g.n()).filter(|&v| v != s).collect();
    let mut best: Option<RootedCut<C>> = None;
    for bits in 1u32..(1 << others.len()) {
        let members: Vec<usize> =
            others.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &v)| v).collect();
        let rho = cut_values(g, &vertex_mask(g.n(), &members)).1;
        if best.as_ref().map_or(true, |b| rho < b.value) {
            best = Some(RootedCut { value: rho, sink_side: members });
        }
    }
    Ok(best.unwrap())
}

/// Global minimum cut of `g` as the smaller of the rooted cuts of `g` and its reversal.
pub fn global_mincut<C: Capacity>(g: &DirectedGraph<C>) -> Result<C> {
    let forward = exact_rooted_mincut(g)?.value;
    let backward = exact_rooted_mincut(&g.reversed())?.value;
    Ok(forward.min(backward))
}

fn check_scale(n: usize) -> Result<()> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::Scale(format!("{n} vertices exceeds the enumeration limit {ENUMERATION_LIMIT}")));
    }
    Ok(())
}

/// Largest `phi` such that, for every component `C` and every vertex set `T`
/// with `deg_E*(C ∩ T) <= deg_E*(C) / 2`,
/// `min(delta(T), rho(T)) >= phi * deg_E*(C ∩ T)`.
///
/// `None` stands for +infinity (no constraint binds).
pub fn bruteforce_cut_expansion<C: Capacity>(
    g: &DirectedGraph<C>,
    partition: &Partition,
    terminals: &EdgeSet,
) -> Result<Option<Phi>> {
    let n = g.n();
    check_scale(n)?;
    let deg = restricted_degrees(g, terminals);
    let deg: Vec<u64> = (0..n).map(|v| deg.deg(v).widen() as u64).collect();
    let comp_vol: Vec<u64> =
        partition.components().iter().map(|c| c.iter().map(|&v| deg[v]).sum()).collect();
    let cap: Vec<u64> = g.edges().iter().map(|e| e.capacity.widen() as u64).collect();

    let mut best: Option<Phi> = None;
    let mut inside = vec![0u64; partition.len()];
    for bits in 0u32..(1 << n) {
        let in_t = |v: usize| bits >> v & 1 == 1;
        let (mut delta, mut rho) = (0u64, 0u64);
        for (e, &c) in g.edges().iter().zip(&cap) {
            match (in_t(e.tail), in_t(e.head)) {
                (true, false) => delta += c,
                (false, true) => rho += c,
                _ => {}
            }
        }
        let cut = delta.min(rho);
        inside.iter_mut().for_each(|x| *x = 0);
        for v in (0..n).filter(|&v| in_t(v)) {
            inside[partition.component_of(v)] += deg[v];
        }
        for (c, &vol_t) in inside.iter().enumerate() {
            if vol_t == 0 || 2 * vol_t > comp_vol[c] {
                continue;
            }
            let ratio = Phi::new(cut, vol_t);
            if best.map_or(true, |b| ratio < b) {
                best = Some(ratio);
            }
        }
    }
    Ok(best)
}

/// Reason an edge set is not an arborescence rooted at the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum TreeViolation {
    BadEdgeId { edge: usize },
    Unreachable { vertex: usize },
    SizeMismatch { expected: usize, got: usize },
    SourceHasParent,
    InDegree { vertex: usize, count: usize },
}

impl std::fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeViolation::BadEdgeId { edge } => write!(f, "edge id {edge} does not exist"),
            TreeViolation::Unreachable { vertex } => write!(f, "vertex {vertex} unreachable in tree"),
            TreeViolation::SizeMismatch { expected, got } => {
                write!(f, "tree has {got} edges, expected {expected}")
            }
            TreeViolation::SourceHasParent => write!(f, "source has an incoming tree edge"),
            TreeViolation::InDegree { vertex, count } => {
                write!(f, "vertex {vertex} has {count} incoming tree edges")
            }
        }
    }
}

/// Checks that `tree` is a spanning arborescence of `g` rooted at the source.
pub fn verify_arborescence<C: Capacity>(g: &DirectedGraph<C>, tree: &[usize]) -> Result<(), TreeViolation> {
    if let Some(&edge) = tree.iter().find(|&&e| e >= g.m()) {
        return Err(TreeViolation::BadEdgeId { edge });
    }
    let members = EdgeSet::from_ids(g.m(), tree.iter().copied()).expect("ids checked");
    let reach = g.reachable_from(g.source(), |e| members.contains(e));
    if let Some(vertex) = reach.iter().position(|&r| !r) {
        return Err(TreeViolation::Unreachable { vertex });
    }
    if tree.len() != g.n() - 1 {
        return Err(TreeViolation::SizeMismatch { expected: g.n() - 1, got: tree.len() });
    }
    let mut indeg = vec![0usize; g.n()];
    for &e in tree {
        indeg[g.edge(e).head] += 1;
    }
    if indeg[g.source()] != 0 {
        return Err(TreeViolation::SourceHasParent);
    }
    if let Some(vertex) = (0..g.n()).find(|&v| v != g.source() && indeg[v] != 1) {
        return Err(TreeViolation::InDegree { vertex, count: indeg[vertex] });
    }
    Ok(())
}

/// Maximum number of trees sharing one edge.
pub fn tree_congestion(m: usize, trees: &[Vec<usize>]) -> usize {
    let mut load = vec![0usize; m];
    for t in trees {
        for &e in t {
            if e < m {
                load[e] += 1;
            }
        }
    }
    load.into_iter().max().unwrap_or(0)
}

/// Outcome of [`verify_packing`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub exact_connectivity: u64,
    pub failures: Vec<String>,
}

/// Re-checks a packing result against the exact oracle.
///
/// Trees: every tree is an arborescence, the reported congestion matches a
/// recount, and `k / congestion <= exact connectivity`. Cut: the source is on
/// the cut side, `delta(S) < k`, the reported delta matches, and the exact
/// connectivity is below `k`.
pub fn verify_packing<C: Capacity>(g: &DirectedGraph<C>, result: &PackingResult, k: usize) -> VerificationReport {
    let mut failures = Vec::new();
    let exact = match exact_rooted_mincut(g) {
        Ok(c) => c.value.widen() as u64,
        Err(e) => {
            failures.push(e.to_string());
            0
        }
    };
    match result {
        PackingResult::Arborescences(p) => {
            if p.trees.len() != k {
                failures.push(format!("{} trees reported, expected {k}", p.trees.len()));
            }
            for (color, tree) in p.trees.iter().enumerate() {
                if let Err(v) = verify_arborescence(g, tree) {
                    failures.push(format!("tree {color}: {v}"));
                }
            }
            let recount = tree_congestion(g.m(), &p.trees);
            if recount != p.congestion {
                failures.push(format!("congestion {} reported, recount {recount}", p.congestion));
            }
            // k / congestion <= exact, cross-multiplied.
            if recount == 0 || (k as u64) > exact * recount as u64 {
                failures.push(format!(
                    "certificate fails: k = {k}, congestion = {recount}, exact connectivity = {exact}"
                ));
            }
        }
        PackingResult::Cut(cut) => {
            let mask = vertex_mask(g.n(), &cut.side);
            if cut.side.iter().any(|&v| v >= g.n()) {
                failures.push("cut side names a vertex out of range".into());
            } else {
                if !mask[g.source()] {
                    failures.push("source is not on the cut side".into());
                }
                let delta = cut_values(g, &mask).0.widen() as u64;
                if delta != cut.delta {
                    failures.push(format!("delta {} reported, recomputed {delta}", cut.delta));
                }
                if delta >= k as u64 {
                    failures.push(format!("delta(S) = {delta} is not below k = {k}"));
                }
                if mask_to_vec(&mask).len() == g.n() {
                    failures.push("cut side is the whole vertex set".into());
                }
            }
            if exact >= k as u64 {
                failures.push(format!("exact connectivity {exact} is not below k = {k}"));
            }
        }
    }
    VerificationReport { ok: failures.is_empty(), exact_connectivity: exact, failures }
}
