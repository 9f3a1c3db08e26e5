//! Low-congestion s-rooted arborescence packing over an expander hierarchy.
//!
//! Colors `0..k` are pushed up the hierarchy level by level. Each vertex
//! starts with every color; at each level colors either stay on the vertex,
//! move onto an incoming edge, or are threaded to a component leader by a
//! max-flow path and then chained through their holders by routing. At the
//! top, vertex colors are spread over the inter-component edges and each
//! color class yields one arborescence by DFS. If a flow falls short the
//! algorithm stops with a cut entered by fewer than `k` edges.

mod level;
mod state;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::decomp::{build_hierarchy, default_phi, Hierarchy};
use crate::error::{Error, Result};
use crate::graph::{cut_values, mask_to_vec, DirectedGraph};
use crate::oracle::tree_congestion;
use crate::scalar::{Capacity, Phi};

pub use level::{
    chain_demands, component_flow, partition_critical, run_level, split_colors, ComponentFlow, CriticalSplit,
    LevelOutcome, LevelStats,
};
pub use state::{
    check_edge_counts, check_invariants, check_reachability, check_vertex_counts, ColorState, CriticalEdges,
    InvariantFailure,
};

/// Where a certifying cut came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CutOrigin {
    /// Some vertex is unreachable from the source.
    Unreachable,
    /// `vertex` has fewer than `k` incoming edges.
    BaseCase { vertex: usize },
    /// A component flow at `level` fell short.
    ComponentFlow { level: usize, component: usize },
}

/// A vertex set `S` containing the source with `delta(S) < k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyingCut {
    /// Ascending vertex ids.
    pub side: Vec<usize>,
    pub delta: u64,
    pub origin: CutOrigin,
}

/// `k` arborescences as edge-id lists, one per color.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub trees: Vec<Vec<usize>>,
    /// Maximum number of trees containing one edge.
    pub congestion: usize,
    /// `5 L^2 * factor + L + 1` for the run that produced the trees.
    #[serde(default, with = "crate::scalar::phi_string_opt")]
    pub congestion_bound: Option<Phi>,
    #[serde(default)]
    pub levels: Vec<LevelStats>,
}

impl Packing {
    pub fn from_trees(m: usize, trees: Vec<Vec<usize>>) -> Self {
        let congestion = tree_congestion(m, &trees);
        Packing { trees, congestion, congestion_bound: None, levels: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PackingResult {
    Arborescences(Packing),
    Cut(CertifyingCut),
}

impl PackingResult {
    pub fn is_cut(&self) -> bool {
        matches!(self, PackingResult::Cut(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackConfig {
    pub phi: Phi,
    pub seed: u64,
}

impl Default for PackConfig {
    fn default() -> Self {
        PackConfig { phi: default_phi(), seed: 0 }
    }
}

fn unreachable_cut(g: &DirectedGraph) -> Option<CertifyingCut> {
    let reach = g.reachable_from_source();
    if reach.iter().all(|&r| r) {
        return None;
    }
    Some(CertifyingCut { delta: cut_values(g, &reach).0, side: mask_to_vec(&reach), origin: CutOrigin::Unreachable })
}

/// Level-0 state, or the cut `V \ {v}` around the lowest vertex with
/// in-degree below `k`.
pub fn init_base_colors(g: &DirectedGraph, k: usize) -> std::result::Result<ColorState, CertifyingCut> {
    let s = g.source();
    match (0..g.n()).find(|&v| v != s && g.in_edges(v).len() < k) {
        Some(v) => Err(CertifyingCut {
            side: (0..g.n()).filter(|&u| u != v).collect(),
            delta: g.in_edges(v).len() as u64,
            origin: CutOrigin::BaseCase { vertex: v },
        }),
        None => Ok(ColorState::base(g, k)),
    }
}

/// Final edge colors: the top-level edge colors plus each vertex's colors
/// spread round-robin over its top-level critical edges, at most `L + 1` per edge.
pub fn finalize_coloring(g: &DirectedGraph, h: &Hierarchy, top: &ColorState) -> Result<Vec<BTreeSet<usize>>> {
    let l = top.level;
    let crit = CriticalEdges::compute(g, h, l);
    let mut colors = top.edge_colors.clone();
    for v in (0..g.n()).filter(|&v| v != g.source()) {
        let held = &top.vertex_colors[v];
        if held.is_empty() {
            continue;
        }
        let edges = crit.of(v);
        if edges.is_empty() || held.len() > edges.len() * (l + 1) {
            return Err(Error::InvariantBroken(format!(
                "vertex {v}: {} colors do not fit on {} critical edges with quota {}",
                held.len(),
                edges.len(),
                l + 1
            )));
        }
        for (j, &c) in held.iter().enumerate() {
            colors[edges[j % edges.len()]].insert(c);
        }
    }
    if let Some(e) = (0..g.m()).find(|&e| colors[e].len() > top.edge_colors[e].len() + l + 1) {
        return Err(Error::InvariantBroken(format!("edge {e} received more than {} colors", l + 1)));
    }
    Ok(colors)
}

/// One DFS arborescence per color, exploring lower head ids first.
pub fn extract_arborescences(g: &DirectedGraph, colors: &[BTreeSet<usize>], k: usize) -> Result<Vec<Vec<usize>>> {
    let n = g.n();
    let s = g.source();
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; k];
    for (id, set) in colors.iter().enumerate() {
        for &c in set {
            out[c][g.edge(id).tail].push(id);
        }
    }
    let mut trees = Vec::with_capacity(k);
    for (color, adj) in out.iter_mut().enumerate() {
        for list in adj.iter_mut() {
            list.sort_by_key(|&e| (g.edge(e).head, e));
        }
        let mut seen = vec![false; n];
        let mut cursor = vec![0usize; n];
        let mut tree = Vec::with_capacity(n.saturating_sub(1));
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(&u) = stack.last() {
            if let Some(&e) = adj[u].get(cursor[u]) {
                cursor[u] += 1;
                let h = g.edge(e).head;
                if !seen[h] {
                    seen[h] = true;
                    tree.push(e);
                    stack.push(h);
                }
            } else {
                stack.pop();
            }
        }
        if let Some(vertex) = seen.iter().position(|&b| !b) {
            return Err(Error::ColorNotSpanning { color, vertex });
        }
        trees.push(tree);
    }
    Ok(trees)
}

/// Runs the packing on a prebuilt hierarchy of `g`.
pub fn pack_with_hierarchy(g: &DirectedGraph, h: &Hierarchy, k: usize, seed: u64) -> Result<PackingResult> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if h.m() != g.m() || h.partition(0).n() != g.n() {
        return Err(Error::Parameter("hierarchy was not built on this graph".into()));
    }
    if let Some(cut) = unreachable_cut(g) {
        return Ok(PackingResult::Cut(cut));
    }
    let mut state = match init_base_colors(g, k) {
        Ok(s) => s,
        Err(cut) => return Ok(PackingResult::Cut(cut)),
    };
    let mut factor = Phi::from_integer(1);
    let mut levels = Vec::with_capacity(h.num_levels());
    for _ in 1..=h.num_levels() {
        match run_level(g, h, &state, factor, seed)? {
            LevelOutcome::Cut(cut) => return Ok(PackingResult::Cut(cut)),
            LevelOutcome::State(next, stats) => {
                factor = stats.route_factor;
                levels.push(stats);
                state = next;
            }
        }
    }
    let colors = finalize_coloring(g, h, &state)?;
    let trees = extract_arborescences(g, &colors, k)?;
    let l = h.num_levels() as u64;
    let bound = factor * Phi::from_integer(5 * l * l) + Phi::from_integer(l + 1);
    let packing = Packing { congestion: tree_congestion(g.m(), &trees), trees, congestion_bound: Some(bound), levels };
    if Phi::from_integer(packing.congestion as u64) > bound {
        return Err(Error::InvariantBroken(format!(
            "tree congestion {} exceeds the instrumented bound {bound}",
            packing.congestion
        )));
    }
    Ok(PackingResult::Arborescences(packing))
}

/// Packs `k` arborescences rooted at the source, or returns a cut `S` with
/// `delta(S) < k`. Only unit-capacity graphs are supported.
pub fn pack<C: Capacity>(g: &DirectedGraph<C>, k: usize, config: &PackConfig) -> Result<PackingResult> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if !g.is_unit_capacity() {
        return Err(Error::Unsupported("packing requires unit capacities".into()));
    }
    let unit: DirectedGraph = g.map_capacities(|_| 1u64);
    if let Some(cut) = unreachable_cut(&unit) {
        return Ok(PackingResult::Cut(cut));
    }
    if let Err(cut) = init_base_colors(&unit, k) {
        return Ok(PackingResult::Cut(cut));
    }
    let h = build_hierarchy(&unit, config.phi, config.seed)?;
    pack_with_hierarchy(&unit, &h, k, config.seed)
}
