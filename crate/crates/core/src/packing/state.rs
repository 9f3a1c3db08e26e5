//! Per-level color assignments, critical incoming edges, and the three level
//! invariants checked by direct search and counting.

use std::collections::{BTreeSet, VecDeque};

use crate::decomp::Hierarchy;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::scalar::Phi;

/// Color sets on edges and vertices at one level. Colors are `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorState {
    pub level: usize,
    pub k: usize,
    pub edge_colors: Vec<BTreeSet<usize>>,
    /// The source's entry is always empty.
    pub vertex_colors: Vec<BTreeSet<usize>>,
}

impl ColorState {
    /// Level-0 state: no edge colors, every non-source vertex holds all `k` colors.
    pub fn base(g: &DirectedGraph, k: usize) -> Self {
        let all: BTreeSet<usize> = (0..k).collect();
        let vertex_colors =
            (0..g.n()).map(|v| if v == g.source() { BTreeSet::new() } else { all.clone() }).collect();
        ColorState { level: 0, k, edge_colors: vec![BTreeSet::new(); g.m()], vertex_colors }
    }

    pub fn max_edge_colors(&self) -> usize {
        self.edge_colors.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn max_vertex_colors(&self) -> usize {
        self.vertex_colors.iter().map(BTreeSet::len).max().unwrap_or(0)
    }
}

/// `K_i(v)`: incoming edges of `v` from another level-`i` component, plus
/// incoming edges in levels above `i`. Lists are ascending by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalEdges {
    pub level: usize,
    per_vertex: Vec<Vec<usize>>,
}

impl CriticalEdges {
    pub fn compute(g: &DirectedGraph, h: &Hierarchy, i: usize) -> Self {
        let part = h.partition(i);
        let above = h.above(i);
        let mut per_vertex = vec![Vec::new(); g.n()];
        for (id, e) in g.edges().iter().enumerate() {
            if !part.same(e.tail, e.head) || above.contains(id) {
                per_vertex[e.head].push(id);
            }
        }
        CriticalEdges { level: i, per_vertex }
    }

    pub fn of(&self, v: usize) -> &[usize] {
        &self.per_vertex[v]
    }

    /// `Delta_i(v)`.
    pub fn delta(&self, v: usize) -> usize {
        self.per_vertex[v].len()
    }
}

/// First broken invariant at a level, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantFailure {
    /// `v` is not reachable in color `color` from a vertex of its component holding that color.
    Reach { vertex: usize, color: usize },
    /// `|Gamma_i(v)| > Delta_i(v) * (i + 1)`.
    VertexColors { vertex: usize, count: usize, bound: usize },
    /// `|Gamma_i(e)| > 5 i^2 * factor`.
    EdgeColors { edge: usize, count: usize },
}

impl std::fmt::Display for InvariantFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvariantFailure::Reach { vertex, color } => {
                write!(f, "reachability: vertex {vertex} not reached in color {color}")
            }
            InvariantFailure::VertexColors { vertex, count, bound } => {
                write!(f, "vertex colors: vertex {vertex} holds {count} colors, bound {bound}")
            }
            InvariantFailure::EdgeColors { edge, count } => {
                write!(f, "edge colors: edge {edge} holds {count} colors")
            }
        }
    }
}

/// Checks the reachability invariant by one multi-source BFS per color and component.
pub fn check_reachability(g: &DirectedGraph, h: &Hierarchy, state: &ColorState) -> Result<(), InvariantFailure> {
    let part = h.partition(state.level);
    let n = g.n();
    let mut color_out: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; state.k];
    for (id, colors) in state.edge_colors.iter().enumerate() {
        for &c in colors {
            color_out[c][g.edge(id).tail].push(g.edge(id).head);
        }
    }
    let mut stamp = vec![usize::MAX; n];
    let mut round = 0usize;
    let mut queue = VecDeque::new();
    for (color, out) in color_out.iter().enumerate() {
        for members in part.components() {
            if members.contains(&g.source()) {
                continue;
            }
            if members.iter().all(|&v| state.vertex_colors[v].contains(&color)) {
                continue;
            }
            round += 1;
            for &v in members.iter().filter(|&&v| state.vertex_colors[v].contains(&color)) {
                stamp[v] = round;
                queue.push_back(v);
            }
            while let Some(u) = queue.pop_front() {
                for &w in &out[u] {
                    if stamp[w] != round {
                        stamp[w] = round;
                        queue.push_back(w);
                    }
                }
            }
            if let Some(&vertex) = members.iter().find(|&&v| stamp[v] != round) {
                return Err(InvariantFailure::Reach { vertex, color });
            }
        }
    }
    Ok(())
}

/// Checks the vertex color-count invariant.
pub fn check_vertex_counts(g: &DirectedGraph, crit: &CriticalEdges, state: &ColorState) -> Result<(), InvariantFailure> {
    for v in (0..g.n()).filter(|&v| v != g.source()) {
        let bound = crit.delta(v) * (state.level + 1);
        let count = state.vertex_colors[v].len();
        if count > bound {
            return Err(InvariantFailure::VertexColors { vertex: v, count, bound });
        }
    }
    Ok(())
}

/// Checks `|Gamma_i(e)| <= 5 i^2 * factor` exactly in rational arithmetic.
pub fn check_edge_counts(state: &ColorState, factor: Phi) -> Result<(), InvariantFailure> {
    let i = state.level as u128;
    let limit_num = 5 * i * i * *factor.numer() as u128;
    let den = *factor.denom() as u128;
    match state.edge_colors.iter().position(|c| c.len() as u128 * den > limit_num) {
        Some(edge) => Err(InvariantFailure::EdgeColors { edge, count: state.edge_colors[edge].len() }),
        None => Ok(()),
    }
}

/// All three invariants at `state.level`, in order.
pub fn check_invariants(g: &DirectedGraph, h: &Hierarchy, state: &ColorState, factor: Phi) -> Result<()> {
    let crit = CriticalEdges::compute(g, h, state.level);
    check_reachability(g, h, state)
        .and_then(|_| check_vertex_counts(g, &crit, state))
        .and_then(|_| check_edge_counts(state, factor))
        .map_err(|f| Error::InvariantBroken(format!("level {}: {f}", state.level)))
}
