//! Exact integral max-flow between a virtual super-source and super-sink,
//! and decomposition of the resulting flow into paths.
//!
//! The super-source feeds vertex `v` through an arc of capacity
//! `source_supply[v]`; vertex `v` drains into the super-sink through an arc of
//! capacity `sink_capacity[v]`. Neither terminal is visible to callers.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::scalar::Capacity;

/// A multi-source multi-sink flow instance on a (possibly induced) subgraph.
#[derive(Debug, Clone)]
pub struct FlowProblem<'a, C> {
    pub graph: &'a DirectedGraph<C>,
    pub source_supply: Vec<C>,
    pub sink_capacity: Vec<C>,
    /// Stop once the flow value reaches this amount.
    pub flow_bound: Option<C>,
    /// When set, only edges with both endpoints inside the mask carry flow,
    /// and supplies/sinks outside it are ignored.
    pub vertex_filter: Option<&'a [bool]>,
}

impl<'a, C: Capacity> FlowProblem<'a, C> {
    pub fn new(graph: &'a DirectedGraph<C>, source_supply: Vec<C>, sink_capacity: Vec<C>) -> Self {
        FlowProblem { graph, source_supply, sink_capacity, flow_bound: None, vertex_filter: None }
    }

    /// Single-pair instance: `supply` units at `s`, `sink` units at `t`.
    pub fn single(graph: &'a DirectedGraph<C>, s: usize, t: usize, supply: C, sink: C) -> Self {
        let mut src = vec![C::zero(); graph.n()];
        let mut snk = vec![C::zero(); graph.n()];
        src[s] = supply;
        snk[t] = sink;
        Self::new(graph, src, snk)
    }

    pub fn with_bound(mut self, bound: C) -> Self {
        self.flow_bound = Some(bound);
        self
    }

    pub fn restricted_to(mut self, mask: &'a [bool]) -> Self {
        self.vertex_filter = Some(mask);
        self
    }

    fn allowed(&self, v: usize) -> bool {
        self.vertex_filter.map_or(true, |m| m[v])
    }
}

/// Outcome of [`max_flow`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult<C> {
    pub value: C,
    /// Flow on each edge of the graph (zero outside the filter).
    pub edge_flow: Vec<C>,
    /// Flow drawn from the super-source at each vertex.
    pub source_used: Vec<C>,
    /// Flow delivered to the super-sink at each vertex.
    pub sink_used: Vec<C>,
    /// Allowed vertices unreachable from the super-source in the residual
    /// graph, ascending. A minimum cut whenever `reached_bound` is false.
    pub min_cut_side: Vec<usize>,
    /// Allowed vertices with a residual path to the super-sink, ascending.
    /// The smallest sink side of a minimum cut when `reached_bound` is false.
    pub min_sink_side: Vec<usize>,
    /// Whether augmentation stopped early at `flow_bound`.
    pub reached_bound: bool,
}

#[derive(Debug, Clone)]
struct Arc<C> {
    to: usize,
    residual: C,
    rev: usize,
}

struct Dinic<C> {
    adj: Vec<Vec<Arc<C>>>,
    level: Vec<usize>,
    cursor: Vec<usize>,
}

impl<C: Capacity> Dinic<C> {
    fn new(nodes: usize) -> Self {
        Dinic { adj: vec![Vec::new(); nodes], level: vec![0; nodes], cursor: vec![0; nodes] }
    }

    /// Adds `u -> v`; returns the arc's position in `adj[u]`.
    fn add_arc(&mut self, u: usize, v: usize, cap: C) -> usize {
        let pos_u = self.adj[u].len();
        let pos_v = self.adj[v].len();
        self.adj[u].push(Arc { to: v, residual: cap, rev: pos_v });
        self.adj[v].push(Arc { to: u, residual: C::zero(), rev: pos_u });
        pos_u
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = usize::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.adj[u] {
                if !a.residual.is_zero() && self.level[a.to] == usize::MAX {
                    self.level[a.to] = self.level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        self.level[t] != usize::MAX
    }

    fn push(&mut self, u: usize, t: usize, limit: C) -> C {
        if u == t {
            return limit;
        }
        while self.cursor[u] < self.adj[u].len() {
            let i = self.cursor[u];
            let (to, residual) = (self.adj[u][i].to, self.adj[u][i].residual);
            if !residual.is_zero() && self.level[to] == self.level[u] + 1 {
                let pushed = self.push(to, t, limit.min(residual));
                if !pushed.is_zero() {
                    let rev = self.adj[u][i].rev;
                    self.adj[u][i].residual = self.adj[u][i].residual - pushed;
                    self.adj[to][rev].residual = self.adj[to][rev].residual + pushed;
                    return pushed;
                }
            }
            self.cursor[u] += 1;
        }
        C::zero()
    }

    fn run(&mut self, s: usize, t: usize, bound: Option<C>) -> C {
        let mut value = C::zero();
        while bound.map_or(true, |b| value < b) && self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let limit = bound.map_or(C::max_value(), |b| b - value);
                if limit.is_zero() {
                    break;
                }
                let pushed = self.push(s, t, limit);
                if pushed.is_zero() {
                    break;
                }
                value = value + pushed;
            }
        }
        value
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for a in &self.adj[u] {
                if !a.residual.is_zero() && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }

    /// Nodes with a residual path to `t`.
    fn co_reachable(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(w) = stack.pop() {
            // Arc u -> w has residual iff the reverse arc w -> u was listed at w.
            for a in &self.adj[w] {
                let back = &self.adj[a.to][a.rev];
                if !back.residual.is_zero() && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }

    fn flow_on(&self, u: usize, pos: usize) -> C {
        let a = &self.adj[u][pos];
        self.adj[a.to][a.rev].residual
    }
}

/// Exact integral maximum flow (capped at `flow_bound` when set).
///
/// Shortest augmenting paths in phases of blocking flows. The total supply
/// must fit in `C`.
pub fn max_flow<C: Capacity>(p: &FlowProblem<'_, C>) -> FlowResult<C> {
    let g = p.graph;
    let n = g.n();
    let (ss, tt) = (n, n + 1);
    let mut net = Dinic::new(n + 2);

    let mut edge_arc = vec![None; g.m()];
    for (id, e) in g.edges().iter().enumerate() {
        if p.allowed(e.tail) && p.allowed(e.head) {
            edge_arc[id] = Some(net.add_arc(e.tail, e.head, e.capacity));
        }
    }
    let mut src_arc = vec![None; n];
    let mut snk_arc = vec![None; n];
    for v in 0..n {
        if !p.allowed(v) {
            continue;
        }
        if !p.source_supply[v].is_zero() {
            src_arc[v] = Some(net.add_arc(ss, v, p.source_supply[v]));
        }
        if !p.sink_capacity[v].is_zero() {
            snk_arc[v] = Some(net.add_arc(v, tt, p.sink_capacity[v]));
        }
    }

    let value = net.run(ss, tt, p.flow_bound);
    let reached_bound = p.flow_bound.is_some_and(|b| value >= b);

    let edge_flow = g
        .edges()
        .iter()
        .zip(&edge_arc)
        .map(|(e, arc)| arc.map_or(C::zero(), |pos| net.flow_on(e.tail, pos)))
        .collect();
    let source_used = src_arc.iter().map(|a| a.map_or(C::zero(), |pos| net.flow_on(ss, pos))).collect();
    let sink_used = snk_arc
        .iter()
        .enumerate()
        .map(|(v, a)| a.map_or(C::zero(), |pos| net.flow_on(v, pos)))
        .collect();
    let seen = net.reachable(ss);
    let min_cut_side = (0..n).filter(|&v| p.allowed(v) && !seen[v]).collect();
    let reaches_sink = net.co_reachable(tt);
    let min_sink_side = (0..n).filter(|&v| p.allowed(v) && reaches_sink[v]).collect();

    FlowResult { value, edge_flow, source_used, sink_used, min_cut_side, min_sink_side, reached_bound }
}

/// A path carrying `amount` units of flow. A path may consist of a single
/// vertex when flow enters and leaves the network at the same vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPath<C> {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub amount: C,
}

impl<C> FlowPath<C> {
    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("paths are non-empty")
    }
}

/// Splits a flow into source-to-sink paths; circulations are cancelled.
///
/// Paths are traced from the lowest-id vertex with remaining supply,
/// following the lowest-id edge with remaining flow, and stop at the first
/// vertex with remaining sink usage. The amounts sum to `flow.value`; with
/// unit capacities every amount is 1 and the paths are edge-disjoint.
pub fn decompose_paths<C: Capacity>(
    g: &DirectedGraph<C>,
    flow: &FlowResult<C>,
    supplies: &[C],
    sinks: &[C],
) -> Result<Vec<FlowPath<C>>> {
    let n = g.n();
    let mut inflow = vec![C::zero(); n];
    let mut outflow = vec![C::zero(); n];
    for (id, e) in g.edges().iter().enumerate() {
        let f = flow.edge_flow[id];
        if f > e.capacity {
            return Err(Error::InternalConsistency(format!("edge {id} flow exceeds capacity")));
        }
        outflow[e.tail] = outflow[e.tail] + f;
        inflow[e.head] = inflow[e.head] + f;
    }
    for v in 0..n {
        if flow.source_used[v] > supplies[v] || flow.sink_used[v] > sinks[v] {
            return Err(Error::InternalConsistency(format!("vertex {v} exceeds its supply or sink")));
        }
        if inflow[v] + flow.source_used[v] != outflow[v] + flow.sink_used[v] {
            return Err(Error::InternalConsistency(format!("flow not conserved at vertex {v}")));
        }
    }

    let mut rem = flow.edge_flow.clone();
    let mut src = flow.source_used.clone();
    let mut snk = flow.sink_used.clone();
    let mut paths = Vec::new();
    let mut pos_in_walk = vec![usize::MAX; n];

    while let Some(start) = (0..n).find(|&v| !src[v].is_zero()) {
        let mut walk = vec![start];
        let mut walk_edges: Vec<usize> = Vec::new();
        pos_in_walk[start] = 0;
        loop {
            let u = *walk.last().unwrap();
            if !snk[u].is_zero() {
                break;
            }
            let next = g.out_edges(u).iter().copied().find(|&e| !rem[e].is_zero());
            let Some(e) = next else {
                return Err(Error::InternalConsistency(format!("flow path stuck at vertex {u}")));
            };
            let h = g.edge(e).head;
            if pos_in_walk[h] != usize::MAX {
                // Cancel the cycle h -> ... -> u -> h.
                let p = pos_in_walk[h];
                let mut cycle: Vec<usize> = walk_edges[p..].to_vec();
                cycle.push(e);
                let delta = cycle.iter().map(|&c| rem[c]).min().unwrap();
                for &c in &cycle {
                    rem[c] = rem[c] - delta;
                }
                for &v in &walk[p + 1..] {
                    pos_in_walk[v] = usize::MAX;
                }
                walk.truncate(p + 1);
                walk_edges.truncate(p);
                continue;
            }
            pos_in_walk[h] = walk.len();
            walk.push(h);
            walk_edges.push(e);
        }
        let end = *walk.last().unwrap();
        let amount = walk_edges
            .iter()
            .map(|&e| rem[e])
            .fold(src[start].min(snk[end]), |a, b| a.min(b));
        for &e in &walk_edges {
            rem[e] = rem[e] - amount;
        }
        src[start] = src[start] - amount;
        snk[end] = snk[end] - amount;
        for &v in &walk {
            pos_in_walk[v] = usize::MAX;
        }
        paths.push(FlowPath { vertices: walk, edges: walk_edges, amount });
    }
    Ok(paths)
}

/// Expands weighted paths into unit paths, preserving order.
pub fn unit_paths<C: Capacity>(paths: &[FlowPath<C>]) -> Vec<FlowPath<C>> {
    let mut out = Vec::new();
    for p in paths {
        let copies = p.amount.to_usize().expect("path amount fits usize");
        for _ in 0..copies {
            out.push(FlowPath { vertices: p.vertices.clone(), edges: p.edges.clone(), amount: C::one() });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cut_values, vertex_mask};

    fn unit(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
        let raw: Vec<_> = edges.iter().map(|&(a, b)| (a, b, 1u64)).collect();
        DirectedGraph::normalize(&raw, n, 0).unwrap()
    }

    #[test]
    fn path_flow() {
        let g = unit(3, &[(0, 1), (1, 2)]);
        let p = FlowProblem::single(&g, 0, 2, 1, 1);
        let r = max_flow(&p);
        assert_eq!(r.value, 1);
        let paths = decompose_paths(&g, &r, &p.source_supply, &p.sink_capacity).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].vertices, vec![0, 1, 2]);
    }

    #[test]
    fn parallel_edges() {
        let g = unit(2, &[(0, 1), (0, 1)]);
        let r = max_flow(&FlowProblem::single(&g, 0, 1, 2, 2));
        assert_eq!(r.value, 2);
    }

    #[test]
    fn diamond_flow_and_cut() {
        // s=0, a=1, b=2, t=3
        let g = unit(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let p = FlowProblem::single(&g, 0, 3, 10, 10);
        let r = max_flow(&p);
        assert_eq!(r.value, 2);
        // All 4 cuts separating 0 from 3 enumerated by hand: {3}:2, {1,3}:2, {2,3}:2, {1,2,3}:2.
        let side = vertex_mask(4, &r.min_cut_side);
        assert!(side[3] && !side[0]);
        assert_eq!(cut_values(&g, &side).1, 2);
        assert_eq!(r.min_cut_side, vec![1, 2, 3]);
        assert_eq!(r.min_sink_side, vec![3]);

        let paths = decompose_paths(&g, &r, &p.source_supply, &p.sink_capacity).unwrap();
        let vs: Vec<_> = paths.iter().map(|p| p.vertices.clone()).collect();
        assert_eq!(vs, vec![vec![0, 1, 3], vec![0, 2, 3]]);
    }

    #[test]
    fn cycles_are_cancelled() {
        // s=0 -> a=1 -> b=2, with a 2-cycle a <-> b carrying extra flow.
        let g = unit(3, &[(0, 1), (1, 2), (2, 1), (1, 2)]);
        let flow = FlowResult {
            value: 1u64,
            edge_flow: vec![1, 1, 1, 1],
            source_used: vec![1, 0, 0],
            sink_used: vec![0, 0, 1],
            min_cut_side: vec![],
            min_sink_side: vec![],
            reached_bound: false,
        };
        let paths = decompose_paths(&g, &flow, &[1, 0, 0], &[0, 0, 1]).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].vertices, vec![0, 1, 2]);
    }

    #[test]
    fn non_conserving_flow_is_rejected() {
        let g = unit(3, &[(0, 1), (1, 2)]);
        let flow = FlowResult {
            value: 1u64,
            edge_flow: vec![1, 0],
            source_used: vec![1, 0, 0],
            sink_used: vec![0, 0, 1],
            min_cut_side: vec![],
            min_sink_side: vec![],
            reached_bound: false,
        };
        assert!(matches!(
            decompose_paths(&g, &flow, &[1, 0, 0], &[0, 0, 1]),
            Err(Error::InternalConsistency(_))
        ));
    }

    #[test]
    fn flow_bound_stops_early() {
        let g = unit(2, &[(0, 1), (0, 1), (0, 1)]);
        let r = max_flow(&FlowProblem::single(&g, 0, 1, 3, 3).with_bound(2));
        assert_eq!(r.value, 2);
        assert!(r.reached_bound);
    }

    #[test]
    fn filter_restricts_to_induced_subgraph() {
        // 0 -> 1 -> 2 and 0 -> 3 -> 2; filtering out 3 leaves one route.
        let g = unit(4, &[(0, 1), (1, 2), (0, 3), (3, 2)]);
        let mask = [true, true, true, false];
        let r = max_flow(&FlowProblem::single(&g, 0, 2, 5, 5).restricted_to(&mask));
        assert_eq!(r.value, 1);
        assert!(!r.min_cut_side.contains(&3));
    }

    #[test]
    fn same_vertex_supply_and_sink_gives_trivial_path() {
        let g = unit(2, &[(0, 1)]);
        let p = FlowProblem::new(&g, vec![0, 1], vec![0, 1]);
        let r = max_flow(&p);
        assert_eq!(r.value, 1);
        let paths = decompose_paths(&g, &r, &p.source_supply, &p.sink_capacity).unwrap();
        assert_eq!(paths[0].vertices, vec![1]);
        assert!(paths[0].edges.is_empty());
    }

    #[test]
    fn weighted_paths_expand_to_units() {
        let g = DirectedGraph::normalize(&[(0, 1, 3u64)], 2, 0).unwrap();
        let p = FlowProblem::single(&g, 0, 1, 3, 3);
        let r = max_flow(&p);
        let paths = decompose_paths(&g, &r, &p.source_supply, &p.sink_capacity).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].amount, 3);
        assert_eq!(unit_paths(&paths).len(), 3);
    }
}
