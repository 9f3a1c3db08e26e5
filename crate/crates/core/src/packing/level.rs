//! One level of the color-assignment loop: breakpoint allocation, component
//! flows, and chain-demand routing.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{mix_seed, Hierarchy};
use crate::error::{Error, Result};
use crate::graph::{cut_values, mask_to_vec, restricted_degrees, vertex_mask, DirectedGraph};
use crate::maxflow::{decompose_paths, max_flow, unit_paths, FlowPath, FlowProblem};
use crate::routing::{respecting_check, route, Demand, RouteConfig};
use crate::scalar::Phi;

use super::state::{check_invariants, ColorState, CriticalEdges};
use super::{CertifyingCut, CutOrigin};

/// `(E_X, E_Y, E_Z)` for one vertex, each ascending by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalSplit {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

/// Splits `K_{i-1}(v)` into edges still critical at level `i` (`E_X`), edges
/// from the part of `v`'s new component outside its old one (`E_Y`), and the
/// remaining level-`i` edges (`E_Z`). Fails unless the three sets partition
/// `K_{i-1}(v)`.
pub fn partition_critical(g: &DirectedGraph, h: &Hierarchy, i: usize, v: usize) -> Result<CriticalSplit> {
    if i == 0 || i > h.num_levels() {
        return Err(Error::Parameter(format!("level {i} outside 1..={}", h.num_levels())));
    }
    if v == g.source() {
        return Err(Error::Parameter("the source has no critical edges".into()));
    }
    let prev = h.partition(i - 1);
    let cur = h.partition(i);
    let above_prev = h.above(i - 1);
    let above_cur = h.above(i);
    let level = h.level(i);
    let mut split = CriticalSplit { x: Vec::new(), y: Vec::new(), z: Vec::new() };
    for &e in g.in_edges(v) {
        let u = g.edge(e).tail;
        if !cur.same(u, v) || above_cur.contains(e) {
            split.x.push(e);
        } else if !prev.same(u, v) && !above_prev.contains(e) {
            split.y.push(e);
        } else if level.contains(e) {
            split.z.push(e);
        }
    }
    let mut union: Vec<usize> = split.x.iter().chain(&split.y).chain(&split.z).copied().collect();
    union.sort_unstable();
    let mut expected: Vec<usize> = g
        .in_edges(v)
        .iter()
        .copied()
        .filter(|&e| !prev.same(g.edge(e).tail, v) || above_prev.contains(e))
        .collect();
    expected.sort_unstable();
    if union != expected {
        return Err(Error::InternalConsistency(format!(
            "level {i}, vertex {v}: split {union:?} does not partition the previous critical edges {expected:?}"
        )));
    }
    Ok(split)
}

/// Splits `colors` into `(X, Y, Z)` within `caps`, filling `X`, then `Y`,
/// then `Z` in ascending color order.
pub fn split_colors(
    colors: &BTreeSet<usize>,
    caps: (usize, usize, usize),
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    if colors.len() > caps.0 + caps.1 + caps.2 {
        return Err(Error::InvariantBroken(format!(
            "{} colors exceed split capacity {}",
            colors.len(),
            caps.0 + caps.1 + caps.2
        )));
    }
    let sorted: Vec<usize> = colors.iter().copied().collect();
    let (x, rest) = sorted.split_at(caps.0.min(sorted.len()));
    let (y, z) = rest.split_at(caps.1.min(rest.len()));
    Ok((x.to_vec(), y.to_vec(), z.to_vec()))
}

/// Emits the chain `(w, v_1), (v_1, v_2), ..., (v_{q-1}, v_q)` over the
/// breakpoints sorted by vertex id.
pub fn chain_demands(leader: usize, breakpoints: &[usize]) -> Vec<(usize, usize)> {
    let mut sorted = breakpoints.to_vec();
    sorted.sort_unstable();
    let mut prev = leader;
    sorted
        .into_iter()
        .map(|v| {
            let pair = (prev, v);
            prev = v;
            pair
        })
        .collect()
}

/// Result of the flow step in one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentFlow {
    /// One unit path per color, ascending by color; the leader is the path end.
    Paths(Vec<(usize, FlowPath<u64>)>),
    /// A vertex set inside the component entered by fewer than `k` edges.
    Cut { side: Vec<usize>, rho: u64 },
}

/// Max-flow on `G[C]` from `Delta_i` to `i * deg_{E_i}^-`, bounded by
/// `min(k, total sink)`. A shortfall yields the minimum cut side.
pub fn component_flow(
    g: &DirectedGraph,
    h: &Hierarchy,
    i: usize,
    crit: &CriticalEdges,
    component: &[usize],
    z_colors: &BTreeSet<usize>,
    k: usize,
) -> Result<ComponentFlow> {
    if z_colors.is_empty() {
        return Ok(ComponentFlow::Paths(Vec::new()));
    }
    let n = g.n();
    let mask = vertex_mask(n, component);
    if mask[g.source()] {
        return Err(Error::Parameter("component flow on the source component".into()));
    }
    let level_deg = restricted_degrees(g, h.level(i));
    let mut supply = vec![0u64; n];
    let mut sink = vec![0u64; n];
    for &v in component {
        supply[v] = crit.delta(v) as u64;
        sink[v] = i as u64 * level_deg.in_deg[v];
    }
    let total_sink: u64 = sink.iter().sum();
    let bound = (k as u64).min(total_sink);
    let problem = FlowProblem::new(g, supply, sink).with_bound(bound).restricted_to(&mask);
    let r = max_flow(&problem);
    if r.value < bound {
        let side = r.min_cut_side.clone();
        let rho = cut_values(g, &vertex_mask(n, &side)).1;
        if side.is_empty() || rho >= k as u64 {
            return Err(Error::InternalConsistency(format!(
                "level {i}: flow shortfall {} < {bound} but cut side {side:?} has in-capacity {rho}",
                r.value
            )));
        }
        return Ok(ComponentFlow::Cut { side, rho });
    }
    let paths = unit_paths(&decompose_paths(g, &r, &problem.source_supply, &problem.sink_capacity)?);
    if paths.len() < z_colors.len() {
        return Err(Error::InternalConsistency(format!(
            "level {i}: {} flow paths for {} colors",
            paths.len(),
            z_colors.len()
        )));
    }
    Ok(ComponentFlow::Paths(z_colors.iter().copied().zip(paths).collect()))
}

/// Per-level instrumentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    /// Components that ran the flow step.
    pub flow_components: usize,
    /// Chain pairs including trivial `(w, w)` pairs.
    pub demand_pairs: usize,
    pub routed_pairs: usize,
    pub route_congestion: usize,
    /// `max(1, max_{j <= i} route_congestion_j / (3 j))`, the measured
    /// stand-in for the routing overhead over expansion.
    #[serde(with = "crate::scalar::phi_string")]
    pub route_factor: Phi,
    pub max_edge_colors: usize,
    pub max_vertex_colors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelOutcome {
    State(ColorState, LevelStats),
    Cut(CertifyingCut),
}

/// Computes the level-`i` state from the level-`(i-1)` state and checks all
/// three invariants before returning it.
pub fn run_level(
    g: &DirectedGraph,
    h: &Hierarchy,
    prev: &ColorState,
    prev_factor: Phi,
    seed: u64,
) -> Result<LevelOutcome> {
    let i = prev.level + 1;
    if i > h.num_levels() {
        return Err(Error::Parameter(format!("level {i} exceeds {}", h.num_levels())));
    }
    let n = g.n();
    let s = g.source();
    let k = prev.k;
    let crit = CriticalEdges::compute(g, h, i);
    let part = h.partition(i);
    let mut state = ColorState {
        level: i,
        k,
        edge_colors: prev.edge_colors.clone(),
        vertex_colors: vec![BTreeSet::new(); n],
    };

    // Step 1: keep X, spread Y over E_Y, hold Z for the flow.
    let mut z_of = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| v != s) {
        let split = partition_critical(g, h, i, v)?;
        let (x, y, z) = split_colors(&prev.vertex_colors[v], (split.x.len() * i, split.y.len() * i, split.z.len() * i))?;
        state.vertex_colors[v].extend(x);
        for (j, c) in y.into_iter().enumerate() {
            state.edge_colors[split.y[j % split.y.len()]].insert(c);
        }
        z_of[v] = z;
    }

    // Step 2: one flow per component holding Z colors.
    let comps: Vec<usize> = (0..part.len()).filter(|&c| !part.members(c).contains(&s)).collect();
    let z_sets: Vec<BTreeSet<usize>> = comps
        .iter()
        .map(|&c| part.members(c).iter().flat_map(|&v| z_of[v].iter().copied()).collect())
        .collect();
    let flows: Vec<Result<ComponentFlow>> = comps
        .par_iter()
        .zip(z_sets.par_iter())
        .map(|(&c, z)| component_flow(g, h, i, &crit, part.members(c), z, k))
        .collect();
    let mut leaders = Vec::with_capacity(comps.len());
    let mut flow_components = 0;
    for (idx, f) in flows.into_iter().enumerate() {
        match f? {
            ComponentFlow::Cut { side, rho } => {
                let inside = vertex_mask(n, &side);
                let outside: Vec<bool> = inside.iter().map(|&b| !b).collect();
                debug_assert_eq!(cut_values(g, &outside).0, rho);
                return Ok(LevelOutcome::Cut(CertifyingCut {
                    side: mask_to_vec(&outside),
                    delta: rho,
                    origin: CutOrigin::ComponentFlow { level: i, component: comps[idx] },
                }));
            }
            ComponentFlow::Paths(paths) => {
                if !z_sets[idx].is_empty() {
                    flow_components += 1;
                }
                let mut lead = Vec::with_capacity(paths.len());
                for (color, p) in paths {
                    state.vertex_colors[p.start()].insert(color);
                    for &e in &p.edges {
                        state.edge_colors[e].insert(color);
                    }
                    lead.push((color, p.end()));
                }
                leaders.push(lead);
            }
        }
    }

    // Step 3: chain each color's leader through its breakpoints and route.
    let mut pairs = Vec::new();
    let mut pair_colors = Vec::new();
    for (idx, &c) in comps.iter().enumerate() {
        for &(color, leader) in &leaders[idx] {
            let breakpoints: Vec<usize> =
                part.members(c).iter().copied().filter(|&v| z_of[v].contains(&color)).collect();
            for pair in chain_demands(leader, &breakpoints) {
                pairs.push(pair);
                pair_colors.push(color);
            }
        }
    }
    let level_deg = restricted_degrees(g, h.level(i));
    let bound: Vec<u64> = (0..n).map(|v| 3 * i as u64 * level_deg.in_deg[v]).collect();
    let demand_pairs = pairs.len();
    respecting_check(&Demand::from_pairs(pairs.clone()), &bound).map_err(|v| {
        Error::InvariantBroken(format!(
            "level {i}: demand load {} at vertex {} exceeds {}",
            v.load, v.vertex, v.bound
        ))
    })?;
    let (routed, routed_colors): (Vec<_>, Vec<_>) =
        pairs.into_iter().zip(pair_colors).filter(|&((a, b), _)| a != b).unzip();
    let demand = Demand::new(routed, part).map_err(|e| Error::InternalConsistency(e.to_string()))?;
    let outcome = route(g, &demand, &RouteConfig { seed: mix_seed(seed, i as u64), ..RouteConfig::default() })?;
    for (path, &color) in outcome.paths.iter().zip(&routed_colors) {
        for &e in &path.edges {
            state.edge_colors[e].insert(color);
        }
    }

    let factor = prev_factor.max(Phi::new(outcome.congestion as u64, 3 * i as u64)).max(Phi::from_integer(1));
    check_invariants(g, h, &state, factor)?;
    let stats = LevelStats {
        level: i,
        flow_components,
        demand_pairs,
        routed_pairs: demand.len(),
        route_congestion: outcome.congestion,
        route_factor: factor,
        max_edge_colors: state.max_edge_colors(),
        max_vertex_colors: state.max_vertex_colors(),
    };
    Ok(LevelOutcome::State(state, stats))
}
