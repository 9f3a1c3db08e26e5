//! Integral routing of vertex-pair demands with measured congestion.
//!
//! Pairs are routed one at a time, in a seeded random order, along shortest
//! paths where an edge carrying `load` paths has length `2^min(load, 20)`.
//! A few rerouting sweeps then pull paths off the most loaded edges; the best
//! assignment seen is returned. Congestion is measured, not promised.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Partition};
use crate::scalar::{Capacity, Phi};

const LOAD_EXPONENT_CAP: usize = 20;

/// Multiset of ordered vertex pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Demand {
    pairs: Vec<(usize, usize)>,
}

impl Demand {
    /// Builds a demand that must respect `partition`: every pair has distinct
    /// endpoints inside one component.
    pub fn new(pairs: Vec<(usize, usize)>, partition: &Partition) -> Result<Self> {
        for &(a, b) in &pairs {
            if a >= partition.n() || b >= partition.n() {
                return Err(Error::Parameter(format!("demand pair ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::Parameter(format!("demand pair ({a}, {b}) is trivial")));
            }
            if !partition.same(a, b) {
                return Err(Error::Parameter(format!("demand pair ({a}, {b}) crosses components")));
            }
        }
        Ok(Demand { pairs })
    }

    /// A demand with no component constraint attached.
    pub fn from_pairs(pairs: Vec<(usize, usize)>) -> Self {
        Demand { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Number of pair endpoints at each vertex (a pair `(v, v)` counts twice).
    pub fn participation(&self, n: usize) -> Vec<u64> {
        let mut load = vec![0u64; n];
        for &(a, b) in &self.pairs {
            load[a] += 1;
            load[b] += 1;
        }
        load
    }
}

/// First vertex whose demand participation exceeds its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RespectViolation {
    pub vertex: usize,
    pub load: u64,
    pub bound: u64,
}

/// Checks `sum_u D(u, v) + D(v, u) <= bound(v)` for every vertex.
pub fn respecting_check(d: &Demand, bound: &[u64]) -> Result<(), RespectViolation> {
    let load = d.participation(bound.len());
    match (0..bound.len()).find(|&v| load[v] > bound[v]) {
        Some(v) => Err(RespectViolation { vertex: v, load: load[v], bound: bound[v] }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteConfig {
    pub seed: u64,
    pub sweeps: usize,
}

impl Default for RouteConfig {
    fn default() -> Self {
        RouteConfig { seed: 0, sweeps: 3 }
    }
}

/// A simple path as vertex and edge sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedPath {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Paths for every pair occurrence (same order as the demand) and the edge loads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingOutcome {
    pub paths: Vec<RoutedPath>,
    pub loads: Vec<usize>,
    pub congestion: usize,
}

impl RoutingOutcome {
    /// `congestion * phi / (3 i)`, the overhead factor implied at level `i`.
    pub fn observed_overhead(&self, phi: Phi, level: usize) -> f64 {
        let phi = *phi.numer() as f64 / *phi.denom() as f64;
        self.congestion as f64 * phi / (3.0 * level.max(1) as f64)
    }
}

fn shortest_path<C: Capacity>(g: &DirectedGraph<C>, src: usize, dst: usize, loads: &[usize]) -> Option<RoutedPath> {
    let n = g.n();
    let mut dist = vec![u64::MAX; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0;
    heap.push(Reverse((0u64, src)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == dst {
            break;
        }
        for &e in g.out_edges(u) {
            let h = g.edge(e).head;
            let nd = d + (1u64 << loads[e].min(LOAD_EXPONENT_CAP));
            if nd < dist[h] {
                dist[h] = nd;
                pred[h] = e;
                heap.push(Reverse((nd, h)));
            }
        }
    }
    if dist[dst] == u64::MAX {
        return None;
    }
    let mut edges = Vec::new();
    let mut v = dst;
    while v != src {
        let e = pred[v];
        edges.push(e);
        v = g.edge(e).tail;
    }
    edges.reverse();
    let mut vertices = vec![src];
    vertices.extend(edges.iter().map(|&e| g.edge(e).head));
    Some(RoutedPath { vertices, edges })
}

fn adjust(loads: &mut [usize], path: &RoutedPath, add: bool) {
    for &e in &path.edges {
        if add {
            loads[e] += 1;
        } else {
            loads[e] -= 1;
        }
    }
}

fn score(loads: &[usize]) -> (usize, usize) {
    let cong = loads.iter().copied().max().unwrap_or(0);
    (cong, loads.iter().filter(|&&l| l == cong && cong > 0).count())
}

/// Routes every pair of `d` along a simple path in `g`.
pub fn route<C: Capacity>(g: &DirectedGraph<C>, d: &Demand, config: &RouteConfig) -> Result<RoutingOutcome> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));

    let mut loads = vec![0usize; g.m()];
    let mut paths: Vec<Option<RoutedPath>> = vec![None; d.len()];
    for &i in &order {
        let (src, dst) = d.pairs()[i];
        let p = shortest_path(g, src, dst, &loads).ok_or(Error::RoutingInfeasible { src, dst })?;
        adjust(&mut loads, &p, true);
        paths[i] = Some(p);
    }
    let mut paths: Vec<RoutedPath> = paths.into_iter().map(|p| p.expect("every pair routed")).collect();

    let mut best = (score(&loads), paths.clone(), loads.clone());
    for _ in 0..config.sweeps {
        let (cong, _) = score(&loads);
        if cong <= 1 {
            break;
        }
        let victims: Vec<usize> =
            order.iter().copied().filter(|&i| paths[i].edges.iter().any(|&e| loads[e] == cong)).collect();
        for i in victims {
            adjust(&mut loads, &paths[i], false);
            let (src, dst) = d.pairs()[i];
            paths[i] = shortest_path(g, src, dst, &loads).expect("pair was routable before");
            adjust(&mut loads, &paths[i], true);
        }
        let s = score(&loads);
        if s < best.0 {
            best = (s, paths.clone(), loads.clone());
        }
    }
    let ((congestion, _), paths, loads) = best;
    Ok(RoutingOutcome { paths, loads, congestion })
}
