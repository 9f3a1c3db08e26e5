//! Directed capacitated multigraph and the cut/degree accounting built on it.

use crate::error::{Error, Result};
use crate::scalar::Capacity;

/// Largest capacity accepted by [`DirectedGraph::normalize`].
pub const MAX_CAPACITY: u64 = 1 << 40;

/// One edge occurrence. Parallel edges are distinct occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge<C> {
    pub tail: usize,
    pub head: usize,
    pub capacity: C,
}

/// Counts of edges dropped by normalization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizeReport {
    pub self_loops: usize,
    pub into_source: usize,
}

/// Immutable directed multigraph with a distinguished source vertex.
///
/// Built through [`DirectedGraph::normalize`], which drops self-loops and
/// every edge entering the source, so the source never has incoming edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph<C = u64> {
    n: usize,
    source: usize,
    edges: Vec<Edge<C>>,
    max_capacity: C,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl<C: Capacity> DirectedGraph<C> {
    /// Validates and normalizes a raw edge list.
    pub fn normalize(raw: &[(usize, usize, C)], n: usize, source: usize) -> Result<Self> {
        Self::normalize_with_report(raw, n, source).map(|(g, _)| g)
    }

    pub fn normalize_with_report(
        raw: &[(usize, usize, C)],
        n: usize,
        source: usize,
    ) -> Result<(Self, NormalizeReport)> {
        if source >= n {
            return Err(Error::MalformedInput(format!(
                "source {source} out of range for {n} vertices"
            )));
        }
        let limit = C::saturating_from_u64(MAX_CAPACITY);
        let mut report = NormalizeReport::default();
        let mut edges = Vec::with_capacity(raw.len());
        for (idx, &(tail, head, capacity)) in raw.iter().enumerate() {
            if tail >= n || head >= n {
                return Err(Error::MalformedInput(format!(
                    "edge {idx} ({tail}, {head}) has an endpoint outside 0..{n}"
                )));
            }
            if capacity.is_zero() {
                return Err(Error::MalformedInput(format!("edge {idx} has zero capacity")));
            }
            if capacity > limit || capacity.widen() > MAX_CAPACITY as u128 {
                return Err(Error::MalformedInput(format!(
                    "edge {idx} capacity {capacity} exceeds 2^40"
                )));
            }
            if tail == head {
                report.self_loops += 1;
                continue;
            }
            if head == source {
                report.into_source += 1;
                continue;
            }
            edges.push(Edge { tail, head, capacity });
        }
        Ok((Self::from_edges_unchecked(n, source, edges), report))
    }

    /// Builds a graph without normalization. Callers guarantee endpoints are in range.
    pub(crate) fn from_edges_unchecked(n: usize, source: usize, edges: Vec<Edge<C>>) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            out_adj[e.tail].push(id);
            in_adj[e.head].push(id);
        }
        let max_capacity = edges.iter().map(|e| e.capacity).max().unwrap_or_else(C::one);
        DirectedGraph { n, source, edges, max_capacity, out_adj, in_adj }
    }

    /// Same structure with every capacity transformed. Edge ids are preserved.
    pub fn map_capacities<D: Capacity>(&self, mut f: impl FnMut(C) -> D) -> DirectedGraph<D> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { tail: e.tail, head: e.head, capacity: f(e.capacity) })
            .collect();
        DirectedGraph::from_edges_unchecked(self.n, self.source, edges)
    }

    /// Every edge reversed, ids preserved. The result is not normalized:
    /// former out-edges of the source now enter it.
    pub fn reversed(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { tail: e.head, head: e.tail, capacity: e.capacity })
            .collect();
        Self::from_edges_unchecked(self.n, self.source, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Largest capacity (`1` for an edgeless graph).
    pub fn max_capacity(&self) -> C {
        self.max_capacity
    }

    pub fn edges(&self) -> &[Edge<C>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge<C> {
        &self.edges[id]
    }

    /// Ids of edges leaving `v`, ascending.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    /// Ids of edges entering `v`, ascending.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn total_capacity(&self) -> C {
        self.edges.iter().map(|e| e.capacity).sum()
    }

    pub fn is_unit_capacity(&self) -> bool {
        self.edges.iter().all(|e| e.capacity.is_one())
    }

    /// Vertices reachable from the source.
    pub fn reachable_from_source(&self) -> Vec<bool> {
        self.reachable_from(self.source, |_| true)
    }

    /// Vertices reachable from `start` through edges accepted by `keep`.
    pub fn reachable_from(&self, start: usize, keep: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &e in &self.out_adj[u] {
                let h = self.edges[e].head;
                if !seen[h] && keep(e) {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }
}

/// Set of edge occurrences, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    member: Vec<bool>,
    len: usize,
}

impl EdgeSet {
    pub fn empty(m: usize) -> Self {
        EdgeSet { member: vec![false; m], len: 0 }
    }

    pub fn full(m: usize) -> Self {
        EdgeSet { member: vec![true; m], len: m }
    }

    /// Builds a set from ids; fails on ids `>= m`.
    pub fn from_ids(m: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut set = Self::empty(m);
        for id in ids {
            if id >= m {
                return Err(Error::Parameter(format!("edge id {id} out of range for {m} edges")));
            }
            set.insert(id);
        }
        Ok(set)
    }

    /// Size of the id universe.
    pub fn universe(&self) -> usize {
        self.member.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, id: usize) -> bool {
        self.member.get(id).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, id: usize) -> bool {
        let fresh = !self.member[id];
        if fresh {
            self.member[id] = true;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, id: usize) -> bool {
        let present = self.member[id];
        if present {
            self.member[id] = false;
            self.len -= 1;
        }
        present
    }

    /// Member ids in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.member.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &EdgeSet) {
        for id in other.iter() {
            self.insert(id);
        }
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.iter().all(|id| other.contains(id))
    }

    /// Total capacity `c(F)`.
    pub fn capacity<C: Capacity>(&self, g: &DirectedGraph<C>) -> C {
        self.iter().map(|id| g.edge(id).capacity).sum()
    }
}

/// Partition of the vertex set into components.
///
/// Components are numbered by their smallest member vertex, and member lists
/// are ascending, so two partitions with the same blocks compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    comp_of: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Partition {
    pub fn singletons(n: usize) -> Self {
        Partition { comp_of: (0..n).collect(), members: (0..n).map(|v| vec![v]).collect() }
    }

    /// Canonicalizes an arbitrary labelling (equal labels = same block).
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let mut comp_of = Vec::with_capacity(labels.len());
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (v, &l) in labels.iter().enumerate() {
            let c = *relabel.entry(l).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            comp_of.push(c);
            members[c].push(v);
        }
        Partition { comp_of, members }
    }

    /// Builds a partition from explicit blocks; they must be disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                if v >= n || labels[v] != usize::MAX {
                    return Err(Error::Parameter(format!("vertex {v} invalid or repeated in blocks")));
                }
                labels[v] = b;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::Parameter("blocks do not cover every vertex".into()));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn n(&self) -> usize {
        self.comp_of.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.comp_of[v]
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn same(&self, u: usize, v: usize) -> bool {
        self.comp_of[u] == self.comp_of[v]
    }

    /// Membership mask of component `c`.
    pub fn mask(&self, c: usize) -> Vec<bool> {
        let mut mask = vec![false; self.n()];
        for &v in &self.members[c] {
            mask[v] = true;
        }
        mask
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.n() == coarser.n()
            && self.members.iter().all(|block| {
                let c = coarser.component_of(block[0]);
                block.iter().all(|&v| coarser.component_of(v) == c)
            })
    }
}

/// Membership mask from a vertex list.
pub fn vertex_mask(n: usize, vertices: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in vertices {
        mask[v] = true;
    }
    mask
}

/// Ascending vertex list from a mask.
pub fn mask_to_vec(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect()
}

/// `(delta, rho)`: capacity leaving and entering the vertex set `in_set`.
pub fn cut_values<C: Capacity>(g: &DirectedGraph<C>, in_set: &[bool]) -> (C, C) {
    let mut delta = C::zero();
    let mut rho = C::zero();
    for e in g.edges() {
        match (in_set[e.tail], in_set[e.head]) {
            (true, false) => delta = delta + e.capacity,
            (false, true) => rho = rho + e.capacity,
            _ => {}
        }
    }
    (delta, rho)
}

/// Capacity-weighted degrees restricted to an edge subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degrees<C> {
    pub in_deg: Vec<C>,
    pub out_deg: Vec<C>,
}

impl<C: Capacity> Degrees<C> {
    pub fn deg(&self, v: usize) -> C {
        self.in_deg[v] + self.out_deg[v]
    }

    /// Volume of a vertex set.
    pub fn vol<'a>(&self, vertices: impl IntoIterator<Item = &'a usize>) -> C {
        vertices.into_iter().map(|&v| self.deg(v)).sum()
    }
}

/// Per-vertex in/out degree counting only the capacities of edges in `subset`.
pub fn restricted_degrees<C: Capacity>(g: &DirectedGraph<C>, subset: &EdgeSet) -> Degrees<C> {
    let mut in_deg = vec![C::zero(); g.n()];
    let mut out_deg = vec![C::zero(); g.n()];
    for id in subset.iter() {
        let e = g.edge(id);
        out_deg[e.tail] = out_deg[e.tail] + e.capacity;
        in_deg[e.head] = in_deg[e.head] + e.capacity;
    }
    Degrees { in_deg, out_deg }
}
