//! Strongly connected components of edge-deleted subgraphs and their
//! condensation order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, EdgeSet, Partition};
use crate::scalar::Capacity;

/// SCC partition of `g` with the edges of `removed` deleted.
pub fn scc<C: Capacity>(g: &DirectedGraph<C>, removed: &EdgeSet) -> Partition {
    scc_where(g, |e| !removed.contains(e))
}

/// SCC partition of the subgraph formed by edges accepted by `keep`.
///
/// Iterative Tarjan; components are renumbered canonically by smallest vertex.
pub fn scc_where<C: Capacity>(g: &DirectedGraph<C>, keep: impl Fn(usize) -> bool) -> Partition {
    const UNSEEN: usize = usize::MAX;
    let n = g.n();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut label = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut next_label = 0;
    // (vertex, position in its out-edge list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let out = g.out_edges(v);
            if *pos < out.len() {
                let e = out[*pos];
                *pos += 1;
                if !keep(e) {
                    continue;
                }
                let w = g.edge(e).head;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        label[w] = next_label;
                        if w == v {
                            break;
                        }
                    }
                    next_label += 1;
                }
            }
        }
    }
    Partition::from_labels(&label)
}

/// Topological order of the components of `partition`, using only edges not in `removed`.
///
/// Ties go to the component with the smallest member vertex, except that the
/// source's component comes first whenever it has no surviving incoming edge.
pub fn scc_topo_order<C: Capacity>(
    g: &DirectedGraph<C>,
    partition: &Partition,
    removed: &EdgeSet,
) -> Result<Vec<usize>> {
    let k = partition.len();
    let mut indeg = vec![0usize; k];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (id, e) in g.edges().iter().enumerate() {
        if removed.contains(id) {
            continue;
        }
        let (cu, cv) = (partition.component_of(e.tail), partition.component_of(e.head));
        if cu != cv {
            succ[cu].push(cv);
            indeg[cv] += 1;
        }
    }
    let source_comp = partition.component_of(g.source());
    let key = |c: usize| (c != source_comp, c);
    let mut ready: BinaryHeap<Reverse<(bool, usize)>> =
        (0..k).filter(|&c| indeg[c] == 0).map(|c| Reverse(key(c))).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(Reverse((_, c))) = ready.pop() {
        order.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.push(Reverse(key(d)));
            }
        }
    }
    if order.len() != k {
        return Err(Error::InternalConsistency(
            "cycle among components: partition is not an SCC condensation".into(),
        ));
    }
    Ok(order)
}
