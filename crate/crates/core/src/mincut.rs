//! Sampling-based approximate s-rooted minimum cut over an expander hierarchy.
//!
//! For every level `i` and every level-`i` component `C` other than `{s}`,
//! endpoints of capacity-weighted random edges of `E_i[C]` are sampled and the
//! minimum cut from `E⁻(C)` into each sampled vertex is computed. Level 0 is
//! scanned exhaustively (`rho(v)` for every `v`). The smallest candidate wins.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decomp::{mix_seed, Hierarchy, DEFAULT_TRIALS_MULT};
use crate::error::{Error, Result};
use crate::graph::{cut_values, vertex_mask, DirectedGraph};
use crate::maxflow::{max_flow, FlowProblem};
use crate::scalar::{log_trials, Capacity};

/// One computed cut `(V \ C_v, C_v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutCandidate<C> {
    /// `C_v`, ascending; never contains the source.
    pub vertex_set: Vec<usize>,
    /// `rho(C_v)`.
    pub rho: C,
    pub level: usize,
    pub component: usize,
    pub sampled_vertex: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MincutConfig {
    /// Samples per component are `ceil(trials_mult * log2 n)`.
    pub trials_mult: u32,
    pub seed: u64,
}

impl Default for MincutConfig {
    fn default() -> Self {
        MincutConfig { trials_mult: DEFAULT_TRIALS_MULT, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MincutOutcome<C> {
    pub best: CutCandidate<C>,
    /// Every candidate in evaluation order (level, component, sample).
    pub candidates: Vec<CutCandidate<C>>,
}

/// Samples `trials` endpoints: an edge with probability proportional to its
/// capacity, then one of its endpoints by a fair coin.
pub fn sample_endpoints<C: Capacity, R: Rng + ?Sized>(
    g: &DirectedGraph<C>,
    edges: &[usize],
    trials: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if edges.is_empty() {
        return Err(Error::Parameter("cannot sample from an empty edge set".into()));
    }
    let weights: Vec<u128> = edges.iter().map(|&e| g.edge(e).capacity.widen()).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok((0..trials)
        .map(|_| {
            let e = g.edge(edges[dist.sample(rng)]);
            if rng.gen_bool(0.5) {
                e.tail
            } else {
                e.head
            }
        })
        .collect())
}

/// Minimum of `rho(T)` over `v ∈ T ⊆ C`, with a maximal minimizer.
///
/// Everything outside `C` acts as one super-source feeding each `w ∈ C` with
/// the capacity of the edges entering `w` from outside; `v` is the sink.
pub fn mincut_into_component<C: Capacity>(
    g: &DirectedGraph<C>,
    comp: &[bool],
    v: usize,
) -> Result<CutCandidate<C>> {
    if !comp[v] {
        return Err(Error::Parameter(format!("vertex {v} is not in the component")));
    }
    if comp[g.source()] {
        return Err(Error::Parameter("the component contains the source".into()));
    }
    let mut supply = vec![C::zero(); g.n()];
    let mut inner = C::zero();
    for e in g.edges() {
        if comp[e.head] {
            inner = inner + e.capacity;
            if !comp[e.tail] {
                supply[e.head] = supply[e.head] + e.capacity;
            }
        }
    }
    let mut sink = vec![C::zero(); g.n()];
    sink[v] = inner + C::one();
    let r = max_flow(&FlowProblem::new(g, supply, sink).restricted_to(comp));
    let vertex_set = r.min_cut_side;
    debug_assert_eq!(cut_values(g, &vertex_mask(g.n(), &vertex_set)).1, r.value);
    Ok(CutCandidate { vertex_set, rho: r.value, level: 0, component: 0, sampled_vertex: v })
}

/// Approximate s-rooted minimum cut. Deterministic for a fixed seed,
/// regardless of the number of worker threads.
pub fn approx_rooted_mincut<C: Capacity>(
    g: &DirectedGraph<C>,
    h: &Hierarchy,
    config: &MincutConfig,
) -> Result<MincutOutcome<C>> {
    if h.m() != g.m() || h.partition(0).n() != g.n() {
        return Err(Error::Parameter("hierarchy was not built on this graph".into()));
    }
    let s = g.source();
    let mut candidates = Vec::new();
    for v in (0..g.n()).filter(|&v| v != s) {
        let rho = cut_values(g, &vertex_mask(g.n(), &[v])).1;
        candidates.push(CutCandidate {
            vertex_set: vec![v],
            rho,
            level: 0,
            component: h.partition(0).component_of(v),
            sampled_vertex: v,
        });
    }

    let trials = log_trials(g.n(), config.trials_mult.max(1));
    for level in 1..=h.num_levels() {
        let part = h.partition(level);
        let edges = h.level(level);
        let per_comp: Vec<Result<Vec<CutCandidate<C>>>> = (0..part.len())
            .into_par_iter()
            .map(|c| {
                let members = part.members(c);
                if members.contains(&s) {
                    return Ok(Vec::new());
                }
                let mask = part.mask(c);
                let inside: Vec<usize> = edges
                    .iter()
                    .filter(|&e| mask[g.edge(e).tail] && mask[g.edge(e).head])
                    .collect();
                if inside.is_empty() {
                    return Ok(Vec::new());
                }
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, (level as u64) << 32 | c as u64));
                let mut sampled = sample_endpoints(g, &inside, trials, &mut rng)?;
                let mut seen = vec![false; g.n()];
                sampled.retain(|&v| !std::mem::replace(&mut seen[v], true));
                sampled
                    .into_iter()
                    .map(|v| {
                        let mut cand = mincut_into_component(g, &mask, v)?;
                        cand.level = level;
                        cand.component = c;
                        Ok(cand)
                    })
                    .collect()
            })
            .collect();
        for r in per_comp {
            candidates.extend(r?);
        }
    }

    let best = candidates
        .iter()
        .min_by_key(|c| c.rho)
        .cloned()
        .ok_or_else(|| Error::Parameter("graph has no vertex besides the source".into()))?;
    Ok(MincutOutcome { best, candidates })
}
