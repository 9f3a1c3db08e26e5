//! Terminal-set expander decomposition and the expander hierarchy built from it.
//!
//! [`decompose`] is a desk-scale certify-or-cut scheme. Inside every SCC `C`
//! of `G \ B` it draws random bipartitions `(A, C \ A)` and asks max-flow to
//! route `phi * deg_E*` from one side to the other (both directions) through
//! all of `G`. A shortfall yields a sink side `T` with
//! `rho(T) < phi * min(deg_E*(C ∩ T), deg_E*(C \ T))`; the cheaper direction
//! of the `C`-internal edges crossing `T` joins `B` and the pieces are
//! re-examined. If `c(B)` ends above `c(E*) / 2` the whole pass is rerun with
//! `phi` halved, so the halving bound always holds.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{restricted_degrees, DirectedGraph, EdgeSet, Partition};
use crate::maxflow::{max_flow, FlowProblem};
use crate::scalar::{ceil_log2, log_trials, Capacity, Phi};
use crate::scc::{scc, scc_where};

/// Multiplier of `log2 n` for certification trials per component.
pub const DEFAULT_TRIALS_MULT: u32 = 4;

/// Default expansion target.
pub fn default_phi() -> Phi {
    Phi::new(1, 16)
}

/// Output of [`decompose`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompResult {
    /// Cut edges `B`.
    pub cut_edges: EdgeSet,
    /// The `phi` the returned `B` was produced with (`<= phi_target`).
    pub achieved_phi: Phi,
    /// Number of cut steps taken in the final pass.
    pub rounds: usize,
    /// Number of times `phi` was halved.
    pub restarts: usize,
}

/// Mixes two words into an RNG seed (splitmix64 finalizer).
pub(crate) fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_phi(phi: Phi) -> Result<()> {
    if *phi.numer() == 0 || phi > Phi::from_integer(1) {
        return Err(Error::Parameter(format!("phi {phi} must lie in (0, 1]")));
    }
    Ok(())
}

/// Finds cut edges `B` with `c(B) <= c(E*) / 2` such that `E*` is
/// (heuristically) `[G \ B]`-component-constrained `phi`-expanding.
pub fn decompose<C: Capacity>(
    g: &DirectedGraph<C>,
    terminals: &EdgeSet,
    phi_target: Phi,
    seed: u64,
) -> Result<DecompResult> {
    check_phi(phi_target)?;
    if terminals.universe() != g.m() {
        return Err(Error::Parameter("terminal set does not match the graph".into()));
    }
    let budget = terminals.capacity(g).widen();
    let mut phi = phi_target;
    for restarts in 0..=128 {
        let (cut_edges, rounds) = certify_or_cut(g, terminals, phi, mix_seed(seed, restarts as u64));
        if 2 * cut_edges.capacity(g).widen() <= budget {
            return Ok(DecompResult { cut_edges, achieved_phi: phi, rounds, restarts });
        }
        phi /= 2;
    }
    Err(Error::InternalConsistency("phi halving did not converge".into()))
}

fn certify_or_cut<C: Capacity>(g: &DirectedGraph<C>, terminals: &EdgeSet, phi: Phi, seed: u64) -> (EdgeSet, usize) {
    let mut cut = EdgeSet::empty(g.m());
    if terminals.is_empty() {
        return (cut, 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (num, den) = (*phi.numer() as u128, *phi.denom() as u128);
    let scaled = g.map_capacities(|c| c.widen() * den);
    let degrees = restricted_degrees(g, terminals);
    let deg: Vec<u128> = (0..g.n()).map(|v| degrees.deg(v).widen()).collect();
    let trials = log_trials(g.n(), DEFAULT_TRIALS_MULT);

    let mut work: VecDeque<Vec<usize>> = scc(g, &cut).components().iter().cloned().collect();
    let mut rounds = 0;
    while let Some(comp) = work.pop_front() {
        let vol: u128 = comp.iter().map(|&v| deg[v]).sum();
        if comp.len() < 2 || vol == 0 {
            continue;
        }
        let Some(sides) = find_violation(&scaled, &comp, &deg, num, trials, &mut rng) else {
            continue;
        };
        let in_comp = crate::graph::vertex_mask(g.n(), &comp);
        let weight = |es: &[usize]| es.iter().map(|&e| g.edge(e).capacity.widen()).sum::<u128>();
        let mut best: Option<Vec<usize>> = None;
        for sink_side in sides {
            let mut entering = Vec::new();
            let mut leaving = Vec::new();
            for &v in &comp {
                for &e in g.out_edges(v) {
                    let h = g.edge(e).head;
                    if cut.contains(e) || !in_comp[h] || sink_side[v] == sink_side[h] {
                        continue;
                    }
                    if sink_side[h] {
                        entering.push(e);
                    } else {
                        leaving.push(e);
                    }
                }
            }
            let chosen = if weight(&leaving) < weight(&entering) { leaving } else { entering };
            if chosen.is_empty() {
                continue;
            }
            if best.as_ref().map_or(true, |b| weight(&chosen) < weight(b)) {
                best = Some(chosen);
            }
        }
        let Some(chosen) = best else { continue };
        for e in chosen {
            cut.insert(e);
        }
        rounds += 1;
        let pieces = scc_where(g, |e| !cut.contains(e));
        let mut seen = Vec::new();
        for &v in &comp {
            let c = pieces.component_of(v);
            if !seen.contains(&c) {
                seen.push(c);
                work.push_back(pieces.members(c).to_vec());
            }
        }
    }
    (cut, rounds)
}

/// Random bipartition flow test. Returns the largest and smallest sink sides
/// of a violated minimum cut that split the component.
fn find_violation(
    scaled: &DirectedGraph<u128>,
    comp: &[usize],
    deg: &[u128],
    num: u128,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<bool>>> {
    let n = scaled.n();
    for _ in 0..trials {
        let side: Vec<bool> = comp.iter().map(|_| rng.gen_bool(0.5)).collect();
        let vol_a: u128 = comp.iter().zip(&side).filter(|(_, &s)| s).map(|(&v, _)| deg[v]).sum();
        let vol_b: u128 = comp.iter().zip(&side).filter(|(_, &s)| !s).map(|(&v, _)| deg[v]).sum();
        if vol_a == 0 || vol_b == 0 {
            continue;
        }
        let required = num * vol_a.min(vol_b);
        for forward in [true, false] {
            let mut supply = vec![0u128; n];
            let mut sink = vec![0u128; n];
            for (&v, &s) in comp.iter().zip(&side) {
                if s == forward {
                    supply[v] = num * deg[v];
                } else {
                    sink[v] = num * deg[v];
                }
            }
            let r = max_flow(&FlowProblem::new(scaled, supply, sink).with_bound(required));
            if r.value < required {
                let splits = |mask: &Vec<bool>| comp.iter().any(|&v| mask[v]) && comp.iter().any(|&v| !mask[v]);
                let sides: Vec<Vec<bool>> = [&r.min_cut_side, &r.min_sink_side]
                    .into_iter()
                    .map(|side| crate::graph::vertex_mask(n, side))
                    .filter(splits)
                    .collect();
                if !sides.is_empty() {
                    return Some(sides);
                }
            }
        }
    }
    None
}

/// Expander hierarchy: level edge sets `E_1..E_L` and, for `i` in `0..=L`,
/// the SCC partition of `G \ E_{>i}`.
///
/// `E_1 = E`, and `E_{i+1}` is the cut set returned when decomposing with
/// terminals `E_i`, so consecutive levels may share edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    levels: Vec<EdgeSet>,
    partitions: Vec<Partition>,
    phi_target: Phi,
    achieved_phi: Vec<Phi>,
}

impl Hierarchy {
    /// Assembles a hierarchy from level sets, recomputing the partitions.
    pub fn from_levels<C: Capacity>(
        g: &DirectedGraph<C>,
        levels: Vec<EdgeSet>,
        phi_target: Phi,
        achieved_phi: Vec<Phi>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Parameter("a hierarchy has at least one level".into()));
        }
        if levels.iter().any(|l| l.universe() != g.m()) || achieved_phi.len() != levels.len() {
            return Err(Error::Parameter("level sets do not match the graph".into()));
        }
        let mut partitions = Vec::with_capacity(levels.len() + 1);
        for i in 0..=levels.len() {
            let mut above = EdgeSet::empty(g.m());
            for l in &levels[i..] {
                above.union_with(l);
            }
            partitions.push(scc(g, &above));
        }
        Ok(Hierarchy { levels, partitions, phi_target, achieved_phi })
    }

    /// Number of levels `L`.
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// `E_i` for `1 <= i <= L`.
    pub fn level(&self, i: usize) -> &EdgeSet {
        &self.levels[i - 1]
    }

    pub fn levels(&self) -> &[EdgeSet] {
        &self.levels
    }

    /// `E_{>i}`, the union of levels above `i`.
    pub fn above(&self, i: usize) -> EdgeSet {
        let m = self.levels[0].universe();
        let mut above = EdgeSet::empty(m);
        for l in self.levels.iter().skip(i) {
            above.union_with(l);
        }
        above
    }

    /// SCC partition of `G \ E_{>i}` for `0 <= i <= L`.
    pub fn partition(&self, i: usize) -> &Partition {
        &self.partitions[i]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn phi_target(&self) -> Phi {
        self.phi_target
    }

    /// Per-level `phi` reported by the decomposition that produced the level's cut.
    pub fn achieved_phi(&self) -> &[Phi] {
        &self.achieved_phi
    }

    /// Number of edges the hierarchy was built for.
    pub fn m(&self) -> usize {
        self.levels[0].universe()
    }
}

/// Builds the hierarchy by repeated decomposition until no cut edges remain.
pub fn build_hierarchy<C: Capacity>(g: &DirectedGraph<C>, phi_target: Phi, seed: u64) -> Result<Hierarchy> {
    check_phi(phi_target)?;
    let bound = ceil_log2(g.total_capacity().widen()) as usize + 2;
    let mut levels = Vec::new();
    let mut achieved = Vec::new();
    let mut terminals = EdgeSet::full(g.m());
    loop {
        let r = decompose(g, &terminals, phi_target, mix_seed(seed, levels.len() as u64 + 1))?;
        levels.push(terminals);
        achieved.push(r.achieved_phi);
        if r.cut_edges.is_empty() {
            break;
        }
        if levels.len() >= bound {
            return Err(Error::HalvingViolation { levels: levels.len() + 1, bound });
        }
        terminals = r.cut_edges;
    }
    Hierarchy::from_levels(g, levels, phi_target, achieved)
}

/// Lists every violated structural hierarchy invariant (empty when valid).
pub fn hierarchy_violations<C: Capacity>(g: &DirectedGraph<C>, h: &Hierarchy) -> Vec<String> {
    let mut out = Vec::new();
    let l = h.num_levels();
    if h.m() != g.m() {
        out.push(format!("hierarchy built for {} edges, graph has {}", h.m(), g.m()));
        return out;
    }
    let mut union = EdgeSet::empty(g.m());
    for level in h.levels() {
        union.union_with(level);
    }
    if union.len() != g.m() {
        out.push(format!("levels cover {} of {} edges", union.len(), g.m()));
    }
    for i in 1..l {
        let (lo, hi) = (h.level(i).capacity(g).widen(), h.level(i + 1).capacity(g).widen());
        if 2 * hi > lo {
            out.push(format!("c(E_{}) = {hi} exceeds c(E_{i}) / 2 = {lo}/2", i + 1));
        }
    }
    let max_levels = ceil_log2(h.level(1).capacity(g).widen()) as usize + 1;
    if l > max_levels {
        out.push(format!("{l} levels exceed ceil(log2 c(E_1)) + 1 = {max_levels}"));
    }
    for i in 0..=l {
        let expected = scc(g, &h.above(i));
        if &expected != h.partition(i) {
            out.push(format!("level-{i} partition is not the SCC partition of G minus E_>{i}"));
        }
        if h.partition(i).members(h.partition(i).component_of(g.source())).len() != 1 {
            out.push(format!("source is not a singleton at level {i}"));
        }
    }
    if h.partition(0) != &Partition::singletons(g.n()) {
        out.push("level-0 partition is not all singletons".into());
    }
    for i in 0..l {
        if !h.partition(i).refines(h.partition(i + 1)) {
            out.push(format!("level-{i} partition does not refine level {}", i + 1));
        }
    }
    out
}
