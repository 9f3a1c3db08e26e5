#![allow(dead_code)]

use arbor::gen::{generate, GenKind};
use arbor::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded instance from one of the five generators, with at most `max_n`
/// vertices and roughly `max_m` arcs. `max_cap == 1` keeps it unit.
pub fn mixed_instance(seed: u64, max_n: usize, max_m: usize, max_cap: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_c0_4b05);
    let kind = match seed % 5 {
        0 => {
            let n = rng.gen_range(2..=max_n);
            let m = rng.gen_range(n..=max_m.min(5 * n).max(n));
            GenKind::RandomGnm { n, m, max_cap }
        }
        1 => {
            let layers = rng.gen_range(1..=4.min(max_n - 1));
            let width = rng.gen_range(1..=((max_n - 1) / layers).max(1));
            let n = 1 + layers * width;
            GenKind::DagLayered { layers, width, extra: rng.gen_range(0..=max_m.saturating_sub(n).min(2 * n)), max_cap }
        }
        2 => GenKind::TwoCliquesBridge { size: rng.gen_range(2..=((max_n - 1) / 2).clamp(2, 5)) },
        3 => {
            let n = rng.gen_range(3..=max_n.max(3));
            GenKind::CyclePlusChords { n, chords: rng.gen_range(0..=max_m.saturating_sub(n).min(2 * n)), max_cap }
        }
        _ => {
            let n = rng.gen_range(2..=max_n);
            let k = rng.gen_range(1..=3);
            let extra = rng.gen_range(0..=max_m.saturating_sub(k * (n - 1)).min(n));
            GenKind::KnownPacking { n, k, extra }
        }
    };
    generate(&kind, seed).expect("generator parameters are valid")
}

/// Capacity bound for the `i`-th corpus instance: half unit, half weighted.
pub fn cap_for(i: u64, max_cap: u64) -> u64 {
    if i % 2 == 0 {
        1
    } else {
        max_cap
    }
}

/// Brute-force minimum of `rho(S)` over non-empty `S` avoiding the source.
pub fn brute_rooted_mincut(g: &Graph) -> u64 {
    let n = g.n();
    let s = g.source();
    let mut best = u64::MAX;
    for bits in 1u32..(1 << n) {
        if bits >> s & 1 == 1 {
            continue;
        }
        let rho: u64 = g
            .edges()
            .iter()
            .filter(|e| bits >> e.head & 1 == 1 && bits >> e.tail & 1 == 0)
            .map(|e| e.capacity)
            .sum();
        best = best.min(rho);
    }
    best
}

/// Brute-force minimum `s`-`t` cut: min of `delta(S)` over `S` with `s` in, `t` out.
pub fn brute_st_cut(g: &Graph, s: usize, t: usize) -> u64 {
    let n = g.n();
    let mut best = u64::MAX;
    for bits in 0u32..(1 << n) {
        if bits >> s & 1 == 0 || bits >> t & 1 == 1 {
            continue;
        }
        let delta: u64 = g
            .edges()
            .iter()
            .filter(|e| bits >> e.tail & 1 == 1 && bits >> e.head & 1 == 0)
            .map(|e| e.capacity)
            .sum();
        best = best.min(delta);
    }
    best
}
