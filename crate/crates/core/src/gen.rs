//! Seeded instance generators. Vertex 0 is always the source and no
//! generated edge enters it or loops, so outputs are already normalized.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// `m` arcs with uniform endpoints.
    RandomGnm { n: usize, m: usize, max_cap: u64 },
    /// The source, then `layers` layers of `width` vertices. Each vertex gets
    /// one arc from the previous layer, plus `extra` random forward arcs.
    DagLayered { layers: usize, width: usize, extra: usize, max_cap: u64 },
    /// Two bidirected cliques of `size` vertices joined by one arc each way;
    /// the source feeds the first clique.
    TwoCliquesBridge { size: usize },
    /// The source feeds a directed cycle on `1..n`, plus `chords` random arcs.
    CyclePlusChords { n: usize, chords: usize, max_cap: u64 },
    /// Union of `k` random spanning arborescences plus `extra` random arcs;
    /// rooted connectivity is at least `k`.
    KnownPacking { n: usize, k: usize, extra: usize },
}

impl GenKind {
    pub fn name(&self) -> &'static str {
        match self {
            GenKind::RandomGnm { .. } => "random_gnm",
            GenKind::DagLayered { .. } => "dag_layered",
            GenKind::TwoCliquesBridge { .. } => "two_cliques_bridge",
            GenKind::CyclePlusChords { .. } => "cycle_plus_chords",
            GenKind::KnownPacking { .. } => "known_packing",
        }
    }
}

fn cap(rng: &mut ChaCha8Rng, max_cap: u64) -> u64 {
    rng.gen_range(1..=max_cap)
}

fn check_cap(max_cap: u64) -> Result<()> {
    if max_cap == 0 || max_cap > crate::graph::MAX_CAPACITY {
        return Err(Error::Parameter(format!("max capacity {max_cap} outside 1..=2^40")));
    }
    Ok(())
}

/// Arc with uniform endpoints, never entering the source nor looping.
fn random_arc(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    loop {
        let tail = rng.gen_range(0..n);
        let head = rng.gen_range(1..n);
        if tail != head {
            return (tail, head);
        }
    }
}

pub fn generate(kind: &GenKind, seed: u64) -> Result<DirectedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, raw) = match *kind {
        GenKind::RandomGnm { n, m, max_cap } => {
            check_cap(max_cap)?;
            if n == 0 || (m > 0 && n < 2) {
                return Err(Error::Parameter(format!("random_gnm needs n >= 2 for arcs (n = {n})")));
            }
            let raw = (0..m)
                .map(|_| {
                    let (t, h) = random_arc(&mut rng, n);
                    (t, h, cap(&mut rng, max_cap))
                })
                .collect();
            (n, raw)
        }
        GenKind::DagLayered { layers, width, extra, max_cap } => {
            check_cap(max_cap)?;
            if layers == 0 || width == 0 {
                return Err(Error::Parameter("dag_layered needs layers >= 1 and width >= 1".into()));
            }
            let layer_of = |v: usize| if v == 0 { 0 } else { 1 + (v - 1) / width };
            let first = |l: usize| if l == 0 { 0 } else { 1 + (l - 1) * width };
            let size = |l: usize| if l == 0 { 1 } else { width };
            let n = 1 + layers * width;
            let mut raw = Vec::with_capacity(n + extra);
            for v in 1..n {
                let l = layer_of(v) - 1;
                let t = first(l) + rng.gen_range(0..size(l));
                raw.push((t, v, cap(&mut rng, max_cap)));
            }
            for _ in 0..extra {
                let h = rng.gen_range(1..n);
                let l = rng.gen_range(0..layer_of(h));
                let t = first(l) + rng.gen_range(0..size(l));
                raw.push((t, h, cap(&mut rng, max_cap)));
            }
            (n, raw)
        }
        GenKind::TwoCliquesBridge { size } => {
            if size < 2 {
                return Err(Error::Parameter("two_cliques_bridge needs size >= 2".into()));
            }
            let mut raw = Vec::new();
            for base in [1, 1 + size] {
                for a in base..base + size {
                    for b in (base..base + size).filter(|&b| b != a) {
                        raw.push((a, b, 1));
                    }
                }
            }
            raw.push((size, size + 1, 1));
            raw.push((size + 1, size, 1));
            raw.push((0, 1, 1));
            (1 + 2 * size, raw)
        }
        GenKind::CyclePlusChords { n, chords, max_cap } => {
            check_cap(max_cap)?;
            if n < 3 {
                return Err(Error::Parameter("cycle_plus_chords needs n >= 3".into()));
            }
            let mut raw = vec![(0, 1, cap(&mut rng, max_cap))];
            for v in 1..n {
                let next = if v + 1 == n { 1 } else { v + 1 };
                raw.push((v, next, cap(&mut rng, max_cap)));
            }
            for _ in 0..chords {
                let a = rng.gen_range(1..n);
                let mut b = rng.gen_range(1..n - 1);
                if b >= a {
                    b += 1;
                }
                raw.push((a, b, cap(&mut rng, max_cap)));
            }
            (n, raw)
        }
        GenKind::KnownPacking { n, k, extra } => {
            if n < 2 || k == 0 {
                return Err(Error::Parameter("known_packing needs n >= 2 and k >= 1".into()));
            }
            let mut raw = Vec::with_capacity(k * (n - 1) + extra);
            let mut order: Vec<usize> = (1..n).collect();
            for _ in 0..k {
                order.shuffle(&mut rng);
                for (pos, &v) in order.iter().enumerate() {
                    let pick = rng.gen_range(0..=pos);
                    let parent = if pick == 0 { 0 } else { order[pick - 1] };
                    raw.push((parent, v, 1));
                }
            }
            for _ in 0..extra {
                let (t, h) = random_arc(&mut rng, n);
                raw.push((t, h, 1));
            }
            (n, raw)
        }
    };
    DirectedGraph::normalize(&raw, n, 0)
}
