//! Line-oriented graph text format.
//!
//! ```text
//! c any comment
//! p dmc <n> <m> <s>
//! a <tail> <head> [<cap>]
//! ```
//!
//! Vertex ids are 1-based in the text and 0-based in memory. A missing
//! capacity means 1. Exactly `m` arc lines must follow the problem line.
//! Self-loops and arcs entering the source are accepted and then dropped by
//! normalization; the counts are returned alongside the graph.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NormalizeReport, MAX_CAPACITY};

/// A parsed graph and what normalization removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedGraph {
    pub graph: DirectedGraph,
    pub dropped: NormalizeReport,
    /// Arc count declared on the problem line.
    pub declared_arcs: usize,
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse { line, message: format!("missing {what}") })?;
    tok.parse().map_err(|_| Error::Parse { line, message: format!("bad {what} {tok:?}") })
}

pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut raw: Vec<(usize, usize, u64)> = Vec::new();
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let mut toks = line.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match tag {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(Error::Parse { line: lineno, message: "second problem line".into() });
                }
                let kind: String = parse_num(toks.next(), lineno, "problem kind")?;
                if kind != "dmc" {
                    return Err(Error::Parse { line: lineno, message: format!("unknown problem kind {kind:?}") });
                }
                let n: usize = parse_num(toks.next(), lineno, "vertex count")?;
                let m: usize = parse_num(toks.next(), lineno, "arc count")?;
                let s: usize = parse_num(toks.next(), lineno, "source")?;
                if n == 0 {
                    return Err(Error::Parse { line: lineno, message: "graph needs at least one vertex".into() });
                }
                if s == 0 || s > n {
                    return Err(Error::Parse { line: lineno, message: format!("source {s} outside 1..={n}") });
                }
                if toks.next().is_some() {
                    return Err(Error::Parse { line: lineno, message: "trailing tokens".into() });
                }
                header = Some((n, m, s - 1));
                raw.reserve(m);
            }
            "a" => {
                let Some((n, m, _)) = header else {
                    return Err(Error::Parse { line: lineno, message: "arc before problem line".into() });
                };
                let tail: usize = parse_num(toks.next(), lineno, "tail")?;
                let head: usize = parse_num(toks.next(), lineno, "head")?;
                let cap: u64 = match toks.next() {
                    Some(t) => parse_num(Some(t), lineno, "capacity")?,
                    None => 1,
                };
                if toks.next().is_some() {
                    return Err(Error::Parse { line: lineno, message: "trailing tokens".into() });
                }
                for v in [tail, head] {
                    if v == 0 || v > n {
                        return Err(Error::Parse { line: lineno, message: format!("vertex {v} outside 1..={n}") });
                    }
                }
                if cap == 0 || cap > MAX_CAPACITY {
                    return Err(Error::Parse { line: lineno, message: format!("capacity {cap} outside 1..=2^40") });
                }
                if raw.len() == m {
                    return Err(Error::Parse { line: lineno, message: format!("more than {m} arcs") });
                }
                raw.push((tail - 1, head - 1, cap));
            }
            other => {
                return Err(Error::Parse { line: lineno, message: format!("unknown line tag {other:?}") });
            }
        }
    }
    let Some((n, m, s)) = header else {
        return Err(Error::Parse { line: last_line.max(1), message: "missing problem line".into() });
    };
    if raw.len() != m {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: format!("{} arcs found, problem line declares {m}", raw.len()),
        });
    }
    let (graph, dropped) = DirectedGraph::normalize_with_report(&raw, n, s)?;
    Ok(ParsedGraph { graph, dropped, declared_arcs: m })
}

/// Writes `g` in the text format, capacities always explicit.
pub fn serialize_graph(g: &DirectedGraph) -> String {
    let mut out = String::with_capacity(16 * (g.m() + 1));
    writeln!(out, "p dmc {} {} {}", g.n(), g.m(), g.source() + 1).unwrap();
    for e in g.edges() {
        writeln!(out, "a {} {} {}", e.tail + 1, e.head + 1, e.capacity).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_of_two() {
        let p = parse_graph("p dmc 2 1 1\na 1 2").unwrap();
        assert_eq!(p.graph.n(), 2);
        assert_eq!(p.graph.m(), 1);
        assert_eq!((p.graph.edge(0).tail, p.graph.edge(0).head, p.graph.edge(0).capacity), (0, 1, 1));
    }

    #[test]
    fn comments_and_blank_lines() {
        let p = parse_graph("c hello\n\np dmc 3 2 1\nc mid\na 1 2 4\na 2 3\n").unwrap();
        assert_eq!(p.graph.total_capacity(), 5);
    }

    #[test]
    fn zero_capacity_rejected_with_line() {
        assert_eq!(
            parse_graph("p dmc 2 1 1\na 1 2 0").unwrap_err(),
            Error::Parse { line: 2, message: "capacity 0 outside 1..=2^40".into() }
        );
    }

    #[test]
    fn self_loop_dropped_and_counted() {
        let p = parse_graph("p dmc 2 2 1\na 1 1 1\na 2 1").unwrap();
        assert_eq!(p.graph.m(), 0);
        assert_eq!(p.dropped, NormalizeReport { self_loops: 1, into_source: 1 });
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_graph("a 1 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("c only"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("p dmc 2 2 1\na 1 2"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("p dmc 2 1 1\na 1 3"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("p dmc 2 0 3"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("p dmc 2 1 1\na 1 2\na 1 2"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_graph("p max 2 1 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_graph("x"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip() {
        let g = DirectedGraph::normalize(&[(0, 1, 3), (1, 2, 1), (1, 2, 7), (2, 1, 2)], 4, 0).unwrap();
        let back = parse_graph(&serialize_graph(&g)).unwrap().graph;
        assert_eq!(back, g);
    }
}
