//! Directed expander hierarchies, approximate s-rooted minimum cuts, and
//! low-congestion arborescence packing, with exact oracles to check them.

pub mod cli;
pub mod decomp;
pub mod error;
pub mod gen;
pub mod io;
pub mod graph;
pub mod maxflow;
pub mod mincut;
pub mod oracle;
pub mod packing;
pub mod routing;
pub mod scalar;
pub mod scc;

pub use decomp::{build_hierarchy, decompose, Hierarchy};
pub use error::{Error, Result};
pub use graph::{DirectedGraph, Edge, EdgeSet, Partition};
pub use mincut::{approx_rooted_mincut, MincutConfig};
pub use packing::{pack, PackConfig, PackingResult};
pub use scalar::{Capacity, Phi};

/// Graph with the default 64-bit integer capacities.
pub type Graph = DirectedGraph<u64>;
/// Approximate cut candidate over [`Graph`].
pub type Cut = mincut::CutCandidate<u64>;
