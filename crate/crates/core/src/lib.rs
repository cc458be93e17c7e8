//! Random spanning trees and k-splicers: Aldous-Broder and Process B_p
//! sampling, exact linear-algebra oracles, expansion and cut-ratio checks,
//! distributional statistics, and tree-switching routing.

pub mod cuts;
pub mod error;
pub mod graph;
pub mod io;
pub mod rng;
pub mod route;
pub mod sampler;
pub mod spectral;
pub mod splicer;
pub mod stats;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{Graph, Vertex};
pub use rng::Seed;
pub use splicer::{Splicer, WeightedGraph};
pub use tree::{SpanningTree, WalkTrace};
