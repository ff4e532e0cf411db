//! Census of one-vertex 3-manifold triangulations by enumerating ordered
//! decompositions of fattened face pairing graphs, with a brute-force face
//! gluing oracle for cross-checking.

pub mod decomp;
pub mod fatgraph;
pub mod multigraph;
pub mod oracle;
pub mod search;
pub mod tri;

pub use decomp::{OrderedDecomposition, SignedLabel, Walk};
pub use fatgraph::{fatten, FatGraph};
pub use multigraph::{generate, MultiGraph};
pub use search::{enumerate, SearchConfig, Statistics, Variant};
pub use tri::Triangulation;
