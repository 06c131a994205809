//! Coupling graphs, layouts and isomorphic re-embeddings.

mod embed;
mod graph;
mod layout;

pub use embed::find_isomorphic_embeddings;
pub use graph::ConnectivityGraph;
pub use layout::{apply_layout, remap, trivial_layout, used_subgraph, Mapping};
