//! Multigraphs, rooted trees, path-trees and k-transformations.

pub mod generators;
mod multigraph;
mod path_tree;
mod transform;
mod tree;

pub use multigraph::Multigraph;
pub use path_tree::{path_tree, PathTree, DEFAULT_NODE_CAP};
pub use transform::{k_transform_edges, k_transform_vertices, KTransform};
pub use tree::RootedTree;
