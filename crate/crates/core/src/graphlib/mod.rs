//! Graphs, rooted forests, generators and exact invariants of small graphs.

pub mod generate;
mod graph;
mod minor;
mod width;

pub use graph::{dfs_forest, Graph, RootedForest};
pub use minor::{find_minor, has_property_p, is_minor_map, property_p_nodes, stack_profile, MinorMap};
pub use width::{pathwidth, tree_depth, treewidth, TreeDepth};
