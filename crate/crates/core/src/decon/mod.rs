//! Deconstructions of one graph along another.
//!
//! A value pairs a subject graph with a host graph and one bag of subject
//! vertices per host vertex. In deconstruction mode every reflexive subject
//! edge must sit in the union of the bags at the ends of a reflexive host
//! edge; in decomposition mode it must sit in a single bag. In both modes the
//! host vertices whose bags contain a given subject vertex must be connected.

mod build;
mod hierarchy;
mod nice;
mod types;

pub use build::{compose, decomp_from_treedepth_witness, from_minor_map, grid_deconstruction, self_deconstruction, tree_decon_to_decomp};
pub use hierarchy::{hierarchy_level, ClassFacts, HierarchyLevel};
pub use nice::{build_td_deconstruction, is_nice, TdDeconstruction};
pub use types::{
    decomposition_width, deconstruction_width, validate, width, DeconViolation, Deconstruction, DeconstructionSpec, Mode,
};
pub(crate) use types::ensure_valid;
