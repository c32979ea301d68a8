//! Finite relational structures, homomorphisms and cores.

mod core;
mod hom;
mod iso;
mod ops;
mod structure;

pub use self::core::{core, is_core};
pub use hom::{find_hom, find_hom_within, for_each_hom, hom_exists, Outcome};
pub use iso::{find_isomorphism, is_isomorphic};
pub use ops::{
    color_symbol, component_sets, components, direct_product, gaifman, induced, induced_by_names,
    is_hom, is_partial_hom, pair, reduct, star_expand, PartialHom, P1, P2,
};
pub use structure::{
    validate_structure, Elem, Relation, Structure, StructureBuilder, StructureSpec, Violation,
    Vocabulary,
};
