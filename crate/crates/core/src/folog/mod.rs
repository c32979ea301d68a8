//! Existential first-order logic: syntax, evaluation, interpretations and
//! the passages between primitive positive sentences and structures.

mod eval;
mod formula;
mod normal;

pub use eval::{eval_interpretation, model_check, satisfies, Definition, Interpretation, UNIVERSE};
pub use formula::{classify_fragment, qrank, Atom, Formula, Fragment, Var};
pub use normal::{
    canonical_query, canonical_sentence, canonical_structure, complement_symbol, existential_to_dpp, formula_forest,
    normalize, pp_normal_form, NOT_EQUAL,
};
