//! Instance transformations between homomorphism and model-checking
//! problems. Each function maps an instance to a [`HomInstance`] whose answer
//! equals the answer of the input; the equivalences are exercised by the
//! tests against brute-force oracles.
//!
//! | function | input | output |
//! |---|---|---|
//! | [`decon_hom_reduction`] | `G* → b`, deconstruction over `H` | `H* → b'` |
//! | [`decomp_hom_reduction`] | `A* → b`, decomposition over a forest `H` | `H* → b'` |
//! | [`product_reduction`] | `A* → b`, `A` a core | `A → b'` |
//! | [`color_trivialize`] | `A → b` | `core(A)* → b'` |
//! | [`incidence_reduction`] | `A → b` | `in(A)* → b'` |
//! | [`dpp_to_hom`] | `b ⊨ φ_1 ∨ … ∨ φ_k` | `F* → b'` |
//! | [`mc_to_hom_pipeline`] | `b ⊨ f`, `f` existential | `F* → b'` |

mod bags;
mod classes;
mod logic;
mod report;

pub use bags::{
    bag_symbol, decomp_hom_reduction, decon_hom_reduction, deconstruction_interpretation, EMPTY_BAG_VERTEX,
    INERT_VERTEX,
};
pub use classes::{color_trivialize, incidence_graph, incidence_name, incidence_reduction, product_reduction, Incidence};
pub use logic::{dpp_to_hom, mc_to_hom_pipeline};
pub use report::{HomInstance, ReductionReport, Trace};
