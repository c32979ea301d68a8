//! Executable relational-structure theory at desk scale.

pub mod error;
pub mod decon;
pub mod folog;
pub mod games;
pub mod graphlib;
pub mod limits;
pub mod reduce;
pub mod relstruct;

pub use error::{Error, Result};
pub use limits::{Budget, Limits};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/structures.md")]
    mod structures {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/deconstructions.md")]
    mod deconstructions {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/logic.md")]
    mod logic {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
