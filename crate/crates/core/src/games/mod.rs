//! Existential pebble games with a fixed number of pebbles per round.
//!
//! Positions only grow: in round `i + 1` Spoiler extends the current domain
//! by at most `p_{i+1}` elements and Duplicator must extend her partial
//! homomorphism accordingly. [`build_unfolding`] constructs the structure
//! `T_v(A)` whose homomorphisms capture exactly these games.

mod strategy;
mod unfold;
mod vector;

pub use strategy::{duplicator_wins, is_winning_strategy, NamedStrategy, StrategyTable, Verdict};
pub use unfold::{
    build_unfolding, extract_v_decomposition, min_pebbles_unary, strategy_to_hom, v_game_solves,
    validate_v_decomposition, Solves, Unfolding, VDecomposition, VViolation,
};
pub use vector::{set_vectors, GameVector, SetVector};
