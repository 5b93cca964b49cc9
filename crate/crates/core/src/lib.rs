//! Kripke-Joyal forcing over finite topological spaces, a bounded-rank
//! hierarchy of variable sets, and the correspondence between self-adjoint
//! operators and internal Dedekind reals on finite quantum contexts.
//!
//! The crate is organized around the base space: [`topology`] supplies finite
//! spaces and their Heyting algebra of opens, [`formula`] the first-order
//! language, and [`forcing`] the evaluator that assigns every closed formula
//! an open truth value. On top of those sit [`vset`] (variable sets),
//! [`quantum`] (contexts built from commuting Hermitian observables),
//! [`takeuti`] (operators as internal reals), and [`generic`] (filters and
//! the collapse to classical models).

pub mod error;
pub mod fixtures;
pub mod forcing;
pub mod generic;
pub mod formula;
pub mod linalg;
pub mod quantum;
pub mod takeuti;
pub mod vset;
pub mod topology;

pub use error::{Error, Result};
