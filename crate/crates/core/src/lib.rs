//! Exact finite-horizon recurrence analysis for finitely generated
//! semigroups of measurable interval maps and their induced Markov chains.

pub mod catalogue;
pub mod classify;
pub mod combinatorics;
pub mod error;
pub mod geometry;
pub mod limits;
pub mod maps;
pub mod markov;
pub mod measures;
pub mod semigroup;

pub use error::{Error, Result};
pub use limits::Limits;
