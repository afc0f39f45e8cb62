//! Exact piecewise-polynomial self-maps of `[0, 1]`.
//!
//! A [`PiecewiseMap`] supports pointwise evaluation, exact forward images of
//! interval sets, exact preimages (affine branches only) and materialized
//! composition along a [`Word`].

mod generators;
mod piecewise;
mod poly;

pub use generators::{GeneratorSet, Word};
pub use piecewise::{MapSpec, OverrideSpec, Piece, PiecewiseMap};
pub use poly::Poly;
