//! Exact rationals and interval-set algebra on `[0, 1]`.

mod interval;
mod rational;
mod set;

pub use interval::Interval;
pub use rational::{q, Rational, DEFAULT_BIT_CAP};
pub use set::{ball, ball_on, BallStyle, IntervalSet, SetOp};
