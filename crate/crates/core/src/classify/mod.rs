//! Finite-horizon recurrence classification for maps, chains and semigroups.

mod chain;
mod map;
pub mod orbit;
mod rfunc;
mod verdict;

pub use chain::{chain_ball, classify_chain_point, classify_semigroup_point, first_reachable_return};
pub use map::{classify_map_point, map_ball};
pub use orbit::{first_image_return, orbit_returns, OrbitReturns};
pub use rfunc::{meets_own_images, r_function, RBracket};
pub use verdict::{
    Certificate, ClassifyConfig, McSummary, Mode, RecurrenceVerdict, Subject, UniformEstimate, DEFAULT_MAP_GRID,
    DEFAULT_R_MIN,
};
