//! Reference measures, Poincaré-type partial sums, and the Ulam
//! discretization of the chain with its stationary components.

mod measure;
mod series;
mod stationary;
mod ulam;

pub use measure::{bin, bin_of, Measure};
pub use series::{
    chain_return_sums, least_squares_slope, naive_generator_sums, naive_sequence_sums,
    poincare_partial_sums, trend_tag, SeriesReport, Trend,
};
pub use stationary::{stationary_components, StationaryComponent, MAX_ITERATIONS};
pub use ulam::{check_bins, ulam_matrix, UlamMatrix};
