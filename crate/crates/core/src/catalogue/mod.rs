//! Named example systems and their expected properties.

pub mod examples;
mod manifest;

pub use examples::{build_example, ExampleParams, Kind, DEFAULT_DEPTH, NAMES};
pub use manifest::{manifest, run_check, run_manifest, Basis, Check, Claim, ClaimResult, ExampleManifest, Grid};
