//! Empirical reach from samples of the variety, via Federer's quotient.

mod estimate;
mod sample;
pub mod univariate;

pub use estimate::{
    estimate_reach, estimate_reach_local, tangent_distance, LocalReachEstimate, ReachEstimate, TANGENT_FLOOR,
};
pub use sample::{sample_variety, sample_variety_with, SampleOptions, SampleStats, VarietySample};
