//! Random polynomial models, their tail bounds, and a Monte Carlo harness
//! comparing the two.

mod mc;
mod model;
mod tail;

pub use mc::{
    mc_tail_experiment, run_experiment, theoretical_tail, wilson_interval, ExperimentConfig, Geometry, McOptions,
    Statistic, TailCurve, TailPoint, POWERED_TRIALS, Z95,
};
pub use model::{
    model_constants, renegar_set, sample_tuple, sample_tuple_with, supports, ModelConstants, ModelKind,
    RandomModelSpec, SupportSpec,
};
pub use tail::{
    cont_threshold, tail_bound_cont, tail_bound_cont_best_p, tail_bound_disc, TailBound, TailKind, TailParams,
};
