//! The 1-condition number: pointwise, on the homogeneous cube boundary, and
//! certified over `[−R,R]ⁿ`.

mod global;
mod local;

pub use global::{cond_global, cond_global_decide, dist_from_bracket, dist_to_singular_bounds, CondGlobalOptions, GlobalCondResult};
pub use local::{cond_homog, cond_local, ConditionReport, HomogEvaluator};
