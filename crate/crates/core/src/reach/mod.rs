//! Lower bounds on the reach of `Z(f)`: Smale's `γ`, Kantorovich's measure,
//! the 1-condition number, and the worst-case bit-size formula.

mod bounds;
mod report;
mod smale;
mod worstcase;

pub use bounds::{
    kantorovich_k_upper, reach_lb_cond_global, reach_lb_cond_local, reach_lb_gamma, reach_lb_kantorovich,
    GlobalReachBound, KantorovichData, KantorovichRoutes,
};
pub use report::{reach_bound_report, ReachBoundReport, ReachOptions};
pub use smale::{
    check_zero, newton_refine, smale_beta, smale_gamma, smale_gamma_upper, zero_tol, GammaBounds, NewtonOutcome,
};
pub use worstcase::{worstcase_bit_bound, WorstCaseBound};
