pub mod condition;
pub mod error;
pub mod federer;
pub mod norms;
pub mod poly;
pub mod random;
pub mod reach;
pub mod scalar;
pub mod serde_ext;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Poly = poly::PolyTuple<f64>;
pub type Poly32 = poly::PolyTuple<f32>;
pub type Matrix = norms::Mat<f64>;
pub type ConditionReport = condition::ConditionReport<f64>;
pub type GlobalCondResult = condition::GlobalCondResult<f64>;
pub type ReachBoundReport = reach::ReachBoundReport<f64>;
