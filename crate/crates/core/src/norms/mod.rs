//! Dense linear algebra for small matrices: SVD, pseudoinverses, the
//! `(∞,2)` operator norm and `(2,2)` norms of multilinear maps.

mod matrix;
mod opnorm;
mod svd;
mod tensor_norm;

pub use matrix::Mat;
pub use opnorm::{
    minvalue_inf_two, minvalue_inf_two_with, opnorm_inf_two, opnorm_inf_two_with, perturbation_check,
    pseudoinverse, rank_tol, NormOptions, OperatorNormBounds,
};
pub use svd::{singular_values, spectral_norm, svd, symmetric_eigenvalues, Svd};
pub use tensor_norm::{multilinear_22_bounds, tensor_22_norm_bounds, Multilinear, PowerOptions};
