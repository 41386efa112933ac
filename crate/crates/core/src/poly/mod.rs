//! Sparse polynomial tuples: representation, parsing, evaluation,
//! differentiation and the 1-norm calculus.

mod json;
mod multi_index;
mod parse;
mod tensor;
mod tuple;

pub use json::{PolyTupleJson, TermJson};
pub use multi_index::MultiIndex;
pub use parse::{parse_poly_text, parse_poly_text_infer};
pub use tensor::DerivativeTensor;
pub use tuple::{PolyTuple, Polynomial};
