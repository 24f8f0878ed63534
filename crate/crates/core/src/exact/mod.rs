//! Exact arithmetic: fields, polynomials, matrices, words and generated groups.

pub mod field;
pub mod group;
pub mod groupfile;
pub mod int;
pub mod linalg;
pub mod matrix;
pub mod mpoly;
pub mod parse;
pub mod poly;
pub mod word;

pub use field::{Field, Scalar};
pub use group::GeneratedGroup;
pub use matrix::Matrix;
pub use poly::Poly;
pub use word::GenWord;
