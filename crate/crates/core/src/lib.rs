pub mod algebra;
pub mod arith;
pub mod congruence;
pub mod error;
pub mod exact;
pub mod finite;
pub mod structure;

pub use error::{Error, Result};
