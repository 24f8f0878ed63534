//! Congruence images: finite matrix groups over `F_q` or `Z_m`.

pub mod chain;
pub mod image;
pub mod mat;
pub mod present;
pub mod ring;

pub use chain::{Chain, ChainOpts};
pub use image::{build_image, FiniteImage};
pub use mat::FMat;
pub use present::{cayley_relators, normal_generators, CayleyRelators, NormalGenerators};
pub use ring::FiniteRing;
