//! Shared numerical primitives: adaptive quadrature, high-precision normal
//! tails, monotone interpolation, and bracketed root finding.

pub mod interp;
pub mod normal;
pub mod quad;
pub mod solve;

pub use interp::MonotoneCubic;
pub use quad::{integrate, integrate_with_breaks, QuadOptions, QuadResult};
