//! Numerical toolkit for tail sums of heavy-tailed random variables.
//!
//! The object of study is the ratio
//!
//! ```text
//!     P[X₁ + ⋯ + Xₙ > s] / (n · F̄(s))
//! ```
//!
//! for independent variables with a common heavy right tail F̄.  When the tail
//! is subexponential this ratio tends to 1: the sum exceeds a high threshold
//! essentially only when a single summand does.  Everything in this crate is a
//! desk-scale tool for making that statement quantitative:
//!
//! * [`model`] — distribution families written through the hazard
//!   decomposition ψ(t) = −log F̄(t) = b(t) + ∫₀ᵗ η(u) du with η
//!   nonincreasing and b bounded, plus truncated moments and reproducible
//!   inverse-transform sampling;
//! * [`conditions`] — the condition functionals whose smallness certifies
//!   uniform one-big-jump behaviour over n, together with diagnostic checks
//!   and a threshold solver;
//! * [`bounds`] — explicit, non-asymptotic upper and lower envelopes for the
//!   ratio built from exponential tilting of a truncated sum;
//! * [`convolve`] — exact-arithmetic n-fold tail convolution on an adaptive
//!   grid, used as an oracle for small n;
//! * [`simulate`] — Monte Carlo estimation of the ratio, including a
//!   conditional single-big-jump estimator with far smaller variance than the
//!   crude indicator;
//! * [`report`] — plain-text CSV and JSON emission for all of the above.

pub mod bounds;
pub mod conditions;
pub mod convolve;
pub mod error;
pub mod model;
pub mod numeric;
pub mod report;
pub mod simulate;

pub use error::{Error, Result};
pub use model::TailModel;
