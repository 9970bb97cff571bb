//! Exponential control family.
//!
//! Not heavy-tailed: η(t) ≡ rate does not vanish, so none of the one-big-jump
//! machinery applies — which is the point.  Convolution and simulation runs
//! against this family show what failure of subexponentiality looks like
//! (P[Sₙ > t]/(n F̄(t)) grows without bound, and F̄(t+y)/F̄(t) stays at e^{−ry}
//! instead of tending to 1).

use super::{FamilyInfo, TailModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "exponential family needs rate > 0, got {rate}"
            )));
        }
        Ok(Self { rate })
    }
}

impl TailModel for Exponential {
    fn family(&self) -> FamilyInfo {
        FamilyInfo {
            name: "exponential",
            params: vec![("rate", self.rate)],
        }
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn log_right_tail(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -self.rate * t
        }
    }

    fn left_tail(&self, _x: f64) -> f64 {
        0.0
    }

    fn hazard_rate(&self, _t: f64) -> f64 {
        self.rate
    }

    fn hazard_integral(&self, t: f64) -> f64 {
        self.rate * t.max(0.0)
    }

    fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }

    fn inverse_cdf(&self, v: f64) -> f64 {
        debug_assert!(v > 0.0 && v < 1.0);
        -(-v).ln_1p() / self.rate
    }

    fn quantile_sf(&self, q: f64) -> f64 {
        debug_assert!(q > 0.0 && q < 1.0);
        -q.ln() / self.rate
    }

    fn interval_first_moment(&self, a: f64, b: f64) -> Option<f64> {
        let r = self.rate;
        let lo = a.max(0.0);
        let hi = b.max(0.0);
        if hi <= lo {
            return Some(0.0);
        }
        let part = |u: f64| -(u + 1.0 / r) * (-r * u).exp();
        Some(part(hi) - part(lo))
    }

    fn interval_second_moment(&self, a: f64, b: f64) -> Option<f64> {
        let r = self.rate;
        let lo = a.max(0.0);
        let hi = b.max(0.0);
        if hi <= lo {
            return Some(0.0);
        }
        let part = |u: f64| -(u * u + 2.0 * u / r + 2.0 / (r * r)) * (-r * u).exp();
        Some(part(hi) - part(lo))
    }

    fn mean(&self) -> Option<f64> {
        Some(1.0 / self.rate)
    }

    fn vanishing_hazard(&self) -> bool {
        false
    }

    fn mean_zero(&self) -> bool {
        false
    }

    fn finite_two_plus_moment(&self) -> bool {
        true
    }
}
