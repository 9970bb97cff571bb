//! Log-Weibull family: F̄(x) = exp(−(log x)^γ) on [1, ∞), γ > 1.
//!
//! Heavier than any stretched-exponential, lighter than any power law; every
//! moment is finite yet the tail is still long, which makes the family a good
//! stress case for slow-variation diagnostics.  η(t) = γ(log t)^{γ−1}/t is
//! nonincreasing only once log t ≥ γ − 1, so it is frozen below t₀ = e^{γ−1}.

use super::{FamilyInfo, TailModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LogWeibull {
    gamma: f64,
    t0: f64,
    eta0: f64,
}

impl LogWeibull {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "log-weibull family needs shape gamma > 1, got {gamma}"
            )));
        }
        let t0 = (gamma - 1.0).exp();
        let eta0 = gamma * (gamma - 1.0).powf(gamma - 1.0) / t0;
        Ok(Self { gamma, t0, eta0 })
    }
}

impl TailModel for LogWeibull {
    fn family(&self) -> FamilyInfo {
        FamilyInfo {
            name: "logweibull",
            params: vec![("gamma_shape", self.gamma)],
        }
    }

    fn support(&self) -> (f64, f64) {
        (1.0, f64::INFINITY)
    }

    fn log_right_tail(&self, t: f64) -> f64 {
        if t <= 1.0 {
            0.0
        } else {
            -t.ln().powf(self.gamma)
        }
    }

    fn left_tail(&self, _x: f64) -> f64 {
        0.0
    }

    fn hazard_rate(&self, t: f64) -> f64 {
        if t <= self.t0 {
            self.eta0
        } else {
            self.gamma * t.ln().powf(self.gamma - 1.0) / t
        }
    }

    fn hazard_integral(&self, t: f64) -> f64 {
        if t <= self.t0 {
            t * self.eta0
        } else {
            self.t0 * self.eta0 + t.ln().powf(self.gamma) - (self.gamma - 1.0).powf(self.gamma)
        }
    }

    fn density(&self, x: f64) -> f64 {
        if x <= 1.0 {
            0.0
        } else {
            let lx = x.ln();
            self.gamma * lx.powf(self.gamma - 1.0) / x * (-lx.powf(self.gamma)).exp()
        }
    }

    fn inverse_cdf(&self, v: f64) -> f64 {
        debug_assert!(v > 0.0 && v < 1.0);
        // (log x)^γ = −log(1 − v), computed through ln_1p for both ends.
        ((-(-v).ln_1p()).powf(1.0 / self.gamma)).exp()
    }

    fn quantile_sf(&self, q: f64) -> f64 {
        debug_assert!(q > 0.0 && q < 1.0);
        ((-q.ln()).powf(1.0 / self.gamma)).exp()
    }

    fn interval_first_moment(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    fn interval_second_moment(&self, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    fn mean(&self) -> Option<f64> {
        None
    }

    fn vanishing_hazard(&self) -> bool {
        true
    }

    fn mean_zero(&self) -> bool {
        false
    }

    fn finite_two_plus_moment(&self) -> bool {
        true
    }
}
