//! Centered lognormal: a heavy tail with all moments finite.
//!
//! X = e^Y − β with Y ~ N(0, σ²) and β = e^{σ²/2}, so E X = 0 exactly and
//! F(x) = Φ(log(x + β)/σ) on the support (−β, ∞).  The hazard-rate component
//!
//! ```text
//!     η(x) = log x/(σ²x) + 1/(x log x)
//! ```
//!
//! is strictly decreasing for x > 1 but blows up as x ↓ 1, so it is frozen at
//! x = e below that point; the bounded remainder b soaks up the difference.
//! ∫ η has the closed form (log x)²/(2σ²) + log log x, which matches the
//! Gaussian tail asymptotics of ψ up to a convergent remainder.

use super::{FamilyInfo, TailModel};
use crate::error::{Error, Result};
use crate::numeric::normal;

#[derive(Debug, Clone)]
pub struct CenteredLognormal {
    sigma: f64,
    beta: f64,
    t0: f64,
    eta0: f64,
}

impl CenteredLognormal {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "lognormal family needs sigma > 0, got {sigma}"
            )));
        }
        let t0 = std::f64::consts::E;
        let eta0 = (1.0 / (sigma * sigma) + 1.0) / t0;
        Ok(Self {
            sigma,
            beta: (0.5 * sigma * sigma).exp(),
            t0,
            eta0,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Gaussian coordinate z = log(x + β)/σ, −∞ at the support edge.
    fn z(&self, x: f64) -> f64 {
        if x <= -self.beta {
            f64::NEG_INFINITY
        } else {
            (x + self.beta).ln() / self.sigma
        }
    }
}

impl TailModel for CenteredLognormal {
    fn family(&self) -> FamilyInfo {
        FamilyInfo {
            name: "lognormal",
            params: vec![("sigma", self.sigma)],
        }
    }

    fn support(&self) -> (f64, f64) {
        (-self.beta, f64::INFINITY)
    }

    fn log_right_tail(&self, t: f64) -> f64 {
        if t <= -self.beta {
            0.0
        } else {
            normal::log_sf(self.z(t))
        }
    }

    fn left_tail(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        if x >= self.beta {
            0.0
        } else {
            normal::cdf((self.beta - x).ln() / self.sigma)
        }
    }

    fn hazard_rate(&self, t: f64) -> f64 {
        if t <= self.t0 {
            self.eta0
        } else {
            let lt = t.ln();
            lt / (self.sigma * self.sigma * t) + 1.0 / (t * lt)
        }
    }

    fn hazard_integral(&self, t: f64) -> f64 {
        if t <= self.t0 {
            t * self.eta0
        } else {
            let s2 = self.sigma * self.sigma;
            let lt = t.ln();
            // ∫_e^t η = [(log u)²/(2σ²) + log log u] between e and t.
            self.t0 * self.eta0 + (lt * lt - 1.0) / (2.0 * s2) + lt.ln()
        }
    }

    fn density(&self, x: f64) -> f64 {
        if x <= -self.beta {
            return 0.0;
        }
        let z = self.z(x);
        (-0.5 * z * z).exp() / ((x + self.beta) * self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    fn inverse_cdf(&self, v: f64) -> f64 {
        debug_assert!(v > 0.0 && v < 1.0);
        let z = if v <= 0.5 {
            -normal::inverse_sf(v)
        } else {
            normal::inverse_sf(1.0 - v)
        };
        (self.sigma * z).exp() - self.beta
    }

    fn quantile_sf(&self, q: f64) -> f64 {
        debug_assert!(q > 0.0 && q < 1.0);
        (self.sigma * normal::inverse_sf(q)).exp() - self.beta
    }

    fn interval_first_moment(&self, a: f64, b: f64) -> Option<f64> {
        debug_assert!(a <= b);
        let (za, zb) = (self.z(a), self.z(b));
        if za >= zb {
            return Some(0.0);
        }
        let s = self.sigma;
        // E[(e^Y − β)1] with β = e^{σ²/2} factored out.
        Some(self.beta * (normal::prob_between(za - s, zb - s) - normal::prob_between(za, zb)))
    }

    fn interval_second_moment(&self, a: f64, b: f64) -> Option<f64> {
        debug_assert!(a <= b);
        let (za, zb) = (self.z(a), self.z(b));
        if za >= zb {
            return Some(0.0);
        }
        let s = self.sigma;
        let b2 = self.beta * self.beta;
        Some(
            (2.0 * s * s).exp() * normal::prob_between(za - 2.0 * s, zb - 2.0 * s)
                - 2.0 * b2 * normal::prob_between(za - s, zb - s)
                + b2 * normal::prob_between(za, zb),
        )
    }

    fn mean(&self) -> Option<f64> {
        Some(0.0)
    }

    fn vanishing_hazard(&self) -> bool {
        true
    }

    fn mean_zero(&self) -> bool {
        true
    }

    fn finite_two_plus_moment(&self) -> bool {
        true
    }
}
