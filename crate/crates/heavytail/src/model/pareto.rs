//! Two-sided regularly varying family with a pure power right tail.
//!
//! Mass lives on |x| ≥ 1.  The right tail is F̄(x) = x^{−α}/(1+p) for x ≥ 1
//! and the left tail mirrors it with weight p: F(−x) = p·F̄(x), so p is
//! exactly the balance ratio sup F(−x)/F̄(x).  Equivalently X = Z·R with R a
//! standard Pareto(α) on [1, ∞) and Z = ±1 with P[Z = −1] = p/(1+p).
//!
//! Hazard decomposition: ψ(t) = α log t + log(1+p) for t ≥ 1, so η(t) = α/t
//! there; below t = 1 the hazard is frozen at η(1) = α and the remainder b
//! absorbs the difference.  b moves only on [0, 1] and is constant beyond.

use super::{FamilyInfo, TailModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Pareto {
    alpha: f64,
    p: f64,
    right_share: f64,
    left_share: f64,
}

impl Pareto {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "pareto family needs tail index alpha > 0, got {alpha}"
            )));
        }
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "pareto family needs balance ratio p >= 0, got {p}"
            )));
        }
        Ok(Self {
            alpha,
            p,
            right_share: 1.0 / (1.0 + p),
            left_share: p / (1.0 + p),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// ∫_l^h α u^{−α} du for 1 ≤ l ≤ h: the first-moment kernel of one side.
    fn g1(&self, l: f64, h: f64) -> f64 {
        let a = self.alpha;
        if (a - 1.0).abs() < 1e-12 {
            (h / l).ln()
        } else {
            a * (h.powf(1.0 - a) - l.powf(1.0 - a)) / (1.0 - a)
        }
    }

    /// ∫_l^h α u^{1−α} du for 1 ≤ l ≤ h: the second-moment kernel of one side.
    fn g2(&self, l: f64, h: f64) -> f64 {
        let a = self.alpha;
        if (a - 2.0).abs() < 1e-12 {
            2.0 * (h / l).ln()
        } else {
            a * (h.powf(2.0 - a) - l.powf(2.0 - a)) / (2.0 - a)
        }
    }
}

impl TailModel for Pareto {
    fn family(&self) -> FamilyInfo {
        FamilyInfo {
            name: "pareto",
            params: vec![("alpha", self.alpha), ("p", self.p)],
        }
    }

    fn support(&self) -> (f64, f64) {
        if self.p > 0.0 {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (1.0, f64::INFINITY)
        }
    }

    fn log_right_tail(&self, t: f64) -> f64 {
        if t < -1.0 {
            // 1 − p_share·(−t)^{−α}, close to 1.
            (-self.left_share * (-t).powf(-self.alpha)).ln_1p()
        } else if t < 1.0 {
            self.right_share.ln()
        } else {
            self.right_share.ln() - self.alpha * t.ln()
        }
    }

    fn left_tail(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        self.left_share * x.max(1.0).powf(-self.alpha)
    }

    fn hazard_rate(&self, t: f64) -> f64 {
        self.alpha / t.max(1.0)
    }

    fn hazard_integral(&self, t: f64) -> f64 {
        if t <= 1.0 {
            self.alpha * t
        } else {
            self.alpha * (1.0 + t.ln())
        }
    }

    fn density(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax < 1.0 {
            0.0
        } else {
            let share = if x > 0.0 {
                self.right_share
            } else {
                self.left_share
            };
            share * self.alpha * ax.powf(-self.alpha - 1.0)
        }
    }

    fn inverse_cdf(&self, v: f64) -> f64 {
        debug_assert!(v > 0.0 && v < 1.0);
        if v < self.left_share {
            -(self.left_share / v).powf(1.0 / self.alpha)
        } else {
            // 1 − v is exact here: v ≥ left_share with the right branch
            // mattering most as v → 1, where Sterbenz applies.
            self.quantile_sf((1.0 - v).max(f64::MIN_POSITIVE))
        }
    }

    fn quantile_sf(&self, q: f64) -> f64 {
        debug_assert!(q > 0.0 && q < 1.0);
        if q <= self.right_share {
            (self.right_share / q).powf(1.0 / self.alpha)
        } else {
            -(self.left_share / (1.0 - q)).powf(1.0 / self.alpha)
        }
    }

    fn interval_first_moment(&self, a: f64, b: f64) -> Option<f64> {
        debug_assert!(a <= b);
        let mut m = 0.0;
        // Left lobe: (a, b] ∩ (−∞, −1]; integrate in v = −u.
        if a < -1.0 {
            let l = (-b).max(1.0);
            let h = -a;
            if h > l {
                m -= self.left_share * self.g1(l, h);
            }
        }
        // Right lobe: (a, b] ∩ [1, ∞).
        if b > 1.0 {
            let l = a.max(1.0);
            if b > l {
                m += self.right_share * self.g1(l, b);
            }
        }
        Some(m)
    }

    fn interval_second_moment(&self, a: f64, b: f64) -> Option<f64> {
        debug_assert!(a <= b);
        let mut m = 0.0;
        if a < -1.0 {
            let l = (-b).max(1.0);
            let h = -a;
            if h > l {
                m += self.left_share * self.g2(l, h);
            }
        }
        if b > 1.0 {
            let l = a.max(1.0);
            if b > l {
                m += self.right_share * self.g2(l, b);
            }
        }
        Some(m)
    }

    fn mean(&self) -> Option<f64> {
        if self.alpha > 1.0 {
            Some((self.right_share - self.left_share) * self.alpha / (self.alpha - 1.0))
        } else {
            None
        }
    }

    fn vanishing_hazard(&self) -> bool {
        true
    }

    fn mean_zero(&self) -> bool {
        self.alpha > 1.0 && self.p == 1.0
    }

    fn finite_two_plus_moment(&self) -> bool {
        self.alpha > 2.0
    }

    fn tail_index(&self) -> Option<f64> {
        Some(self.alpha)
    }

    fn balance_ratio(&self) -> Option<f64> {
        Some(self.p)
    }
}
