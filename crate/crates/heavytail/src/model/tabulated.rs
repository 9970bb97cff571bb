//! User-supplied model: a table of (t, ψ(t)) pairs.
//!
//! The cumulative hazard is interpolated monotonically in (log t, ψ) space,
//! extrapolated linearly beyond the last knot (a power tail with the final
//! slope as index) and treated as flat below the first knot, which places an
//! atom of mass 1 − e^{−ψ(t₀)} at t₀ whenever ψ(t₀) > 0.  The hazard-rate
//! component is the interpolant's derivative; since monotonicity of η cannot
//! be certified from a table, tabulated models are not eligible for the
//! condition functionals or ratio bounds that require it.

use super::{FamilyInfo, TailModel};
use crate::error::{Error, Result};
use crate::numeric::MonotoneCubic;

#[derive(Debug, Clone)]
pub struct Tabulated {
    interp: MonotoneCubic,
    t_min: f64,
    t_max: f64,
    psi_min: f64,
    psi_max: f64,
    tail_slope: f64,
    eta_at_tmin: f64,
}

impl Tabulated {
    /// Build from (t, ψ) rows; t must be strictly increasing and positive,
    /// ψ nondecreasing with a strictly increasing final segment.
    pub fn new(rows: &[(f64, f64)]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InvalidSpec(
                "tabulated model needs at least two (t, psi) rows".into(),
            ));
        }
        for r in rows {
            if !(r.0 > 0.0) || !r.0.is_finite() || !r.1.is_finite() || r.1 < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "tabulated row ({}, {}) is outside t > 0, psi >= 0",
                    r.0, r.1
                )));
            }
        }
        let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let interp = MonotoneCubic::new(xs, ys).map_err(|e| {
            Error::InvalidSpec(format!("tabulated hazard must be monotone in t: {e}"))
        })?;
        let n = rows.len();
        let last_secant =
            (rows[n - 1].1 - rows[n - 2].1) / (rows[n - 1].0.ln() - rows[n - 2].0.ln());
        if !(last_secant > 0.0) {
            return Err(Error::InvalidSpec(
                "tabulated hazard is flat at the end; the tail would not decay".into(),
            ));
        }
        let t_min = rows[0].0;
        let eta_at_tmin = (interp.derivative(t_min.ln()) / t_min).max(0.0);
        let fs = interp.final_slope();
        Ok(Self {
            t_min,
            t_max: rows[n - 1].0,
            psi_min: rows[0].1,
            psi_max: rows[n - 1].1,
            tail_slope: if fs > 0.0 { fs } else { last_secant },
            eta_at_tmin,
            interp,
        })
    }

    fn psi(&self, t: f64) -> f64 {
        if t <= self.t_min {
            self.psi_min
        } else if t <= self.t_max {
            self.interp.eval(t.ln())
        } else {
            self.psi_max + self.tail_slope * (t.ln() - self.t_max.ln())
        }
    }
}

impl TailModel for Tabulated {
    fn family(&self) -> FamilyInfo {
        FamilyInfo {
            name: "tabulated",
            params: vec![("t_min", self.t_min), ("t_max", self.t_max)],
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.t_min, f64::INFINITY)
    }

    fn log_right_tail(&self, t: f64) -> f64 {
        if t < self.t_min {
            0.0
        } else {
            -self.psi(t)
        }
    }

    fn left_tail(&self, _x: f64) -> f64 {
        0.0
    }

    fn hazard_rate(&self, t: f64) -> f64 {
        if t <= self.t_min {
            self.eta_at_tmin
        } else if t <= self.t_max {
            (self.interp.derivative(t.ln()) / t).max(0.0)
        } else {
            self.tail_slope / t
        }
    }

    fn hazard_integral(&self, t: f64) -> f64 {
        if t <= self.t_min {
            t * self.eta_at_tmin
        } else {
            // η = dψ/dt above t_min, so the integral telescopes to ψ.
            self.t_min * self.eta_at_tmin + self.psi(t) - self.psi_min
        }
    }

    fn density(&self, x: f64) -> f64 {
        if x <= self.t_min {
            0.0
        } else {
            self.hazard_rate(x) * (-self.psi(x)).exp()
        }
    }

    fn atoms(&self) -> Vec<(f64, f64)> {
        if self.psi_min > 0.0 {
            vec![(self.t_min, -(-self.psi_min).exp_m1())]
        } else {
            Vec::new()
        }
    }

    fn inverse_cdf(&self, v: f64) -> f64 {
        debug_assert!(v > 0.0 && v < 1.0);
        let target = -(-v).ln_1p(); // ψ* with F̄ = 1 − v
        self.quantile_by_hazard(target)
    }

    fn quantile_sf(&self, q: f64) -> f64 {
        debug_assert!(q > 0.0 && q < 1.0);
        self.quantile_by_hazard(-q.ln())
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
        false
    }

    fn mean_zero(&self) -> bool {
        false
    }

    fn finite_two_plus_moment(&self) -> bool {
        false
    }
}

impl Tabulated {
    fn quantile_by_hazard(&self, target: f64) -> f64 {
        if target <= self.psi_min {
            self.t_min
        } else if target <= self.psi_max {
            self.interp
                .solve(target)
                .map(f64::exp)
                .unwrap_or(self.t_max)
        } else {
            (self.t_max.ln() + (target - self.psi_max) / self.tail_slope).exp()
        }
    }
}
