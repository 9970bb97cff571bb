//! Shape-preserving piecewise-cubic interpolation (Fritsch–Carlson).
//!
//! For nondecreasing data the interpolant is nondecreasing everywhere, which
//! is exactly what a tabulated cumulative hazard needs: overshoot would
//! manufacture a locally negative hazard rate.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Build from strictly increasing `xs` and nondecreasing `ys`.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Domain(
                "monotone interpolation needs at least two (x, y) pairs of equal length".into(),
            ));
        }
        for w in xs.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Domain(format!(
                    "interpolation abscissae must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for w in ys.windows(2) {
            if w[1] < w[0] {
                return Err(Error::Domain(format!(
                    "interpolation ordinates must be nondecreasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }

        let n = xs.len();
        let mut secants = Vec::with_capacity(n - 1);
        for k in 0..n - 1 {
            secants.push((ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]));
        }
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for k in 1..n - 1 {
            let (d0, d1) = (secants[k - 1], secants[k]);
            slopes[k] = if d0 * d1 <= 0.0 {
                0.0
            } else {
                // Weighted harmonic mean keeps the interpolant monotone.
                let h0 = xs[k] - xs[k - 1];
                let h1 = xs[k + 1] - xs[k];
                let w0 = 2.0 * h1 + h0;
                let w1 = h1 + 2.0 * h0;
                (w0 + w1) / (w0 / d0 + w1 / d1)
            };
        }
        // Fritsch–Carlson limiter on each interval.
        for k in 0..n - 1 {
            let d = secants[k];
            if d == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
            } else {
                let a = slopes[k] / d;
                let b = slopes[k + 1] / d;
                let s = a * a + b * b;
                if s > 9.0 {
                    let tau = 3.0 / s.sqrt();
                    slopes[k] = tau * a * d;
                    slopes[k + 1] = tau * b * d;
                }
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    fn segment(&self, x: f64) -> usize {
        match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        }
    }

    /// Evaluate at `x` inside the domain (ends clamped).
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    }

    /// Derivative dy/dx at `x` (ends clamped); ≥ 0 for monotone data.
    pub fn derivative(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.slopes[k], self.slopes[k + 1]);
        let t2 = t * t;
        (y0 * (6.0 * t2 - 6.0 * t) + y1 * (6.0 * t - 6.0 * t2)) / h
            + m0 * (3.0 * t2 - 4.0 * t + 1.0)
            + m1 * (3.0 * t2 - 2.0 * t)
    }

    /// Slope of the last segment, used for extrapolation beyond the table.
    pub fn final_slope(&self) -> f64 {
        *self.slopes.last().unwrap()
    }

    /// Solve `eval(x) = y` by bisection for y within the value range.
    pub fn solve(&self, y: f64) -> Option<f64> {
        let (y0, y1) = (self.ys[0], *self.ys.last().unwrap());
        if y < y0 || y > y1 {
            return None;
        }
        let (mut lo, mut hi) = self.domain();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= 1e-14 * hi.abs().max(1.0) {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}
