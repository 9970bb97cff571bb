//! Bracketed root finding for monotone functions.

use crate::error::{Error, Result};

/// Find the crossing of a nonincreasing function `f` with `target`:
/// the smallest x in `[lo, hi]` with `f(x) ≤ target`, to relative
/// precision `rel_tol`.  Requires `f(lo) > target ≥ f(hi)`.
pub fn bisect_nonincreasing<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    rel_tol: f64,
) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty bracket [{lo}, {hi}]")));
    }
    if f(lo) <= target {
        return Ok(lo);
    }
    if f(hi) > target {
        return Err(Error::NotFound(format!(
            "no crossing of {target:.6e} inside [{lo:.6e}, {hi:.6e}]"
        )));
    }
    for _ in 0..400 {
        if (hi - lo) <= rel_tol * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        // Geometric midpoint when the bracket spans decades.
        let mid = if lo > 0.0 && hi / lo > 16.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
