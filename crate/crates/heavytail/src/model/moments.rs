//! Truncated moments μ₁(w) = ∫_{|x|≤w} x dF and μ₂(w) = ∫_{|x|≤w} x² dF.
//!
//! These calibrate the truncation analysis: the whole point of working with
//! μ₁, μ₂ instead of full moments is that they stay finite for tail indices
//! where E|X| or E X² diverge.  Families with closed forms use them; the
//! quadrature path exists both as fallback and as an independent cross-check.

use super::TailModel;
use crate::error::{Error, Result};
use crate::numeric::{integrate_with_breaks, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy)]
pub struct TruncatedMoments {
    pub w: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub method: MomentMethod,
}

/// Truncated moments at window `w > 0`, closed form when the family has one.
pub fn truncated_moments(model: &dyn TailModel, w: f64) -> Result<TruncatedMoments> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Domain(format!(
            "truncation window must be positive and finite, got {w}"
        )));
    }
    match (
        model.interval_first_moment(-w, w),
        model.interval_second_moment(-w, w),
    ) {
        (Some(mu1), Some(mu2)) => Ok(TruncatedMoments {
            w,
            mu1,
            mu2,
            method: MomentMethod::ClosedForm,
        }),
        _ => truncated_moments_quadrature(model, w),
    }
}

/// Truncated moments by adaptive quadrature of x·f and x²·f plus any atoms.
pub fn truncated_moments_quadrature(model: &dyn TailModel, w: f64) -> Result<TruncatedMoments> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Domain(format!(
            "truncation window must be positive and finite, got {w}"
        )));
    }
    let (left_edge, _) = model.support();
    let lo = left_edge.max(-w);
    let hi = w;
    let opts = QuadOptions::with_rel_tol(1e-8);

    let (mut mu1, mut mu2) = (0.0, 0.0);
    if hi > lo {
        let breaks = moment_breaks(lo, hi);
        mu1 = integrate_with_breaks(|x| x * model.density(x), &breaks, &opts)?.value;
        mu2 = integrate_with_breaks(|x| x * x * model.density(x), &breaks, &opts)?.value;
    }
    for (pos, mass) in model.atoms() {
        if pos.abs() <= w {
            mu1 += pos * mass;
            mu2 += pos * pos * mass;
        }
    }
    Ok(TruncatedMoments {
        w,
        mu1,
        mu2,
        method: MomentMethod::Quadrature,
    })
}

/// Breakpoints for dF-weighted integrands: include sign changes and unit
/// scales, then fill geometrically so no segment spans many decades.
fn moment_breaks(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = [lo, hi, -1.0, 0.0, 1.0, lo * 0.5, hi * 0.5]
        .iter()
        .copied()
        .filter(|x| *x >= lo && *x <= hi)
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
    let mut out = Vec::with_capacity(pts.len() * 4);
    for pair in pts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        out.push(a);
        // Geometric fill away from zero.
        if a > 0.0 && b / a > 10.0 {
            let mut x = a * 10.0;
            while x < b * 0.999 {
                out.push(x);
                x *= 10.0;
            }
        } else if b < 0.0 && a / b > 10.0 {
            let mut x = b * 10.0; // more negative
            let mut stack = Vec::new();
            while x > a * 0.999 {
                stack.push(x);
                x *= 10.0;
            }
            out.extend(stack.into_iter().rev());
        }
    }
    out.push(*pts.last().unwrap());
    out
}
