//! Condition functionals governing when P[Sₙ > s] ≈ n·F̄(s) uniformly.
//!
//! The uniform single-big-jump regime is controlled by a family of quantities
//! that must tend to zero as n grows, each a concrete function of the model's
//! hazard data at a point (n, s):
//!
//!   * a = ψ(s) − log n, the rarity exponent (n·F̄(s) = e^{−a});
//!   * the truncated-moment functional
//!     n·[(|μ₁(w)| + a·μ₂(w)/s)/(s ∧ 1/η(λs)) + F(−w)], minimized over the
//!     admissible truncation levels w ≥ s/a;
//!   * the hazard-scale ratio [(1 ∨ sη(λs))·(1 ∨ log sη(λs))]/a;
//!   * the tail-decay quantity n·(1 ∨ sη(λs))·F̄(s/a);
//!   * for centered finite-variance models, n·ψ(s)·η(λs)/s;
//!   * for regularly varying tails, the case functionals keyed on the index α.
//!
//! A limit can never be certified from finitely many evaluations, so every
//! report carries grid values plus a [`Verdict`] describing the observed
//! trend; the verdict is a diagnosis, not a proof.

use crate::error::{Error, Result};
use crate::model::{
    cumulative_hazard, threshold_scale, truncated_moments, TailModel,
};

/// Shared knobs for the condition functionals.
#[derive(Debug, Clone)]
pub struct ConditionConfig {
    /// Hazard evaluation point multiplier λ ∈ (0,1) in η(λs).
    pub lambda: f64,
    /// Rule for choosing the truncation level w in the moment functional.
    pub w_strategy: WStrategy,
    /// Reporting tolerance: a trend counts as "decreasing to zero" only when
    /// the final value sits at or below this level.
    pub delta_report: f64,
}

impl Default for ConditionConfig {
    fn default() -> Self {
        ConditionConfig {
            lambda: 0.5,
            w_strategy: WStrategy::default(),
            delta_report: 0.5,
        }
    }
}

impl ConditionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "lambda must lie in (0,1), got {}",
                self.lambda
            )));
        }
        if !(self.delta_report > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "delta_report must be positive, got {}",
                self.delta_report
            )));
        }
        match self.w_strategy {
            WStrategy::GridSearch { points } if points < 2 => Err(Error::InvalidSpec(
                "w grid needs at least 2 points".into(),
            )),
            WStrategy::FixedMultiple { factor } if !(factor >= 1.0) => Err(Error::InvalidSpec(
                format!("w multiple must be ≥ 1 (w ≥ s/a is required), got {factor}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Truncation-level rule for the moment functional.  The analysis only needs
/// *some* w ≥ s/a; the functional is smooth in w, so a modest grid search
/// finds a near-optimal level.
#[derive(Debug, Clone, Copy)]
pub enum WStrategy {
    /// Minimize over log-spaced points on [s/a, s].
    GridSearch { points: usize },
    /// Use w = factor·(s/a), clamped to [s/a, s].
    FixedMultiple { factor: f64 },
}

impl Default for WStrategy {
    fn default() -> Self {
        WStrategy::GridSearch { points: 40 }
    }
}

/// Observed trend of a grid sequence.  `DecreasingToZero` means the final
/// value is the minimum and lies at or below `delta_report`; `Increasing`
/// means the sequence ends above where it started; anything else is a
/// `Plateau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    DecreasingToZero,
    Plateau,
    Increasing,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::DecreasingToZero => "decreasing-to-zero",
            Verdict::Plateau => "plateau",
            Verdict::Increasing => "increasing",
        })
    }
}

/// Trend classification, recomputable from the values alone.
pub fn verdict_for(values: &[f64], delta_report: f64) -> Verdict {
    let (first, last) = match (values.first(), values.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Verdict::Plateau,
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if last <= min && last <= delta_report {
        Verdict::DecreasingToZero
    } else if last > first {
        Verdict::Increasing
    } else {
        Verdict::Plateau
    }
}

/// One row of a condition report: the sup of a functional over the s-grid at
/// a fixed index (sample size n, or abscissa t for t-indexed diagnostics).
#[derive(Debug, Clone)]
pub struct ConditionRow {
    pub index: f64,
    pub sup_value: f64,
    pub argmax_s: f64,
    pub best_w: Option<f64>,
}

/// Grid evaluation of one functional: per-index rows plus the overall trend.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub functional: &'static str,
    pub rows: Vec<ConditionRow>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

/// a = ψ(s) − log n, so that n·F̄(s) = e^{−a}.  The functionals below are
/// meaningful only where a > 0 (n·F̄(s) < 1); callers treat a ≤ 0 as a regime
/// boundary.
pub fn rarity_exponent(model: &dyn TailModel, n: u64, s: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("sample size must be ≥ 1".into()));
    }
    Ok(cumulative_hazard(model, s)? - (n as f64).ln())
}

fn require_positive_rarity(model: &dyn TailModel, n: u64, s: f64) -> Result<f64> {
    let a = rarity_exponent(model, n, s)?;
    if a <= 0.0 {
        return Err(Error::Regime(format!(
            "rarity exponent a = {a:.6} ≤ 0 at n = {n}, s = {s} (n·F̄(s) ≥ 1)"
        )));
    }
    Ok(a)
}

/// Truncated-moment functional
/// n·[(|μ₁(w)| + a·μ₂(w)/s)/(s ∧ 1/η(λs)) + F(−w)], minimized over the
/// w-strategy's candidates in [s/a, s].  Returns (value, minimizing w).
pub fn moment_condition(
    model: &dyn TailModel,
    cfg: &ConditionConfig,
    n: u64,
    s: f64,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let a = require_positive_rarity(model, n, s)?;
    let w_lo = s / a;
    if w_lo > s {
        return Err(Error::Domain(format!(
            "no admissible truncation level: s/a = {w_lo:.4} exceeds s = {s} (a = {a:.4} < 1)"
        )));
    }
    let scale = threshold_scale(model, s, cfg.lambda);
    let nf = n as f64;

    let eval = |w: f64| -> Result<f64> {
        let m = truncated_moments(model, w)?;
        Ok(nf * ((m.mu1.abs() + a * m.mu2 / s) / scale + model.left_tail(w)))
    };

    let candidates: Vec<f64> = match cfg.w_strategy {
        WStrategy::FixedMultiple { factor } => vec![(factor * w_lo).min(s)],
        WStrategy::GridSearch { points } => {
            if w_lo == s {
                vec![s]
            } else {
                let lr = (s / w_lo).ln();
                (0..points)
                    .map(|i| w_lo * (lr * i as f64 / (points - 1) as f64).exp())
                    .collect()
            }
        }
    };

    let mut best = (f64::INFINITY, w_lo);
    for w in candidates {
        let v = eval(w)?;
        if v < best.0 {
            best = (v, w);
        }
    }
    Ok(best)
}

/// Hazard-scale ratio [(1 ∨ sη(λs))·(1 ∨ log sη(λs))]/a.
///
/// The numerator is the product shape used to pick the intermediate scale z
/// (see `bounds::intermediate_scale` with x = a, y = 1 ∨ sη(λs)); the
/// condition asks that a dominate it.
pub fn hazard_scale_condition(
    model: &dyn TailModel,
    cfg: &ConditionConfig,
    n: u64,
    s: f64,
) -> Result<f64> {
    cfg.validate()?;
    let a = require_positive_rarity(model, n, s)?;
    let se = s * model.hazard_rate(cfg.lambda * s);
    Ok(se.max(1.0) * se.ln().max(1.0) / a)
}

/// Tail-decay quantity n·(1 ∨ sη(λs))·F̄(s/a).
pub fn tail_decay_condition(
    model: &dyn TailModel,
    cfg: &ConditionConfig,
    n: u64,
    s: f64,
) -> Result<f64> {
    cfg.validate()?;
    let a = require_positive_rarity(model, n, s)?;
    let se = s * model.hazard_rate(cfg.lambda * s);
    Ok(n as f64 * se.max(1.0) * model.right_tail(s / a))
}

/// Sup over the admissible part of `s_grid` of one (n, s)-functional, with a
/// per-n row.  Points where the functional is out of regime are skipped and
/// reported in `warnings`.
fn sup_rows<F>(
    functional: &'static str,
    n_grid: &[u64],
    s_grid: &[f64],
    delta_report: f64,
    mut eval: F,
) -> Result<ConditionReport>
where
    F: FnMut(u64, f64) -> Result<(f64, Option<f64>)>,
{
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut warnings = Vec::new();
    for &n in n_grid {
        let mut sup: Option<(f64, f64, Option<f64>)> = None;
        for &s in s_grid {
            match eval(n, s) {
                Ok((v, w)) => {
                    if sup.map_or(true, |(best, _, _)| v > best) {
                        sup = Some((v, s, w));
                    }
                }
                Err(Error::Regime(msg)) | Err(Error::Domain(msg)) => {
                    warnings.push(format!("{functional}: n={n}, s={s}: {msg}"));
                }
                Err(e) => return Err(e),
            }
        }
        if let Some((v, s, w)) = sup {
            rows.push(ConditionRow {
                index: n as f64,
                sup_value: v,
                argmax_s: s,
                best_w: w,
            });
        } else {
            warnings.push(format!(
                "{functional}: no admissible s-grid point at n={n}; row dropped"
            ));
        }
    }
    let values: Vec<f64> = rows.iter().map(|r| r.sup_value).collect();
    Ok(ConditionReport {
        functional,
        rows,
        verdict: verdict_for(&values, delta_report),
        warnings,
    })
}

/// Evaluate the three uniform-regime functionals over an (n, s) grid.
pub fn condition_sweep(
    model: &dyn TailModel,
    cfg: &ConditionConfig,
    n_grid: &[u64],
    s_grid: &[f64],
) -> Result<Vec<ConditionReport>> {
    cfg.validate()?;
    if s_grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidSpec("s grid must be strictly increasing".into()));
    }
    if n_grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidSpec("n grid must be strictly increasing".into()));
    }
    let moment = sup_rows("moment", n_grid, s_grid, cfg.delta_report, |n, s| {
        moment_condition(model, cfg, n, s).map(|(v, w)| (v, Some(w)))
    })?;
    let hazard_scale = sup_rows("hazard_scale", n_grid, s_grid, cfg.delta_report, |n, s| {
        hazard_scale_condition(model, cfg, n, s).map(|v| (v, None))
    })?;
    let tail_decay = sup_rows("tail_decay", n_grid, s_grid, cfg.delta_report, |n, s| {
        tail_decay_condition(model, cfg, n, s).map(|v| (v, None))
    })?;
    Ok(vec![moment, hazard_scale, tail_decay])
}

/// One abscissa of the slow-variation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SlowVariationRow {
    pub t: f64,
    /// tη(t)·log ψ(t)/ψ(t) — vanishes when exp(log²ψ) is slowly varying.
    pub log_psi_ratio: f64,
    /// tη(t)·F̄(t/ψ(t)) — the tail-decay diagnostic at the shrunk abscissa.
    pub shrunk_tail: f64,
    /// tη(t)/ψ(t) — hypothesis feeding the shrunk-tail limit.
    pub hazard_psi_ratio: f64,
    /// η(t/ψ(t))/η(t) — must stay bounded away from 1 from above.
    pub hazard_shrink_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SlowVariationReport {
    pub rows: Vec<SlowVariationRow>,
    /// (t, reason) for grid points that could not be evaluated.
    pub skipped: Vec<(f64, String)>,
    pub verdict_log_psi: Verdict,
    pub verdict_shrunk_tail: Verdict,
}

/// Slow-variation diagnostics along a t-grid: the two sufficient-condition
/// functionals and their hypothesis ratios.  Points with ψ(t) ≤ 1 are skipped
/// (log ψ ≤ 0 makes the first functional meaningless there).
pub fn slow_variation_diagnostics(
    model: &dyn TailModel,
    t_grid: &[f64],
    delta_report: f64,
) -> Result<SlowVariationReport> {
    if t_grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidSpec("t grid must be strictly increasing".into()));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &t in t_grid {
        let psi = match cumulative_hazard(model, t) {
            Ok(p) => p,
            Err(e) => {
                skipped.push((t, e.to_string()));
                continue;
            }
        };
        if psi <= 1.0 {
            skipped.push((t, format!("ψ(t) = {psi:.4} ≤ 1, log ψ not positive")));
            continue;
        }
        let eta = model.hazard_rate(t);
        let te = t * eta;
        rows.push(SlowVariationRow {
            t,
            log_psi_ratio: te * psi.ln() / psi,
            shrunk_tail: te * model.right_tail(t / psi),
            hazard_psi_ratio: te / psi,
            hazard_shrink_ratio: if eta > 0.0 {
                model.hazard_rate(t / psi) / eta
            } else {
                f64::NAN
            },
        });
    }
    let a_vals: Vec<f64> = rows.iter().map(|r| r.log_psi_ratio).collect();
    let b_vals: Vec<f64> = rows.iter().map(|r| r.shrunk_tail).collect();
    Ok(SlowVariationReport {
        verdict_log_psi: verdict_for(&a_vals, delta_report),
        verdict_shrunk_tail: verdict_for(&b_vals, delta_report),
        rows,
        skipped,
    })
}

/// Centered finite-variance functional n·ψ(s)·η(λs)/s.
///
/// Only meaningful for models that are exactly centered with a finite 2+δ
/// moment; anything else is a precondition violation, not a number.
pub fn finite_variance_condition(
    model: &dyn TailModel,
    n: u64,
    s: f64,
    lambda: f64,
) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "lambda must lie in (0,1), got {lambda}"
        )));
    }
    if !model.mean_zero() {
        return Err(Error::Precondition(format!(
            "{} is not centered; the finite-variance functional requires mean zero",
            model.family()
        )));
    }
    if !model.finite_two_plus_moment() {
        return Err(Error::Precondition(format!(
            "{} lacks a finite 2+δ moment",
            model.family()
        )));
    }
    let psi = cumulative_hazard(model, s)?;
    Ok(n as f64 * psi * model.hazard_rate(lambda * s) / s)
}

/// Companion hypothesis tη(t)·log(tη(t))/ψ(t); its vanishing is equivalent to
/// the hazard-scale condition being satisfiable for some threshold sequence.
pub fn hazard_growth_hypothesis(model: &dyn TailModel, t: f64) -> Result<f64> {
    let psi = cumulative_hazard(model, t)?;
    let te = t * model.hazard_rate(t);
    if te == 0.0 {
        return Ok(0.0);
    }
    Ok(te * te.ln() / psi)
}

/// Which case functional applies for a regularly varying tail of index α.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RvCase {
    /// α < 1: the threshold gate n·F̄(tₙ) → 0 is itself sufficient.
    BelowOne,
    /// 1 ≤ α < 2: additionally (n/tₙ)·μ₁(tₙ) → 0.
    OneToTwo,
    /// α ≥ 2: additionally n·E[X]/tₙ → 0 and n·μ₂(tₙ)·log tₙ/tₙ² → 0.
    TwoPlus,
}

impl std::fmt::Display for RvCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RvCase::BelowOne => "alpha<1",
            RvCase::OneToTwo => "1<=alpha<2",
            RvCase::TwoPlus => "alpha>=2",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CaseCheckReport {
    pub alpha: f64,
    pub case: RvCase,
    /// (n, n·F̄(tₙ)) — must tend to zero for the whole theorem to apply.
    pub gate: Vec<(f64, f64)>,
    pub gate_verdict: Verdict,
    /// Case-specific functionals: (name, per-n values, verdict).
    pub functionals: Vec<(String, Vec<(f64, f64)>, Verdict)>,
}

/// Case dispatch for regularly varying tails: evaluates the case functional
/// for the model's index α along n_grid with thresholds tₙ = t_of_n(n).
///
/// Boundary indices follow the printed intervals: α = 1 belongs to the middle
/// case, α = 2 to the top case.
pub fn regular_variation_case_check(
    model: &dyn TailModel,
    n_grid: &[u64],
    t_of_n: &dyn Fn(u64) -> f64,
    delta_report: f64,
) -> Result<CaseCheckReport> {
    let alpha = model.tail_index().ok_or_else(|| {
        Error::Precondition(format!(
            "{} does not certify a regular-variation index",
            model.family()
        ))
    })?;
    if model.balance_ratio().is_none() {
        return Err(Error::Precondition(format!(
            "{} does not certify a finite left/right tail balance",
            model.family()
        )));
    }
    if n_grid.len() < 2 || n_grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidSpec(
            "n grid must be strictly increasing with ≥ 2 points".into(),
        ));
    }

    let gate: Vec<(f64, f64)> = n_grid
        .iter()
        .map(|&n| {
            let t = t_of_n(n);
            (n as f64, n as f64 * model.right_tail(t))
        })
        .collect();
    let gate_values: Vec<f64> = gate.iter().map(|&(_, v)| v).collect();
    let gate_verdict = verdict_for(&gate_values, delta_report);
    if gate_verdict == Verdict::Increasing {
        return Err(Error::Precondition(format!(
            "n·F̄(tₙ) increases along the grid (last {:.4e}); threshold sequence inadmissible",
            gate_values.last().unwrap()
        )));
    }

    let case = if alpha < 1.0 {
        RvCase::BelowOne
    } else if alpha < 2.0 {
        RvCase::OneToTwo
    } else {
        RvCase::TwoPlus
    };

    let mut functionals = Vec::new();
    match case {
        RvCase::BelowOne => {
            functionals.push(("sample_tail".to_string(), gate.clone(), gate_verdict));
        }
        RvCase::OneToTwo => {
            let vals: Vec<(f64, f64)> = n_grid
                .iter()
                .map(|&n| {
                    let t = t_of_n(n);
                    let mu1 = truncated_moments(model, t).map(|m| m.mu1)?;
                    Ok((n as f64, (n as f64 / t * mu1).abs()))
                })
                .collect::<Result<_>>()?;
            let v: Vec<f64> = vals.iter().map(|&(_, x)| x).collect();
            functionals.push((
                "first_moment_drift".to_string(),
                vals,
                verdict_for(&v, delta_report),
            ));
        }
        RvCase::TwoPlus => {
            let mean = model.mean().ok_or_else(|| {
                Error::Precondition(format!(
                    "{} has no certified mean but α ≥ 2 requires n·E[X]/tₙ",
                    model.family()
                ))
            })?;
            let drift: Vec<(f64, f64)> = n_grid
                .iter()
                .map(|&n| (n as f64, (n as f64 * mean / t_of_n(n)).abs()))
                .collect();
            let dv: Vec<f64> = drift.iter().map(|&(_, x)| x).collect();
            functionals.push((
                "mean_drift".to_string(),
                drift,
                verdict_for(&dv, delta_report),
            ));
            let second: Vec<(f64, f64)> = n_grid
                .iter()
                .map(|&n| {
                    let t = t_of_n(n);
                    let mu2 = truncated_moments(model, t).map(|m| m.mu2)?;
                    Ok((n as f64, n as f64 * mu2 * t.ln() / (t * t)))
                })
                .collect::<Result<_>>()?;
            let sv: Vec<f64> = second.iter().map(|&(_, x)| x).collect();
            functionals.push((
                "second_moment_scale".to_string(),
                second,
                verdict_for(&sv, delta_report),
            ));
        }
    }

    Ok(CaseCheckReport {
        alpha,
        case,
        gate,
        gate_verdict,
        functionals,
    })
}

/// Named threshold functionals f(n, t) that are eventually decreasing in t.
#[derive(Debug, Clone, Copy)]
pub enum ThresholdFunctional {
    /// n·F̄(t).
    SampleTail,
    /// n·(log t)³/t², the workhorse rule for lognormal-type hazards.
    LogCube,
    /// n·ψ(t)·η(λt)/t.
    FiniteVariance { lambda: f64 },
}

impl ThresholdFunctional {
    fn eval(&self, model: &dyn TailModel, n: u64, t: f64) -> f64 {
        let nf = n as f64;
        match *self {
            ThresholdFunctional::SampleTail => nf * model.right_tail(t),
            ThresholdFunctional::LogCube => {
                if t <= 1.0 {
                    0.0
                } else {
                    nf * t.ln().powi(3) / (t * t)
                }
            }
            ThresholdFunctional::FiniteVariance { lambda } => {
                let psi = (-model.log_right_tail(t)).max(0.0);
                nf * psi * model.hazard_rate(lambda * t) / t
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ThresholdFunctional::SampleTail => "sample_tail",
            ThresholdFunctional::LogCube => "log_cube",
            ThresholdFunctional::FiniteVariance { .. } => "finite_variance",
        }
    }
}

/// Smallest t in `t_range` with f(n, t) ≤ delta, to 10⁻⁶ relative precision.
///
/// The functional may rise before it decays (the log-cube rule does); the
/// solver first scans geometrically for the maximum, checks the tail of the
/// scan is nonincreasing, then bisects on the decreasing branch.  If the
/// functional never exceeds delta on the range, the range start is returned.
pub fn solve_threshold(
    model: &dyn TailModel,
    functional: ThresholdFunctional,
    n: u64,
    delta: f64,
    t_range: (f64, f64),
) -> Result<f64> {
    let (t_min, t_max) = t_range;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::Domain(format!(
            "bad threshold range [{t_min}, {t_max}]"
        )));
    }
    // Geometric scan to locate the functional's maximum.
    const SCAN: usize = 240;
    let lr = (t_max / t_min).ln();
    let ts: Vec<f64> = (0..=SCAN)
        .map(|i| t_min * (lr * i as f64 / SCAN as f64).exp())
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| functional.eval(model, n, t)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "threshold functional {} not finite on the scan grid",
            functional.name()
        )));
    }
    let (imax, &vmax) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    if vmax <= delta {
        return Ok(t_min);
    }
    // The branch past the maximum must be nonincreasing for bisection to
    // make sense; tolerate only noise-level violations.
    for w in vals[imax..].windows(2) {
        if w[1] > w[0] * (1.0 + 1e-9) + 1e-300 {
            return Err(Error::Precondition(format!(
                "threshold functional {} is not decreasing beyond its maximum",
                functional.name()
            )));
        }
    }
    let lo = ts[imax];
    if functional.eval(model, n, t_max) > delta {
        return Err(Error::NotFound(format!(
            "threshold functional {} stays above {delta:.4e} on [{t_min:.4e}, {t_max:.4e}] \
             (value {:.4e} at range end)",
            functional.name(),
            vals[SCAN]
        )));
    }
    crate::numeric::solve::bisect_nonincreasing(
        |t| functional.eval(model, n, t),
        lo,
        t_max,
        delta,
        1e-6,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CenteredLognormal, Exponential, Pareto};

    const HALF_PARETO: f64 = 0.5;

    fn pareto(alpha: f64) -> Pareto {
        Pareto::new(alpha, 0.0).unwrap()
    }

    #[test]
    fn rarity_exponent_matches_closed_form() {
        let m = pareto(HALF_PARETO);
        let a = rarity_exponent(&m, 10, 1e4).unwrap();
        assert!((a - 2.302585092994046).abs() < 1e-12, "{a}");
        // n = 1 reduces to ψ(s).
        let a1 = rarity_exponent(&m, 1, 1e4).unwrap();
        assert!((a1 - 4.605170185988091).abs() < 1e-12);
        // n = e^{ψ(s)} sits exactly on the regime boundary.
        let boundary = rarity_exponent(&m, 100, 1e4).unwrap();
        assert!(boundary.abs() < 1e-12, "{boundary}");
        assert!(matches!(
            moment_condition(&m, &ConditionConfig::default(), 100, 1e4),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn moment_condition_matches_hand_evaluation() {
        // α = 1/2: μ₁(w) = √w − 1, μ₂(w) = (w^{3/2} − 1)/3, sη(λs) = α/λ = 1,
        // so the scale is s and the functional is increasing in w; the grid
        // minimum sits at w = s/a.
        let m = pareto(HALF_PARETO);
        let cfg = ConditionConfig::default();
        let (value, best_w) = moment_condition(&m, &cfg, 10, 1e4).unwrap();
        let a = 2.302585092994045_f64;
        let w = 1e4 / a;
        assert!((best_w - w).abs() < 1e-9 * w, "best_w = {best_w}, want {w}");
        let mu1 = w.sqrt() - 1.0;
        let mu2 = (w.powf(1.5) - 1.0) / 3.0;
        let expect = 10.0 * (mu1 + a * mu2 / 1e4) / 1e4;
        assert!((value - expect).abs() < 1e-9 * expect, "{value} vs {expect}");
        assert!((value - 0.086868).abs() < 1e-4, "frozen value drifted: {value}");
    }

    #[test]
    fn moment_condition_decays_along_s_for_small_alpha() {
        let m = pareto(HALF_PARETO);
        let cfg = ConditionConfig::default();
        let vals: Vec<f64> = [1e4, 1e5, 1e6, 1e7, 1e8]
            .iter()
            .map(|&s| moment_condition(&m, &cfg, 10, s).unwrap().0)
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0], "not decreasing: {vals:?}");
        }
    }

    #[test]
    fn hazard_scale_condition_closed_forms() {
        let cfg = ConditionConfig::default();
        // sη(λs) = α/λ = 1: both ∨-clauses saturate, value = 1/a.
        let m = pareto(HALF_PARETO);
        let v = hazard_scale_condition(&m, &cfg, 10, 1e4).unwrap();
        let a = 2.302585092994045_f64;
        assert!((v - 1.0 / a).abs() < 1e-12, "{v}");
        // sη(λs) = 0.6 ≤ 1 still gives exactly 1/a.
        let m2 = pareto(0.3);
        let s = 1e6;
        let a2 = rarity_exponent(&m2, 3, s).unwrap();
        let v2 = hazard_scale_condition(&m2, &cfg, 3, s).unwrap();
        assert!((v2 - 1.0 / a2).abs() < 1e-12);
        // sη(λs) = α/λ = 6 > 1: numerator 6·log 6.
        let m3 = pareto(3.0);
        let s = 1e3;
        let a3 = rarity_exponent(&m3, 2, s).unwrap();
        let v3 = hazard_scale_condition(&m3, &cfg, 2, s).unwrap();
        let expect = 6.0 * 6.0_f64.ln() / a3;
        assert!((v3 - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn tail_decay_condition_matches_closed_form() {
        let m = pareto(HALF_PARETO);
        let cfg = ConditionConfig::default();
        let v = tail_decay_condition(&m, &cfg, 10, 1e4).unwrap();
        // 10·1·F̄(s/a) with s/a = 4342.94: 10/√4342.94 = 0.15174.
        assert!((v - 0.15174).abs() < 1e-4, "{v}");
    }

    #[test]
    fn pareto_scale_consistency_between_s_and_2s() {
        // sη(λs) is constant in s for Pareto, so doubling s changes the
        // functionals only through a and s/a — closed forms check exactly.
        let m = pareto(HALF_PARETO);
        let cfg = ConditionConfig::default();
        let (n, s) = (10_u64, 1e4_f64);
        let a1 = rarity_exponent(&m, n, s).unwrap();
        let a2 = rarity_exponent(&m, n, 2.0 * s).unwrap();
        assert!((a2 - (a1 + HALF_PARETO * 2.0_f64.ln())).abs() < 1e-12);

        let h1 = hazard_scale_condition(&m, &cfg, n, s).unwrap();
        let h2 = hazard_scale_condition(&m, &cfg, n, 2.0 * s).unwrap();
        assert!((h2 / h1 - a1 / a2).abs() < 1e-12);

        let t1 = tail_decay_condition(&m, &cfg, n, s).unwrap();
        let t2 = tail_decay_condition(&m, &cfg, n, 2.0 * s).unwrap();
        let expect = ((2.0 * s / a2) / (s / a1)).powf(-HALF_PARETO);
        assert!((t2 / t1 - expect).abs() < 1e-12);
    }

    #[test]
    fn truncation_controls_the_chebyshev_trio() {
        // With w the minimizing truncation level, the three quantities behind
        // the truncation-plus-Chebyshev argument — n·P[|X|>w], n·|μ₁(w)|/scale,
        // n·μ₂(w)/scale² — are all ≤ 3·max(moment value, tail-decay value).
        // (The moment value alone does not dominate n·P[|X|>w]: for α = 1/2
        // the ratio grows like 3a/4, so the tail-decay term is essential.)
        let cfg = ConditionConfig::default();
        for model in [Pareto::new(0.5, 0.0).unwrap(), Pareto::new(0.8, 0.6).unwrap()] {
            for &s in &[1e4, 1e6, 1e8] {
                let n = 10;
                let a = rarity_exponent(&model, n, s).unwrap();
                assert!(a > 1.0, "test point out of regime");
                let (v23, w) = moment_condition(&model, &cfg, n, s).unwrap();
                let v25 = tail_decay_condition(&model, &cfg, n, s).unwrap();
                let cap = 3.0 * v23.max(v25);
                let scale = threshold_scale(&model, s, cfg.lambda);
                let m = truncated_moments(&model, w).unwrap();
                let nf = n as f64;
                let trio = [
                    nf * (model.right_tail(w) + model.left_tail(w)),
                    nf * m.mu1.abs() / scale,
                    nf * m.mu2 / (scale * scale),
                ];
                for (i, q) in trio.iter().enumerate() {
                    assert!(
                        *q <= cap * (1.0 + 1e-12),
                        "{} s={s}: quantity {i} = {q} exceeds {cap}",
                        model.family()
                    );
                }
            }
        }
    }

    #[test]
    fn condition_sweep_reports_per_n_sup_with_verdicts() {
        let m = pareto(HALF_PARETO);
        let cfg = ConditionConfig::default();
        let n_grid = [4, 16, 64];
        let s_grid: Vec<f64> = (0..12).map(|i| 1e6 * 2.0_f64.powi(i)).collect();
        let reports = condition_sweep(&m, &cfg, &n_grid, &s_grid).unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            assert_eq!(r.rows.len(), 3, "{}: {:?}", r.functional, r.warnings);
            // The sup over s ≥ tₙ of a decreasing functional sits at the
            // grid start.
            for row in &r.rows {
                assert_eq!(row.argmax_s, s_grid[0], "{}", r.functional);
                assert!(row.sup_value >= 0.0);
            }
        }
        // All three functionals grow with n at fixed s-grid: verdicts must
        // not claim decay.
        for r in &reports {
            assert_ne!(r.verdict, Verdict::DecreasingToZero, "{}", r.functional);
        }
    }

    #[test]
    fn slow_variation_on_lognormal_matches_asymptotics() {
        // σ = 1: tη(t) ≈ log t, ψ(t) ≈ (log t)²/2, so the first functional is
        // ≈ 2·log((log t)²/2)/log t — about 0.78 at t = 10⁴ and 0.43 at 10¹².
        let m = CenteredLognormal::new(1.0).unwrap();
        let grid: Vec<f64> = (4..=12).map(|k| 10f64.powi(k)).collect();
        let rep = slow_variation_diagnostics(&m, &grid, 0.5).unwrap();
        assert!(rep.skipped.is_empty());
        assert_eq!(rep.rows.len(), 9);
        let first = rep.rows.first().unwrap();
        let last = rep.rows.last().unwrap();
        assert!((first.log_psi_ratio - 0.781).abs() < 5e-3, "{}", first.log_psi_ratio);
        assert!((last.log_psi_ratio - 0.4269).abs() < 5e-3, "{}", last.log_psi_ratio);
        assert!(last.log_psi_ratio / first.log_psi_ratio < 0.6);
        for w in rep.rows.windows(2) {
            assert!(w[1].log_psi_ratio < w[0].log_psi_ratio);
            assert!(w[1].shrunk_tail < w[0].shrunk_tail);
        }
        // Hypothesis ratios: tη/ψ ≈ 2/log t small and decreasing; the hazard
        // shrink ratio stays above 1.
        for r in &rep.rows {
            assert!(r.hazard_psi_ratio < 0.5);
            assert!(r.hazard_shrink_ratio > 1.0);
        }
    }

    #[test]
    fn slow_variation_skips_low_psi_points_and_saturates_inside_support() {
        // α = 1/2: ψ ≤ 1 for t ≤ e², so t = 2 must be skipped with a warning.
        let m = pareto(HALF_PARETO);
        let rep = slow_variation_diagnostics(&m, &[2.0, 100.0, 1e4], 0.5).unwrap();
        assert_eq!(rep.skipped.len(), 1);
        assert_eq!(rep.skipped[0].0, 2.0);
        assert!(rep.skipped[0].1.contains("≤ 1"));
        assert_eq!(rep.rows.len(), 2);
        // α = 1: closed form log(log t)/log t at t = 10⁸.
        let m1 = pareto(1.0);
        let rep1 = slow_variation_diagnostics(&m1, &[1e8], 0.5).unwrap();
        let expect = (18.420680743952367_f64).ln() / 18.420680743952367;
        assert!((rep1.rows[0].log_psi_ratio - expect).abs() < 1e-12);
        // α = 4 at t = 1.5: t/ψ(t) < 1 is inside the support floor, so the
        // shrunk-tail functional saturates at tη(t) = α.
        let m4 = pareto(4.0);
        let rep4 = slow_variation_diagnostics(&m4, &[1.5], 0.5).unwrap();
        assert!((rep4.rows[0].shrunk_tail - 4.0).abs() < 1e-12);
    }

    #[test]
    fn finite_variance_condition_value_and_preconditions() {
        let m = CenteredLognormal::new(1.0).unwrap();
        let v = finite_variance_condition(&m, 1000, 1e3, 0.5).unwrap();
        // 10³·ψ(10³)·η(500)/10³ = ψ(10³)·η(500) = 26.7417·0.0127510.
        assert!((v - 0.34098).abs() < 2e-4, "{v}");
        // Uncentered model refuses.
        let p = pareto(HALF_PARETO);
        assert!(matches!(
            finite_variance_condition(&p, 10, 1e4, 0.5),
            Err(Error::Precondition(_))
        ));
        // Decay in s at fixed n.
        let seq: Vec<f64> = [1e3, 1e6, 1e9, 1e12]
            .iter()
            .map(|&s| finite_variance_condition(&m, 1, s, 0.5).unwrap())
            .collect();
        for w in seq.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn hazard_growth_hypothesis_closed_form_on_pareto() {
        // tη = α constant: value = α·log α/(α log t) = log α/log t.
        let m = pareto(3.0);
        let v = hazard_growth_hypothesis(&m, 1e6).unwrap();
        let expect = 3.0_f64.ln() / (1e6_f64).ln() / 1.0;
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn case_check_dispatches_on_the_index() {
        // α = 1/2 with tₙ the 1/n² upper quantile: gate n·F̄(tₙ) = 1/n.
        let m = pareto(HALF_PARETO);
        let rep = regular_variation_case_check(
            &m,
            &[2, 4, 8, 16],
            &|n| m.quantile_sf(1.0 / (n as f64 * n as f64)),
            0.5,
        )
        .unwrap();
        assert_eq!(rep.case, RvCase::BelowOne);
        for &(n, v) in &rep.gate {
            assert!((v - 1.0 / n).abs() < 1e-9, "n={n}: {v}");
        }
        assert_eq!(rep.gate_verdict, Verdict::DecreasingToZero);

        // Boundary assignments follow the printed intervals.
        let m1 = Pareto::new(1.0, 0.0).unwrap();
        let r1 =
            regular_variation_case_check(&m1, &[10, 100], &|n| (n as f64).powi(2), 0.5).unwrap();
        assert_eq!(r1.case, RvCase::OneToTwo);
        let m2 = Pareto::new(2.0, 1.0).unwrap();
        let r2 =
            regular_variation_case_check(&m2, &[10, 100], &|n| (n as f64).powi(2), 0.5).unwrap();
        assert_eq!(r2.case, RvCase::TwoPlus);
    }

    #[test]
    fn case_check_reports_honest_divergence_for_linear_thresholds() {
        // α = 3/2 with tₙ = n: the gate decays like n^{-1/2}, but the
        // first-moment functional is μ₁(n) = 3(1 − n^{-1/2}), which increases
        // toward 3 — the condition fails and the verdict must say so.
        let m = pareto(1.5);
        let rep = regular_variation_case_check(&m, &[10, 100, 1000], &|n| n as f64, 0.5).unwrap();
        assert_eq!(rep.case, RvCase::OneToTwo);
        let (name, vals, verdict) = &rep.functionals[0];
        assert_eq!(name, "first_moment_drift");
        let expect = [
            3.0 * (1.0 - 0.1_f64.sqrt()),
            3.0 * (1.0 - 0.1),
            3.0 * (1.0 - 0.001_f64.sqrt()),
        ];
        for ((_, v), e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-9, "{v} vs {e}");
        }
        assert_eq!(*verdict, Verdict::Increasing);
    }

    #[test]
    fn case_check_symmetric_cubic_tail_second_moment_scale() {
        // Symmetric α = 3 with tₙ = n^{0.6}: μ₂(t) = 3(1 − 1/t), so the
        // second-moment functional is 1.8·log n·n^{-0.2}·(1 − n^{-0.6}),
        // decreasing once n is past e⁵.
        let m = Pareto::new(3.0, 1.0).unwrap();
        let rep = regular_variation_case_check(
            &m,
            &[10_000, 100_000, 1_000_000],
            &|n| (n as f64).powf(0.6),
            0.5,
        )
        .unwrap();
        assert_eq!(rep.case, RvCase::TwoPlus);
        let (dname, dvals, dverdict) = &rep.functionals[0];
        assert_eq!(dname, "mean_drift");
        assert!(dvals.iter().all(|&(_, v)| v == 0.0));
        assert_ne!(*dverdict, Verdict::Increasing);
        let (sname, svals, _) = &rep.functionals[1];
        assert_eq!(sname, "second_moment_scale");
        for (&(n, v), _) in svals.iter().zip(0..) {
            let t = n.powf(0.6);
            let expect = n * 3.0 * (1.0 - 1.0 / t) * t.ln() / (t * t);
            assert!((v - expect).abs() < 1e-9 * expect, "{v} vs {expect}");
        }
        let vs: Vec<f64> = svals.iter().map(|&(_, v)| v).collect();
        assert!(vs[1] < vs[0] && vs[2] < vs[1], "not decreasing: {vs:?}");
    }

    #[test]
    fn case_check_rejects_inadmissible_thresholds_and_families() {
        let m = pareto(1.5);
        // tₙ = constant makes n·F̄(tₙ) increase.
        let err = regular_variation_case_check(&m, &[10, 100], &|_| 50.0, 0.5)
            .err()
            .unwrap();
        assert!(matches!(err, Error::Precondition(_)), "{err}");
        // Lognormal has no regular-variation index.
        let ln = CenteredLognormal::new(1.0).unwrap();
        assert!(regular_variation_case_check(&ln, &[10, 100], &|n| n as f64, 0.5).is_err());
    }

    #[test]
    fn threshold_solver_closed_form_and_log_cube() {
        // α = 2: n·t^{-2} = δ at t = √(n/δ) = 100 for n = 100, δ = 0.01.
        let m = Pareto::new(2.0, 0.0).unwrap();
        let t = solve_threshold(&m, ThresholdFunctional::SampleTail, 100, 0.01, (1.0, 1e12))
            .unwrap();
        assert!((t - 100.0).abs() < 1e-4, "{t}");

        // Log-cube rule: the functional rises to its hump near e^{1.5} and
        // then decays; the solver must land on the decreasing branch.
        let ln = CenteredLognormal::new(1.0).unwrap();
        for (n, lo, hi) in [(100_u64, 2100.0, 2140.0), (1000, 8600.0, 8680.0)] {
            let t = solve_threshold(&ln, ThresholdFunctional::LogCube, n, 0.01, (1.0, 1e12))
                .unwrap();
            assert!(t > lo && t < hi, "n={n}: t={t}");
            let v = n as f64 * t.ln().powi(3) / (t * t);
            assert!(v <= 0.01 && v >= 0.0099, "n={n}: rule value {v}");
        }
    }

    #[test]
    fn threshold_solver_edge_cases() {
        let m = Pareto::new(2.0, 0.0).unwrap();
        // Already satisfied at the range start.
        let t = solve_threshold(&m, ThresholdFunctional::SampleTail, 100, 200.0, (1.0, 1e12))
            .unwrap();
        assert_eq!(t, 1.0);
        // Unreachable target reports the searched range.
        let err = solve_threshold(&m, ThresholdFunctional::SampleTail, 100, 1e-30, (1.0, 1e6))
            .err()
            .unwrap();
        match err {
            Error::NotFound(msg) => assert!(msg.contains("1e6") || msg.contains("1.0000e6"), "{msg}"),
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn exponential_control_fails_the_hazard_scale_condition() {
        // Light tails: η ≡ rate, so sη(λs) = s and the hazard-scale ratio is
        // s·log s/(s − log n) ≈ log s — increasing, never vanishing.  (The
        // moment functional alone plateaus near n·(μ₁ + μ₂) and does not
        // expose the failure.)
        let m = Exponential::new(1.0).unwrap();
        let cfg = ConditionConfig::default();
        let vals: Vec<f64> = [20.0, 40.0, 80.0]
            .iter()
            .map(|&s| hazard_scale_condition(&m, &cfg, 2, s).unwrap())
            .collect();
        for (v, s) in vals.iter().zip([20.0_f64, 40.0, 80.0]) {
            let expect = s * s.ln() / (s - 2.0_f64.ln());
            assert!((v - expect).abs() < 1e-12 * expect, "{v} vs {expect}");
        }
        assert_eq!(verdict_for(&vals, cfg.delta_report), Verdict::Increasing);
    }

    #[test]
    fn verdict_rules_are_recomputable() {
        assert_eq!(verdict_for(&[1.0, 0.6, 0.3], 0.5), Verdict::DecreasingToZero);
        assert_eq!(verdict_for(&[1.0, 0.8, 0.7], 0.5), Verdict::Plateau);
        assert_eq!(verdict_for(&[0.5, 0.8, 0.9], 0.5), Verdict::Increasing);
        assert_eq!(verdict_for(&[0.0, 0.0, 0.0], 0.5), Verdict::DecreasingToZero);
        // Non-monotone but ending at the minimum below tolerance.
        assert_eq!(verdict_for(&[0.4, 0.9, 0.2], 0.5), Verdict::DecreasingToZero);
        assert_eq!(verdict_for(&[], 0.5), Verdict::Plateau);
    }

    #[test]
    fn config_validation_rejects_bad_lambda_and_strategy() {
        let mut cfg = ConditionConfig::default();
        cfg.lambda = 1.5;
        let err = moment_condition(&pareto(1.0), &cfg, 2, 100.0).err().unwrap();
        assert!(err.to_string().contains("(0,1)"), "{err}");
        let cfg = ConditionConfig {
            lambda: 0.5,
            w_strategy: WStrategy::FixedMultiple { factor: 0.5 },
            delta_report: 0.5,
        };
        assert!(cfg.validate().is_err());
    }
}
