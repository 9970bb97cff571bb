//! Plain-text emission: CSV tables and JSON mirrors for every result type.
//!
//! Output is deliberately boring.  Every file starts with a comment preamble
//! naming the tool version and, when a run came from a config file, the
//! SHA-256 of that file — enough to tie any table back to the exact inputs
//! that produced it.  Floats print in Rust's shortest round-trip form, so
//! equal inputs give byte-equal files on every platform and worker count.

use crate::bounds::BoundRow;
use crate::conditions::ConditionReport;
use crate::convolve::DemoResult;
use crate::simulate::SimResult;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::Path;

/// Run provenance stamped into every file.
#[derive(Clone, Debug, Default)]
pub struct Meta {
    /// Hex SHA-256 of the experiment config, when there was one.
    pub config_sha256: Option<String>,
}

impl Meta {
    pub fn with_config_hash(hash: impl Into<String>) -> Self {
        Meta {
            config_sha256: Some(hash.into()),
        }
    }

    fn preamble(&self) -> String {
        let mut s = format!("# toolkit: heavytail {}\n", env!("CARGO_PKG_VERSION"));
        if let Some(h) = &self.config_sha256 {
            let _ = writeln!(s, "# config_sha256: {h}");
        }
        s
    }

    fn json_header(&self) -> Value {
        json!({
            "toolkit": format!("heavytail {}", env!("CARGO_PKG_VERSION")),
            "config_sha256": self.config_sha256,
        })
    }
}

/// One n-fold convolution probe against the single-tail asymptote.
#[derive(Clone, Copy, Debug)]
pub struct ConvTailRow {
    pub n: u64,
    pub t: f64,
    pub conv_tail: f64,
    pub n_fbar: f64,
    pub ratio: f64,
}

/// Shortest-round-trip float field; NaN marks points outside the regime.
fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x}")
    }
}

/// NaN has no JSON literal; mirror it as null.
fn jnum(x: f64) -> Value {
    if x.is_nan() {
        Value::Null
    } else {
        json!(x)
    }
}

pub fn conditions_csv(meta: &Meta, reports: &[ConditionReport]) -> String {
    let mut s = meta.preamble();
    s.push_str("functional,index,sup_value,argmax_s,best_w,verdict\n");
    for rep in reports {
        for row in &rep.rows {
            let w = row.best_w.map(num).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                rep.functional,
                num(row.index),
                num(row.sup_value),
                num(row.argmax_s),
                w,
                rep.verdict
            );
        }
    }
    s
}

pub fn conditions_json(meta: &Meta, reports: &[ConditionReport]) -> String {
    let body: Vec<Value> = reports
        .iter()
        .map(|rep| {
            json!({
                "functional": rep.functional,
                "verdict": rep.verdict.to_string(),
                "warnings": rep.warnings,
                "rows": rep.rows.iter().map(|r| json!({
                    "index": jnum(r.index),
                    "sup_value": jnum(r.sup_value),
                    "argmax_s": jnum(r.argmax_s),
                    "best_w": r.best_w.map(jnum).unwrap_or(Value::Null),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    pretty(json!({ "meta": meta.json_header(), "reports": body }))
}

pub fn bounds_csv(meta: &Meta, rows: &[BoundRow]) -> String {
    let mut s = meta.preamble();
    s.push_str("n,s,a,eps,eps_prime,w,m,m_prime,ratio_lb,ratio_ub,vacuous\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            num(r.s),
            num(r.a),
            num(r.eps),
            num(r.eps_prime),
            num(r.w),
            num(r.m),
            num(r.m_prime),
            num(r.ratio_lb),
            num(r.ratio_ub),
            r.vacuous
        );
    }
    s
}

pub fn bounds_json(meta: &Meta, rows: &[BoundRow]) -> String {
    let body: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n, "s": jnum(r.s), "a": jnum(r.a),
                "eps": jnum(r.eps), "eps_prime": jnum(r.eps_prime),
                "w": jnum(r.w), "m": jnum(r.m), "m_prime": jnum(r.m_prime),
                "ratio_lb": jnum(r.ratio_lb), "ratio_ub": jnum(r.ratio_ub),
                "vacuous": r.vacuous,
                "note": if r.note.is_empty() { Value::Null } else { json!(r.note) },
            })
        })
        .collect();
    pretty(json!({ "meta": meta.json_header(), "rows": body }))
}

pub fn convolve_csv(meta: &Meta, rows: &[ConvTailRow]) -> String {
    let mut s = meta.preamble();
    s.push_str("n,t,conv_tail,n_Fbar,ratio\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.n,
            num(r.t),
            num(r.conv_tail),
            num(r.n_fbar),
            num(r.ratio)
        );
    }
    s
}

pub fn convolve_json(meta: &Meta, rows: &[ConvTailRow]) -> String {
    let body: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n, "t": jnum(r.t), "conv_tail": jnum(r.conv_tail),
                "n_Fbar": jnum(r.n_fbar), "ratio": jnum(r.ratio),
            })
        })
        .collect();
    pretty(json!({ "meta": meta.json_header(), "rows": body }))
}

pub fn demo_json(meta: &Meta, demo: &DemoResult) -> String {
    let rows: Vec<Value> = demo
        .rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "t_n": r.t_n.map(jnum).unwrap_or(Value::Null),
                "achieved_sup": jnum(r.achieved_sup),
                "tolerance": jnum(r.tolerance),
            })
        })
        .collect();
    pretty(json!({
        "meta": meta.json_header(),
        "rows": rows,
        "thresholds_nondecreasing": demo.thresholds_nondecreasing,
        "probe_range": [jnum(demo.probe_range.0), jnum(demo.probe_range.1)],
    }))
}

pub fn simulate_csv(meta: &Meta, rows: &[SimResult]) -> String {
    let mut s = meta.preamble();
    s.push_str("estimator,n,s,trials,p_hat,ci95_lo,ci95_hi,ratio,seed\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.estimator.name(),
            r.n,
            num(r.s),
            r.trials,
            num(r.p_hat),
            num(r.ci95.0),
            num(r.ci95.1),
            num(r.ratio),
            r.seed
        );
    }
    s
}

pub fn simulate_json(meta: &Meta, rows: &[SimResult]) -> String {
    let body: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "estimator": r.estimator.name(),
                "n": r.n, "s": jnum(r.s), "trials": r.trials,
                "p_hat": jnum(r.p_hat),
                "ci95_lo": jnum(r.ci95.0), "ci95_hi": jnum(r.ci95.1),
                "ci99_lo": jnum(r.ci99.0), "ci99_hi": jnum(r.ci99.1),
                "ratio": jnum(r.ratio), "seed": r.seed,
            })
        })
        .collect();
    pretty(json!({ "meta": meta.json_header(), "rows": body }))
}

/// CSV emitter for callers that assemble their own row strings; keeps the
/// preamble convention uniform across every table the toolkit writes.
pub fn custom_csv(meta: &Meta, header: &str, lines: &[String]) -> String {
    let mut s = meta.preamble();
    s.push_str(header);
    s.push('\n');
    for l in lines {
        s.push_str(l);
        s.push('\n');
    }
    s
}

/// JSON emitter pairing the standard meta header with one caller payload.
pub fn custom_json(meta: &Meta, key: &str, payload: Value) -> String {
    pretty(json!({ "meta": meta.json_header(), key: payload }))
}

/// Shortest-round-trip float field for externally assembled rows.
pub fn field(x: f64) -> String {
    num(x)
}

/// NaN-safe JSON number for externally assembled payloads.
pub fn jfield(x: f64) -> Value {
    jnum(x)
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("JSON value is always serializable");
    s.push('\n');
    s
}

/// Write with a trailing newline guaranteed; parent directories must exist.
pub fn write_text(path: &Path, contents: &str) -> crate::Result<()> {
    let body = if contents.ends_with('\n') {
        contents.to_string()
    } else {
        format!("{contents}\n")
    };
    std::fs::write(path, body)?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}
