//! Declarative model construction from config files.
//!
//! A `[model]` table names a family and its parameters; unknown keys are
//! rejected so typos fail loudly instead of silently running the default.

use super::{CenteredLognormal, Exponential, LogWeibull, Pareto, Tabulated, TailModel};
use crate::error::{Error, Result};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: String,
    /// Tail index for the `pareto` family.
    pub alpha: Option<f64>,
    /// Left-tail share for `pareto`: 0 = one-sided, 1 = symmetric.
    pub p: Option<f64>,
    /// Log-scale standard deviation for `lognormal`.
    pub sigma: Option<f64>,
    /// Hazard-exponent shape for `logweibull` (ψ(t) = (log t)^γ).
    pub gamma_shape: Option<f64>,
    /// Rate for the light-tailed `exponential` control family.
    pub rate: Option<f64>,
    /// Inline `(t, ψ(t))` rows for the `tabulated` family.
    pub table: Option<Vec<(f64, f64)>>,
    /// Path to a two-column `t ψ(t)` text file (whitespace or commas, `#` comments).
    pub table_path: Option<String>,
}

pub fn model_from_spec(spec: &ModelSpec) -> Result<Box<dyn TailModel>> {
    let reject_extras = |allowed: &[&str]| -> Result<()> {
        let set: Vec<(&str, bool)> = vec![
            ("alpha", spec.alpha.is_some()),
            ("p", spec.p.is_some()),
            ("sigma", spec.sigma.is_some()),
            ("gamma_shape", spec.gamma_shape.is_some()),
            ("rate", spec.rate.is_some()),
            ("table", spec.table.is_some()),
            ("table_path", spec.table_path.is_some()),
        ];
        for (name, present) in set {
            if present && !allowed.contains(&name) {
                return Err(Error::InvalidSpec(format!(
                    "parameter `{name}` does not apply to family `{}`",
                    spec.family
                )));
            }
        }
        Ok(())
    };

    match spec.family.as_str() {
        "pareto" => {
            reject_extras(&["alpha", "p"])?;
            let alpha = spec
                .alpha
                .ok_or_else(|| Error::InvalidSpec("family `pareto` requires `alpha`".into()))?;
            Ok(Box::new(Pareto::new(alpha, spec.p.unwrap_or(0.0))?))
        }
        "lognormal" => {
            reject_extras(&["sigma"])?;
            Ok(Box::new(CenteredLognormal::new(spec.sigma.unwrap_or(1.0))?))
        }
        "logweibull" => {
            reject_extras(&["gamma_shape"])?;
            let g = spec.gamma_shape.ok_or_else(|| {
                Error::InvalidSpec("family `logweibull` requires `gamma_shape`".into())
            })?;
            Ok(Box::new(LogWeibull::new(g)?))
        }
        "exponential" => {
            reject_extras(&["rate"])?;
            Ok(Box::new(Exponential::new(spec.rate.unwrap_or(1.0))?))
        }
        "tabulated" => {
            reject_extras(&["table", "table_path"])?;
            let rows = match (&spec.table, &spec.table_path) {
                (Some(rows), None) => rows.clone(),
                (None, Some(path)) => read_table_file(Path::new(path))?,
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidSpec(
                        "family `tabulated` takes `table` or `table_path`, not both".into(),
                    ))
                }
                (None, None) => {
                    return Err(Error::InvalidSpec(
                        "family `tabulated` requires `table` or `table_path`".into(),
                    ))
                }
            };
            Ok(Box::new(Tabulated::new(&rows)?))
        }
        other => Err(Error::InvalidSpec(format!(
            "unknown family `{other}` (expected pareto, lognormal, logweibull, exponential, or tabulated)"
        ))),
    }
}

/// Load a model from a standalone TOML file containing a `[model]` table
/// (or bare top-level keys).
pub fn load_model_file(path: &Path) -> Result<Box<dyn TailModel>> {
    let text = std::fs::read_to_string(path)?;

    #[derive(Deserialize)]
    struct Wrapper {
        model: ModelSpec,
    }
    let spec = match toml::from_str::<Wrapper>(&text) {
        Ok(w) => w.model,
        Err(_) => toml::from_str::<ModelSpec>(&text)
            .map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?,
    };
    model_from_spec(&spec)
}

/// Parse a two-column `t ψ(t)` table: one pair per line, separated by
/// whitespace or a comma; `#` starts a comment; blank lines skipped.
pub fn read_table_file(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::InvalidSpec(format!(
                "{}:{}: expected two columns, got {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::InvalidSpec(format!(
                    "{}:{}: `{s}` is not a number",
                    path.display(),
                    lineno + 1
                ))
            })
        };
        rows.push((parse(fields[0])?, parse(fields[1])?));
    }
    if rows.is_empty() {
        return Err(Error::InvalidSpec(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(rows)
}
