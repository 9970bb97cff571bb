//! TOML experiment configuration.
//!
//! One `[model]` table plus one block per subcommand; a config can carry
//! several blocks so the same file drives a whole experiment bundle.  Every
//! table rejects unknown keys — a typo fails the run with a line-anchored
//! message instead of silently using a default.

use heavytail::conditions::ThresholdFunctional;
use heavytail::error::{Error, Result};
use heavytail::model::ModelSpec;
use heavytail::report::sha256_hex;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub output: OutputBlock,
    pub conditions: Option<ConditionsBlock>,
    pub bounds: Option<BoundsBlock>,
    pub convolve: Option<ConvolveBlock>,
    pub simulate: Option<SimulateBlock>,
    pub demo: Option<DemoBlock>,
    pub threshold: Option<ThresholdBlock>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Output directory; overridden by --out.
    pub dir: Option<String>,
    /// csv | json | both; overridden by --format.
    pub format: Option<String>,
}

/// Grids and knobs for the condition-functional sweep.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsBlock {
    /// Hazard evaluation multiplier λ ∈ (0,1); default 0.5.
    pub lambda: Option<f64>,
    /// Trend tolerance for the decreasing-to-zero verdict; default 0.5.
    pub delta_report: Option<f64>,
    /// Log-grid size for the truncation-level search; default 40.
    pub w_points: Option<usize>,
    /// Fixed truncation multiple w = factor·(s/a) instead of a search.
    pub w_factor: Option<f64>,
    pub n_grid: Vec<u64>,
    pub s_grid: Vec<f64>,
}

/// Grids and parameters for the two-sided ratio-bound sweep.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsBlock {
    /// λ ∈ (0,1); default 0.5.
    pub lambda: Option<f64>,
    /// Lower-bound slack δ ∈ (0, 1−e⁻²); default half the range.
    pub delta: Option<f64>,
    /// Overshoot multiple ζ > 0 for the lower-bound shift; default 0.1.
    pub zeta: Option<f64>,
    pub n_grid: Vec<u64>,
    pub s_grid: Vec<f64>,
    /// chebyshev (deterministic, default) | montecarlo.
    pub lower: Option<String>,
    /// Replicates for the montecarlo lower certificate; default 100000.
    pub mc_trials: Option<u64>,
    /// Certified sup of t·η(t) for dominated-varying tails (optional).
    pub hazard_product_sup: Option<f64>,
}

/// n-fold convolution probes.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolveBlock {
    /// Rows are emitted for every n in 1..=n_max.
    pub n_max: u64,
    pub t_grid: Vec<f64>,
    /// Grid knots; default 4096.
    pub knots: Option<usize>,
}

/// Monte Carlo cells: explicit thresholds or a threshold rule, not both.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    /// crude | bigjump; default bigjump.
    pub estimator: Option<String>,
    pub n_grid: Vec<u64>,
    pub s_grid: Option<Vec<f64>>,
    pub rule: Option<RuleBlock>,
    /// Replicates per cell; default 100000.
    pub trials: Option<u64>,
    /// Master seed; overridden by --seed; default 0.
    pub seed: Option<u64>,
}

/// Threshold rule: smallest t in [t_min, t_max] with functional(n, t) ≤ delta.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleBlock {
    /// sample_tail (n·F̄(t)) | log_cube (n·log³t/t²) | finite_variance.
    pub functional: String,
    pub delta: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// λ for the finite_variance functional; default 0.5.
    pub lambda: Option<f64>,
}

/// Constructive tail-equivalence demonstration.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoBlock {
    /// Thresholds are searched for every n in 1..=n_max (n_max ≤ 6).
    pub n_max: u64,
    /// Per-n tolerances εₙ; default 1/n.
    pub epsilon: Option<Vec<f64>>,
}

/// Stand-alone threshold table.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdBlock {
    /// As in [simulate.rule].
    pub functional: String,
    pub delta: f64,
    pub n_grid: Vec<u64>,
    /// Search range; defaults (2, 10¹²).
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    /// λ for the finite_variance functional; default 0.5.
    pub lambda: Option<f64>,
}

impl RuleBlock {
    pub fn functional(&self) -> Result<ThresholdFunctional> {
        functional_by_name(&self.functional, self.lambda)
    }
}

pub fn functional_by_name(name: &str, lambda: Option<f64>) -> Result<ThresholdFunctional> {
    match name {
        "sample_tail" => Ok(ThresholdFunctional::SampleTail),
        "log_cube" => Ok(ThresholdFunctional::LogCube),
        "finite_variance" => Ok(ThresholdFunctional::FiniteVariance {
            lambda: lambda.unwrap_or(0.5),
        }),
        other => Err(Error::InvalidSpec(format!(
            "unknown threshold functional `{other}` (expected sample_tail, log_cube or finite_variance)"
        ))),
    }
}

/// Positivity-and-range gate for config-supplied λ; violations are config
/// errors, not library domain errors.
pub fn check_lambda(lambda: f64) -> Result<f64> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(lambda)
    } else {
        Err(Error::InvalidSpec(format!(
            "lambda = {lambda} is outside (0,1)"
        )))
    }
}

/// Parse a config file and return it with the SHA-256 of its bytes.
pub fn load(path: &Path) -> Result<(ExperimentConfig, String)> {
    let bytes = std::fs::read(path).map_err(|e| {
        Error::InvalidSpec(format!("cannot read config {}: {e}", path.display()))
    })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::InvalidSpec("config is not valid UTF-8".into()))?;
    let cfg: ExperimentConfig = toml::from_str(&text)
        .map_err(|e| Error::InvalidSpec(format!("config {}: {e}", path.display())))?;
    Ok((cfg, sha256_hex(&bytes)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn parse(s: &str) -> Result<ExperimentConfig> {
        toml::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    #[test]
    fn minimal_config_parses() {
        let cfg = parse(
            r#"
            [model]
            family = "pareto"
            alpha = 1.0

            [convolve]
            n_max = 2
            t_grid = [100.0]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.model.family, "pareto");
        assert_eq!(cfg.convolve.unwrap().n_max, 2);
        assert!(cfg.bounds.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected_with_the_key_name() {
        let err = parse(
            r#"
            [model]
            family = "pareto"
            alpha = 1.0

            [simulate]
            n_grid = [2]
            s_grid = [100.0]
            tirals = 1000
            "#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("tirals"), "{err}");
    }

    #[test]
    fn load_hashes_the_exact_bytes() {
        let dir = std::env::temp_dir().join("heavytail-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.toml");
        let body = "[model]\nfamily = \"exponential\"\n";
        std::fs::File::create(&p)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        let (cfg, hash) = load(&p).unwrap();
        assert_eq!(cfg.model.family, "exponential");
        assert_eq!(hash, sha256_hex(body.as_bytes()));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn lambda_gate_message_cites_the_interval() {
        let err = check_lambda(1.5).unwrap_err();
        assert!(err.to_string().contains("(0,1)"), "{err}");
        assert!(check_lambda(0.5).is_ok());
    }
}
