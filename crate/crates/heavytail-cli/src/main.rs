//! Command-line front end for the heavytail toolkit.
//!
//! Every subcommand reads one TOML experiment config, runs the matching
//! library routine and writes CSV/JSON tables stamped with the config's
//! SHA-256.  Commands are pure in (config, seed): re-running overwrites the
//! output files with byte-identical contents.
//!
//! Exit codes: 0 success; 1 config or i/o error; 2 domain, regime,
//! precondition or not-found error; 3 numerical failure.

mod config;

use clap::{Parser, Subcommand, ValueEnum};
use config::{check_lambda, functional_by_name, ExperimentConfig};
use heavytail::bounds::{bound_sweep, BoundConfig, LowerMode};
use heavytail::conditions::{condition_sweep, ConditionConfig, WStrategy};
use heavytail::convolve::{convolve_tail_many, theorem_1_1_demo};
use heavytail::error::{Error, Result};
use heavytail::model::{default_remainder_grid, model_from_spec};
use heavytail::report::{self, ConvTailRow, Meta};
use heavytail::simulate::{estimate_bigjump, estimate_crude, ratio_sweep, Estimator, SimResult, ThresholdRule};
use heavytail::TailModel;
use serde_json::json;
use std::path::PathBuf;

const CONFIG_KEYS: &str = "\
Configuration keys (TOML):
  [model]        family = pareto | lognormal | logweibull | exponential | tabulated;
                 alpha       tail index of F̄(t) = p + (1−p)·t^(−α) on [1, ∞)
                 p           mass blended onto the unit atom of the shifted family
                 sigma       lognormal scale of log X ~ N(0, σ²)
                 gamma_shape log-Weibull exponent in ψ(t) = (log t)^γ
                 rate        exponential hazard (light-tailed control model)
                 table / table_path   (t, ψ(t)) knots for a tabulated hazard
  [output]       dir = output directory; format = csv | json | both
  [conditions]   lambda ∈ (0,1)   hazard evaluated at λs in each functional
                 delta_report     level a final sup must reach to count as decreasing to zero
                 w_points         log-grid size for the truncation-level search on [s/a, s]
                 w_factor         skip the search and take w = factor·(s/a)
                 n_grid, s_grid   strictly increasing evaluation grids
  [bounds]       lambda ∈ (0,1); delta ∈ (0, 1−e⁻²)  lower-bound slack;
                 zeta > 0         overshoot multiple in the lower-bound shift
                 n_grid, s_grid   evaluation grids
                 lower = chebyshev | montecarlo   lower-bound certificate; mc_trials replicates
                 hazard_product_sup   certified sup of t·η(t) for dominated-varying tails
  [convolve]     n_max ≤ 8        tail rows for every fold count n = 1..=n_max
                 t_grid           tail probes t; knots = grid resolution (default 4096)
  [simulate]     estimator = crude | bigjump; n_grid; trials; seed;
                 s_grid           explicit thresholds (one cell per n×s), or instead
  [simulate.rule]  functional = sample_tail | log_cube | finite_variance;
                 delta; t_min; t_max; lambda   threshold rule tₙ = min{t : f(n,t) ≤ δ}
  [demo]         n_max ≤ 6; epsilon = per-n ratio tolerances (default 1/n)
  [threshold]    functional; delta; n_grid; t_min; t_max; lambda   stand-alone tₙ table";

#[derive(Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Tail sums of heavy-tailed random variables: conditions, bounds, convolution and Monte Carlo",
    after_help = CONFIG_KEYS
)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides [output].dir; default ".").
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Output format (overrides [output].format; default both).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Master seed (overrides [simulate].seed).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for Monte Carlo blocks; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Override the threshold-rule tolerance δ where one applies.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the three uniform-regime condition functionals over (n, s)
    Conditions,
    /// Two-sided ratio bounds; joins a Monte Carlo sandwich table when a [simulate] block is present
    Bounds,
    /// Exact n-fold convolution tails P[Sₙ > t] against n·F̄(t)
    Convolve,
    /// Monte Carlo ratio estimation, crude or conditional big-jump
    Simulate,
    /// Constructive single-big-jump demonstration: per-n thresholds tₙ with sup|ratio − 1| ≤ εₙ
    #[command(name = "demo_thm11", alias = "demo-thm11")]
    DemoThm11,
    /// Solve threshold rules tₙ = min{t : f(n, t) ≤ δ} over an n grid
    Threshold,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
    fn parse(name: &str) -> Result<Format> {
        match name {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "both" => Ok(Format::Both),
            other => Err(Error::InvalidSpec(format!(
                "unknown output format `{other}` (expected csv, json or both)"
            ))),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // Partial sums are reduced in fixed block order, so the thread count
        // changes wall time only, never output bytes.
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidSpec(_) | Error::Io(_) => 1,
        Error::Domain(_) | Error::Regime(_) | Error::Precondition(_) | Error::NotFound(_) => 2,
        Error::Numeric(_) => 3,
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    model: Box<dyn TailModel>,
    meta: Meta,
    out_dir: PathBuf,
    format: Format,
    seed: Option<u64>,
    tolerance: Option<f64>,
}

fn run(cli: &Cli) -> Result<()> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("--config <PATH> is required".into()))?;
    let (cfg, hash) = config::load(path)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    let format = match cli.format {
        Some(f) => f,
        None => match cfg.output.format.as_deref() {
            Some(name) => Format::parse(name)?,
            None => Format::Both,
        },
    };
    let model = model_from_spec(&cfg.model)?;
    let ctx = Ctx {
        cfg: &cfg,
        model,
        meta: Meta::with_config_hash(hash),
        out_dir,
        format,
        seed: cli.seed,
        tolerance: cli.tolerance,
    };
    match cli.command {
        Command::Conditions => cmd_conditions(&ctx),
        Command::Bounds => cmd_bounds(&ctx),
        Command::Convolve => cmd_convolve(&ctx),
        Command::Simulate => cmd_simulate(&ctx),
        Command::DemoThm11 => cmd_demo(&ctx),
        Command::Threshold => cmd_threshold(&ctx),
    }
}

fn block<'a, T>(b: &'a Option<T>, name: &str) -> Result<&'a T> {
    b.as_ref()
        .ok_or_else(|| Error::InvalidSpec(format!("config has no [{name}] block")))
}

fn emit(ctx: &Ctx, stem: &str, csv: Option<String>, json_text: Option<String>) -> Result<()> {
    if let (true, Some(body)) = (ctx.format.csv(), csv) {
        report::write_text(&ctx.out_dir.join(format!("{stem}.csv")), &body)?;
    }
    if let (true, Some(body)) = (ctx.format.json(), json_text) {
        report::write_text(&ctx.out_dir.join(format!("{stem}.json")), &body)?;
    }
    Ok(())
}

fn w_strategy(points: Option<usize>, factor: Option<f64>) -> WStrategy {
    match factor {
        Some(f) => WStrategy::FixedMultiple { factor: f },
        None => WStrategy::GridSearch {
            points: points.unwrap_or(40),
        },
    }
}

fn cmd_conditions(ctx: &Ctx) -> Result<()> {
    let b = block(&ctx.cfg.conditions, "conditions")?;
    let cfg = ConditionConfig {
        lambda: check_lambda(b.lambda.unwrap_or(0.5))?,
        w_strategy: w_strategy(b.w_points, b.w_factor),
        delta_report: b.delta_report.unwrap_or(0.5),
    };
    let reports = condition_sweep(ctx.model.as_ref(), &cfg, &b.n_grid, &b.s_grid)?;
    for rep in &reports {
        let last = rep.rows.last().map(|r| r.sup_value).unwrap_or(f64::NAN);
        println!(
            "conditions: {:<12} verdict = {:<18} final sup = {}",
            rep.functional, rep.verdict, last
        );
        for w in &rep.warnings {
            println!("conditions: {:<12} warning: {w}", rep.functional);
        }
    }
    emit(
        ctx,
        "conditions",
        Some(report::conditions_csv(&ctx.meta, &reports)),
        Some(report::conditions_json(&ctx.meta, &reports)),
    )
}

fn bound_lib_config(ctx: &Ctx) -> Result<BoundConfig> {
    let b = block(&ctx.cfg.bounds, "bounds")?;
    let defaults = BoundConfig::default();
    let lower_mode = match b.lower.as_deref().unwrap_or("chebyshev") {
        "chebyshev" => LowerMode::Chebyshev,
        "montecarlo" => LowerMode::MonteCarlo {
            trials: b.mc_trials.unwrap_or(100_000),
            seed: ctx.seed.unwrap_or(0),
        },
        other => {
            return Err(Error::InvalidSpec(format!(
                "unknown lower-bound mode `{other}` (expected chebyshev or montecarlo)"
            )))
        }
    };
    Ok(BoundConfig {
        lambda: check_lambda(b.lambda.unwrap_or(defaults.lambda))?,
        delta: b.delta.unwrap_or(defaults.delta),
        zeta: b.zeta.unwrap_or(defaults.zeta),
        w_strategy: WStrategy::default(),
        lower_mode,
        remainder_grid: default_remainder_grid(),
        hazard_product_sup: b.hazard_product_sup,
    })
}

fn cmd_bounds(ctx: &Ctx) -> Result<()> {
    let b = block(&ctx.cfg.bounds, "bounds")?;
    let cfg = bound_lib_config(ctx)?;
    let rows = bound_sweep(ctx.model.as_ref(), &cfg, &b.n_grid, &b.s_grid)?;
    let vacuous = rows.iter().filter(|r| r.vacuous).count();
    println!(
        "bounds: {} rows ({} vacuous) over n ∈ {:?}, s ∈ {:?}",
        rows.len(),
        vacuous,
        b.n_grid,
        b.s_grid
    );
    for r in rows.iter().filter(|r| !r.vacuous) {
        println!(
            "bounds: n = {:<4} s = {:<12} ratio ∈ [{}, {}]",
            r.n,
            r.s,
            report::field(r.ratio_lb),
            report::field(r.ratio_ub)
        );
    }
    emit(
        ctx,
        "bounds",
        Some(report::bounds_csv(&ctx.meta, &rows)),
        Some(report::bounds_json(&ctx.meta, &rows)),
    )?;

    // Sandwich table: envelope each Monte Carlo 99% interval by the bounds.
    if ctx.cfg.simulate.is_some() {
        let sb = block(&ctx.cfg.simulate, "simulate")?;
        let estimator = parse_estimator(sb.estimator.as_deref())?;
        let trials = sb.trials.unwrap_or(100_000);
        let seed = ctx.seed.or(sb.seed).unwrap_or(0);
        let mut lines = Vec::new();
        let mut payload = Vec::new();
        let mut all_hold = true;
        for r in rows.iter().filter(|r| !r.vacuous) {
            let est = run_estimator(ctx.model.as_ref(), estimator, r.n, r.s, trials, seed)?;
            let (lo99, hi99) = est.ratio_ci99();
            let holds = r.ratio_lb <= hi99 && lo99 <= r.ratio_ub;
            all_hold &= holds;
            lines.push(format!(
                "{},{},{},{},{},{},{},{}",
                r.n,
                report::field(r.s),
                report::field(r.ratio_lb),
                report::field(lo99),
                report::field(est.ratio),
                report::field(hi99),
                report::field(r.ratio_ub),
                holds
            ));
            payload.push(json!({
                "n": r.n,
                "s": report::jfield(r.s),
                "ratio_lb": report::jfield(r.ratio_lb),
                "mc_lo99": report::jfield(lo99),
                "mc_ratio": report::jfield(est.ratio),
                "mc_hi99": report::jfield(hi99),
                "ratio_ub": report::jfield(r.ratio_ub),
                "sandwiched": holds,
            }));
        }
        println!(
            "bounds: sandwich over {} non-vacuous cells: {}",
            lines.len(),
            if all_hold { "all hold" } else { "VIOLATED" }
        );
        emit(
            ctx,
            "sandwich",
            Some(report::custom_csv(
                &ctx.meta,
                "n,s,ratio_lb,mc_lo99,mc_ratio,mc_hi99,ratio_ub,sandwiched",
                &lines,
            )),
            Some(report::custom_json(&ctx.meta, "rows", json!(payload))),
        )?;
    }
    Ok(())
}

fn cmd_convolve(ctx: &Ctx) -> Result<()> {
    let b = block(&ctx.cfg.convolve, "convolve")?;
    if b.t_grid.is_empty() {
        return Err(Error::InvalidSpec("[convolve].t_grid is empty".into()));
    }
    let knots = b.knots.unwrap_or(4096);
    let mut rows = Vec::new();
    for n in 1..=b.n_max {
        let tails = convolve_tail_many(ctx.model.as_ref(), n, &b.t_grid, knots)?;
        for (&t, &tail) in b.t_grid.iter().zip(&tails) {
            let n_fbar = n as f64 * ctx.model.right_tail(t);
            rows.push(ConvTailRow {
                n,
                t,
                conv_tail: tail,
                n_fbar,
                ratio: tail / n_fbar,
            });
        }
    }
    for r in &rows {
        println!(
            "convolve: n = {} t = {:<12} P[Sₙ > t] = {:<24} ratio to n·F̄ = {}",
            r.n,
            r.t,
            report::field(r.conv_tail),
            report::field(r.ratio)
        );
    }
    emit(
        ctx,
        "convolve",
        Some(report::convolve_csv(&ctx.meta, &rows)),
        Some(report::convolve_json(&ctx.meta, &rows)),
    )
}

fn parse_estimator(name: Option<&str>) -> Result<Estimator> {
    match name.unwrap_or("bigjump") {
        "crude" => Ok(Estimator::Crude),
        "bigjump" => Ok(Estimator::BigJump),
        other => Err(Error::InvalidSpec(format!(
            "unknown estimator `{other}` (expected crude or bigjump)"
        ))),
    }
}

fn run_estimator(
    model: &dyn TailModel,
    estimator: Estimator,
    n: u64,
    s: f64,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    match estimator {
        Estimator::Crude => estimate_crude(model, n, s, trials, seed),
        Estimator::BigJump => estimate_bigjump(model, n, s, trials, seed),
    }
}

fn cmd_simulate(ctx: &Ctx) -> Result<()> {
    let b = block(&ctx.cfg.simulate, "simulate")?;
    let estimator = parse_estimator(b.estimator.as_deref())?;
    let trials = b.trials.unwrap_or(100_000);
    let seed = ctx.seed.or(b.seed).unwrap_or(0);
    if b.n_grid.is_empty() {
        return Err(Error::InvalidSpec("[simulate].n_grid is empty".into()));
    }
    let results = match (&b.s_grid, &b.rule) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidSpec(
                "give [simulate].s_grid or [simulate].rule, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::InvalidSpec(
                "[simulate] needs s_grid or a [simulate.rule] block".into(),
            ))
        }
        (Some(s_grid), None) => {
            let mut out = Vec::new();
            for &n in &b.n_grid {
                for &s in s_grid {
                    out.push(run_estimator(ctx.model.as_ref(), estimator, n, s, trials, seed)?);
                }
            }
            out
        }
        (None, Some(rule)) => {
            if let Some(l) = rule.lambda {
                check_lambda(l)?;
            }
            let rule = ThresholdRule {
                functional: rule.functional()?,
                delta: ctx.tolerance.unwrap_or(rule.delta),
                t_range: (rule.t_min, rule.t_max),
            };
            ratio_sweep(ctx.model.as_ref(), &b.n_grid, rule, estimator, trials, seed)?
        }
    };
    for r in &results {
        let (lo, hi) = r.ratio_ci95();
        println!(
            "simulate: {} n = {:<4} s = {:<12} ratio = {:<22} 95% CI [{}, {}]",
            r.estimator.name(),
            r.n,
            r.s,
            report::field(r.ratio),
            report::field(lo),
            report::field(hi)
        );
    }
    emit(
        ctx,
        "simulate",
        Some(report::simulate_csv(&ctx.meta, &results)),
        Some(report::simulate_json(&ctx.meta, &results)),
    )
}

fn cmd_demo(ctx: &Ctx) -> Result<()> {
    let b = block(&ctx.cfg.demo, "demo")?;
    let demo = theorem_1_1_demo(ctx.model.as_ref(), b.n_max, b.epsilon.as_deref())?;
    for row in &demo.rows {
        match row.t_n {
            Some(t) => println!(
                "demo: n = {} tₙ = {:<14} sup |ratio − 1| = {:.3e} ≤ ε = {}",
                row.n, t, row.achieved_sup, row.tolerance
            ),
            None => println!(
                "demo: n = {} no threshold found with ε = {} (tail not uniformly one-jump here)",
                row.n, row.tolerance
            ),
        }
    }
    println!(
        "demo: thresholds nondecreasing: {}; probes on [{}, {}]",
        demo.thresholds_nondecreasing, demo.probe_range.0, demo.probe_range.1
    );
    // The demonstration is a structured verdict, not a table; always JSON.
    report::write_text(
        &ctx.out_dir.join("demo_thm11.json"),
        &report::demo_json(&ctx.meta, &demo),
    )
}

fn cmd_threshold(ctx: &Ctx) -> Result<()> {
    let b = block(&ctx.cfg.threshold, "threshold")?;
    if let Some(l) = b.lambda {
        check_lambda(l)?;
    }
    let functional = functional_by_name(&b.functional, b.lambda)?;
    let delta = ctx.tolerance.unwrap_or(b.delta);
    let range = (b.t_min.unwrap_or(2.0), b.t_max.unwrap_or(1e12));
    let mut lines = Vec::new();
    let mut payload = Vec::new();
    for &n in &b.n_grid {
        let t = heavytail::conditions::solve_threshold(ctx.model.as_ref(), functional, n, delta, range)?;
        println!(
            "threshold: {} ≤ {} first holds at tₙ = {} (n = {})",
            functional.name(),
            delta,
            t,
            n
        );
        lines.push(format!(
            "{},{},{},{}",
            functional.name(),
            report::field(delta),
            n,
            report::field(t)
        ));
        payload.push(json!({
            "functional": functional.name(),
            "delta": report::jfield(delta),
            "n": n,
            "t_n": report::jfield(t),
        }));
    }
    emit(
        ctx,
        "thresholds",
        Some(report::custom_csv(
            &ctx.meta,
            "functional,delta,n,t_n",
            &lines,
        )),
        Some(report::custom_json(&ctx.meta, "rows", json!(payload))),
    )
}
