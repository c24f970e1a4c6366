//! Subcommand implementations.

use clap::ValueEnum;
use mmac_core::analytics::{
    ber_x2_bounds_async, ber_x2_bounds_sync, ser_x1_async, ser_x1_async_asymptotic_bounds, ser_x1_bounds_sync,
    ser_x1_sync, threshold_asymptotic, threshold_lambda, threshold_tolerance,
};
use mmac_core::rate_region::{
    convexity_slopes, rate_tag_given_tx, rate_tag_lower_bound, region_vertices, sum_rate_exact, sum_rate_lower_bound,
    tdma_rates,
};
use mmac_core::simulate::{run_ber_x2_with, run_mi_estimates, run_ser_x1};
use mmac_core::{BoundPair, Error, ErrorEstimate, Strategy, SystemConfig, ThresholdRule};
use serde_json::json;

use crate::args::{Command, ErrorRateArgs, IoArgs, MiArgs, Mode, ThresholdArgs};
use crate::defaults::{link_defaults, load, rate_defaults};
use crate::output::{emit, fmt_num, fmt_opt, Sidecar, Table};
use crate::sweep::{SweepSpec, SweepVar};
use crate::{figures, CliError};

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::RateRegion(a) => rate_region(&a),
        Command::Convexity(a) => convexity(&a),
        Command::Threshold(a) => threshold(&a),
        Command::ErrorRates(a) => error_rates(&a),
        Command::Figure(a) => figures::run(&a),
        Command::Mi(a) => mi(&a),
    }
}

/// `Ok(None)` for combinations the analysis does not cover.
pub fn optional<T>(r: mmac_core::Result<T>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn sweep_for(io: &IoArgs, fallback: mmac_core::ConfigFile, default_var: SweepVar) -> Result<SweepSpec, CliError> {
    let base = load(io.config.as_deref(), fallback)?;
    SweepSpec::new(io.sweep.as_deref(), base, default_var)
}

/// Polygon rows and per-polygon metadata for a sweep.
pub fn region_table(spec: &SweepSpec) -> Result<(Table, serde_json::Value), CliError> {
    let mut t = Table::new(&["label", "R2", "R1"]);
    let mut meta = Vec::new();
    for p in spec.points()? {
        let v = region_vertices(&p.config)?;
        let s = convexity_slopes(&p.config)?;
        for (name, pt) in v.polygon() {
            t.push(vec![spec.label(name, p.x), fmt_num(pt.r2), fmt_num(pt.r1)]);
        }
        meta.push(json!({
            "x": p.x,
            "area": v.area(),
            "r1_slope": s.r1_slope,
            "r2_slope": s.r2_slope,
            "strictly_convex": s.strictly_convex(),
            "degenerate": v.degenerate,
        }));
    }
    Ok((t, json!({ "config": spec.base, "sweep": spec.variable.to_string(), "polygons": meta })))
}

fn rate_region(a: &IoArgs) -> Result<(), CliError> {
    let spec = sweep_for(a, rate_defaults(), SweepVar::SnrDb)?;
    let (t, details) = region_table(&spec)?;
    emit(a.out.as_deref(), &t, &Sidecar::new("rate-region", None, None, details))
}

fn convexity(a: &IoArgs) -> Result<(), CliError> {
    let spec = sweep_for(a, rate_defaults(), SweepVar::SnrDb)?;
    let mut t = Table::new(&["x", "r1_slope", "r2_slope", "strictly_convex", "area"]);
    for p in spec.points()? {
        let s = convexity_slopes(&p.config)?;
        let area = region_vertices(&p.config)?.area();
        t.push(vec![fmt_num(p.x), fmt_num(s.r1_slope), fmt_num(s.r2_slope), s.strictly_convex().to_string(), fmt_num(area)]);
    }
    let details = json!({ "config": spec.base, "sweep": spec.variable.to_string() });
    emit(a.out.as_deref(), &t, &Sidecar::new("convexity", None, None, details))
}

/// Threshold rows for a list of lambda values.
pub fn threshold_table(lambdas: &[f64]) -> Result<Table, CliError> {
    let mut t = Table::new(&["lambda", "threshold_bisection", "threshold_asymptotic", "ratio"]);
    let tol = threshold_tolerance();
    for &l in lambdas {
        let b = threshold_lambda(l, &tol)?.threshold;
        let a = threshold_asymptotic(l)?.threshold;
        t.push(vec![fmt_num(l), fmt_num(b), fmt_num(a), fmt_num(b / a)]);
    }
    Ok(t)
}

fn threshold(a: &ThresholdArgs) -> Result<(), CliError> {
    let t = threshold_table(&a.lambda)?;
    emit(a.out.as_deref(), &t, &Sidecar::new("threshold", None, None, json!({ "lambda": a.lambda })))
}

/// Analytic value, bounds and Monte Carlo estimate at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub analytic: Option<f64>,
    pub bounds: Option<BoundPair>,
    pub mc: Option<ErrorEstimate>,
}

impl RateRow {
    pub fn cells(&self) -> Vec<String> {
        vec![
            fmt_opt(self.analytic),
            fmt_opt(self.bounds.map(|b| b.lower)),
            fmt_opt(self.bounds.map(|b| b.upper)),
            fmt_opt(self.mc.map(|e| e.rate)),
            fmt_opt(self.mc.map(|e| e.ci_halfwidth_95)),
        ]
    }
}

/// Default tag threshold rule for a mode: the rule its bounds assume.
pub fn default_rule(mode: Mode) -> ThresholdRule {
    match mode {
        Mode::BerAsync => ThresholdRule::Asymptotic,
        _ => ThresholdRule::Bisection,
    }
}

/// Evaluate one mode at one configuration. `trials == 0` skips the simulation.
pub fn error_row(
    mode: Mode,
    cfg: &SystemConfig,
    alpha: f64,
    strategy: Strategy,
    rule: ThresholdRule,
    trials: u64,
    seed: u64,
) -> Result<RateRow, CliError> {
    let full = strategy == Strategy::Full;
    let (analytic, bounds) = match mode {
        Mode::SerSync => (optional(ser_x1_sync(cfg))?, optional(ser_x1_bounds_sync(cfg))?),
        Mode::SerAsync => (optional(ser_x1_async(cfg, alpha))?, optional(ser_x1_async_asymptotic_bounds(cfg))?),
        Mode::BerSync if full => (None, optional(ber_x2_bounds_sync(cfg))?),
        Mode::BerAsync if full => (None, optional(ber_x2_bounds_async(cfg, alpha))?),
        Mode::BerSync | Mode::BerAsync => (None, None),
    };
    let mc = if trials == 0 {
        None
    } else {
        Some(match mode {
            Mode::SerSync => run_ser_x1(cfg, 0.0, trials, seed)?,
            Mode::SerAsync => run_ser_x1(cfg, alpha, trials, seed)?,
            Mode::BerSync => run_ber_x2_with(cfg, 0.0, strategy, rule, trials, seed)?,
            Mode::BerAsync => run_ber_x2_with(cfg, alpha, strategy, rule, trials, seed)?,
        })
    };
    Ok(RateRow { analytic, bounds, mc })
}

/// The command-line spelling of an enum value.
pub fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

pub const ERROR_RATE_COLUMNS: [&str; 6] = ["x", "analytic", "lower_bound", "upper_bound", "mc_rate", "mc_ci"];

fn error_rates(a: &ErrorRateArgs) -> Result<(), CliError> {
    let default_var = match a.mode {
        Mode::SerAsync | Mode::BerAsync => SweepVar::Alpha,
        Mode::SerSync | Mode::BerSync => SweepVar::SnrDb,
    };
    let spec = sweep_for(&a.io, link_defaults(), default_var)?;
    let rule = a.threshold.map(ThresholdRule::from).unwrap_or(default_rule(a.mode));
    let strategy = Strategy::from(a.strategy);
    let mut t = Table::new(&ERROR_RATE_COLUMNS);
    let mut counts = Vec::new();
    for p in spec.points()? {
        let row = error_row(a.mode, &p.config, p.alpha, strategy, rule, a.mc.trials, a.mc.seed)?;
        let mut cells = vec![fmt_num(p.x)];
        cells.extend(row.cells());
        t.push(cells);
        if let Some(e) = row.mc {
            counts.push(json!({ "x": p.x, "errors": e.errors, "trials": e.trials }));
        }
    }
    let details = json!({
        "mode": value_name(a.mode),
        "strategy": value_name(a.strategy),
        "threshold_rule": format!("{rule:?}"),
        "config": spec.base,
        "sweep": spec.variable.to_string(),
        "counts": counts,
    });
    emit(a.io.out.as_deref(), &t, &Sidecar::new("error-rates", Some(a.mc.seed), Some(a.mc.trials), details))
}

fn mi(a: &MiArgs) -> Result<(), CliError> {
    let spec = sweep_for(&a.io, rate_defaults(), SweepVar::SnrDb)?;
    let mut t = Table::new(&[
        "x",
        "sum_rate_exact",
        "sum_rate_lower_bound",
        "sum_rate_mc",
        "sum_rate_se",
        "tag_rate_exact",
        "tag_rate_lower_bound",
        "tag_rate_upper_bound",
        "tag_mi_mc",
        "tag_mi_se",
    ]);
    for p in spec.points()? {
        let c = &p.config;
        let mc = if a.mc.trials == 0 { None } else { Some(run_mi_estimates(c, a.mc.trials, a.mc.seed)?) };
        t.push(vec![
            fmt_num(p.x),
            fmt_num(sum_rate_exact(c)?),
            fmt_num(sum_rate_lower_bound(c)?),
            fmt_opt(mc.map(|m| m.sum_rate)),
            fmt_opt(mc.map(|m| m.sum_rate_se)),
            fmt_num(rate_tag_given_tx(c)?),
            fmt_num(rate_tag_lower_bound(c)?),
            fmt_num(tdma_rates(c)?.r2_upper),
            fmt_opt(mc.map(|m| m.tag_mi)),
            fmt_opt(mc.map(|m| m.tag_mi_se)),
        ]);
    }
    let details = json!({ "config": spec.base, "sweep": spec.variable.to_string(), "units": "bits per tag symbol" });
    emit(a.io.out.as_deref(), &t, &Sidecar::new("mi", Some(a.mc.seed), Some(a.mc.trials), details))
}
