//! Data series behind each figure.
//!
//! | id    | content                                          |
//! |-------|--------------------------------------------------|
//! | fig4  | rate region for `g_mag2` in {0.01, 0.1, 1}       |
//! | fig5  | rate region vs theta and vs SNR (two CSVs)       |
//! | fig6  | threshold curve for lambda in (0, 20]            |
//! | fig7  | bisection threshold against lambda/4             |
//! | fig8  | Tx SER vs SNR, sync                              |
//! | fig9  | tag BER vs SNR, sync                             |
//! | fig10 | Tx SER vs delay offset                           |
//! | fig11 | tag BER vs delay offset                          |
//!
//! Rate figures use SNR 10 dB, rho 0.5, |g|^2 0.1, theta pi/4, BPSK, N 1.
//! Detection figures use QPSK, an on/off tag, a uniform phase and rho 0.5.

use std::f64::consts::PI;
use std::fs;

use mmac_core::{Strategy, ThresholdRule};
use serde_json::json;

use crate::args::{FigureArgs, Mode};
use crate::commands::{error_row, region_table, threshold_table, value_name, ERROR_RATE_COLUMNS};
use crate::defaults::{link, rate_defaults};
use crate::output::{fmt_num, write_file, Sidecar, Table};
use crate::sweep::{SweepSpec, SweepVar};
use crate::CliError;

pub const FIGURE_IDS: [&str; 8] = ["fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"];

/// One detection curve: a link, a strategy and a rule, swept over `x`.
struct Series {
    n: usize,
    g2_rho: f64,
    strategy: Strategy,
    rule: ThresholdRule,
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).round() as usize;
    (0..=k).map(|i| lo + i as f64 * step).collect()
}

fn series_table(
    mode: Mode,
    series: &[Series],
    fixed_snr_db: Option<f64>,
    xs: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Table, CliError> {
    let mut header = vec!["n", "g2_rho", "strategy", "rule"];
    header.extend(ERROR_RATE_COLUMNS);
    let mut t = Table::new(&header);
    for s in series {
        for &x in xs {
            let (snr_db, alpha) = match fixed_snr_db {
                Some(snr) => (snr, x),
                None => (x, 0.0),
            };
            let mut file = link(snr_db, s.g2_rho, s.n);
            file.alpha = alpha;
            let (cfg, alpha) = file.to_system()?;
            let row = error_row(mode, &cfg, alpha, s.strategy, s.rule, trials, seed)?;
            let mut cells = vec![
                s.n.to_string(),
                fmt_num(s.g2_rho),
                format!("{:?}", s.strategy).to_lowercase(),
                format!("{:?}", s.rule).to_lowercase(),
                fmt_num(x),
            ];
            cells.extend(row.cells());
            t.push(cells);
        }
    }
    Ok(t)
}

fn full(n: usize, g2_rho: f64, rule: ThresholdRule) -> Series {
    Series { n, g2_rho, strategy: Strategy::Full, rule }
}

/// Build every table of figure `id` as `(file stem, table)`.
pub fn build(id: &str, trials: u64, seed: u64) -> Result<Vec<(String, Table)>, CliError> {
    let rate = |var: &str, values: &[f64]| -> Result<Table, CliError> {
        let list = values.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(",");
        let spec = SweepSpec::new(Some(&format!("{var}={list}")), rate_defaults(), SweepVar::SnrDb)?;
        Ok(region_table(&spec)?.0)
    };
    let bis = ThresholdRule::Bisection;
    let asy = ThresholdRule::Asymptotic;
    Ok(match id {
        "fig4" => vec![("fig4".into(), rate("g_mag2", &[0.01, 0.1, 1.0])?)],
        "fig5" => vec![
            ("fig5_theta".into(), rate("theta", &[0.0, PI / 4.0, PI / 2.0])?),
            ("fig5_snr".into(), rate("snr_db", &[0.0, 10.0, 20.0, 30.0])?),
        ],
        "fig6" => vec![("fig6".into(), threshold_table(&grid(0.5, 20.0, 0.5))?)],
        "fig7" => {
            let lambdas = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0];
            vec![("fig7".into(), threshold_table(&lambdas)?)]
        }
        "fig8" => {
            let s: Vec<_> = [0.01, 0.05, 0.1].into_iter().map(|g| full(1, g, bis)).collect();
            vec![("fig8".into(), series_table(Mode::SerSync, &s, None, &grid(0.0, 25.0, 1.0), trials, seed)?)]
        }
        "fig9" => {
            let s = [full(2, 0.1, bis), full(4, 0.1, bis), full(4, 0.05, bis)];
            vec![("fig9".into(), series_table(Mode::BerSync, &s, None, &grid(0.0, 25.0, 1.0), trials, seed)?)]
        }
        "fig10" => {
            let s: Vec<_> = [2, 4, 6].into_iter().map(|n| full(n, 0.1, bis)).collect();
            vec![("fig10".into(), series_table(Mode::SerAsync, &s, Some(10.0), &grid(0.0, 0.5, 0.05), trials, seed)?)]
        }
        "fig11" => {
            let s = [
                full(2, 0.1, asy),
                full(3, 0.1, asy),
                full(4, 0.1, asy),
                full(3, 0.1, bis),
                Series { n: 3, g2_rho: 0.1, strategy: Strategy::Truncated, rule: bis },
            ];
            vec![("fig11".into(), series_table(Mode::BerAsync, &s, Some(20.0), &grid(0.0, 0.5, 0.05), trials, seed)?)]
        }
        _ => return Err(CliError::Usage(format!("unknown figure id {id:?}; known: {}", FIGURE_IDS.join(", ")))),
    })
}

pub fn run(a: &FigureArgs) -> Result<(), CliError> {
    let tables = build(&a.id, a.mc.trials, a.mc.seed)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", a.out.display())))?;
    let mut files = Vec::new();
    for (stem, t) in &tables {
        let name = format!("{stem}.csv");
        write_file(&a.out.join(&name), &t.to_csv())?;
        files.push(name);
    }
    let details = json!({
        "id": a.id,
        "files": files,
        "rate_defaults": rate_defaults(),
        "detection_rho": 0.5,
        "ber_async_default_rule": value_name(crate::args::RuleArg::Asymptotic),
    });
    let json = serde_json::to_string_pretty(&Sidecar::new("figure", Some(a.mc.seed), Some(a.mc.trials), details))
        .map_err(|e| CliError::Io(e.to_string()))?;
    write_file(&a.out.join(format!("{}.json", a.id)), &(json + "\n"))
}
