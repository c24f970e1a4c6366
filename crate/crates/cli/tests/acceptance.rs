//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown:
//! `cargo test -p mmac-cli --test acceptance`. The process exits with status
//! 1 when any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use mmac_core::analytics::{
    ber_x2_asymptotic, ber_x2_bounds_sync, ser_x1_async, ser_x1_bounds_sync, ser_x1_sync, threshold_lambda,
    threshold_tolerance,
};
use mmac_core::rate_region::{
    convexity_slopes, rate_tag_given_tx, rate_tag_lower_bound, region_vertices, sum_rate_exact, sum_rate_lower_bound,
    tdma_rates,
};
use mmac_core::simulate::{run_ber_x2, run_mi_estimates, run_ser_x1, run_ser_x1_vs_ml, with_threads};
use mmac_core::{db_to_linear, Phase, RelativeChannel, Strategy, SystemConfig, TagConstellation, TxModulation};

const TRIALS: u64 = 1_000_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn link(snr_db: f64, gr: f64, n: usize) -> SystemConfig {
    SystemConfig {
        snr: db_to_linear(snr_db),
        rho: 0.5,
        channel: RelativeChannel { magnitude: (gr / 0.5).sqrt(), phase: Phase::Uniform },
        n,
        tag: TagConstellation::on_off(),
        tx_modulation: TxModulation::Qpsk,
    }
}

fn rate(snr_db: f64, g2: f64, theta: f64, n: usize) -> SystemConfig {
    SystemConfig {
        snr: db_to_linear(snr_db),
        rho: 0.5,
        channel: RelativeChannel { magnitude: g2.sqrt(), phase: Phase::Fixed(theta) },
        n,
        tag: TagConstellation::bpsk(),
        tx_modulation: TxModulation::Gaussian,
    }
}

/// Binomial standard error at probability `p` over `n` trials.
fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn c1_threshold_table() -> Outcome {
    let tol = threshold_tolerance();
    let mut ok = true;
    let mut d = Vec::new();
    for (l, want) in [(1.0, 2.25), (10.0, 4.71), (20.0, 7.38)] {
        let t = threshold_lambda(l, &tol).unwrap().threshold;
        ok &= (t - want).abs() <= 0.01;
        d.push(format!("L({l})={t:.4} vs {want}"));
    }
    outcome(ok, d.join(", "))
}

fn c2_asymptotic_threshold() -> Outcome {
    let tol = threshold_tolerance();
    let mut ok = true;
    let mut d = Vec::new();
    for l in [10.0, 20.0, 50.0, 100.0] {
        let t = threshold_lambda(l, &tol).unwrap().threshold;
        let dev = (t * 4.0 / l - 1.0).abs();
        ok &= dev < 0.05;
        d.push(format!("lambda={l}: |4L/lambda-1|={dev:.4}"));
    }
    outcome(ok, d.join(", "))
}

fn c3_ser_vs_mc() -> Outcome {
    let mut ok = true;
    let mut d = Vec::new();
    for snr in [0.0, 5.0, 10.0, 15.0] {
        let c = link(snr, 0.1, 1);
        let p = ser_x1_sync(&c).unwrap();
        let e = run_ser_x1(&c, 0.0, TRIALS, 3).unwrap();
        let z = (e.rate - p) / sigma(p, e.trials);
        ok &= z.abs() <= 3.0;
        d.push(format!("{snr}dB z={z:.2}"));
    }
    outcome(ok, d.join(", "))
}

fn c4_bound_sandwich() -> Outcome {
    let mut fails = Vec::new();
    let (mut checked, mut skipped, mut strict_out) = (0, 0, 0);
    for snr_i in 0..=25 {
        let snr = snr_i as f64;
        for gr in [0.01, 0.05, 0.1] {
            for n in [1, 2, 4] {
                let c = link(snr, gr, n);
                let p1 = ser_x1_sync(&c).unwrap();
                let b1 = ser_x1_bounds_sync(&c).unwrap();
                if !(b1.lower <= p1 && p1 <= b1.upper) {
                    fails.push(format!("SER {snr}dB gr={gr} N={n}"));
                }
                let b2 = ber_x2_bounds_sync(&c).unwrap();
                if b2.lower > b2.upper {
                    fails.push(format!("P2 order {snr}dB gr={gr} N={n}"));
                }
                let e = run_ber_x2(&c, 0.0, Strategy::Full, TRIALS, 4).unwrap();
                if e.rate < 10.0 / TRIALS as f64 {
                    skipped += 1;
                    continue;
                }
                checked += 1;
                strict_out += !(b2.lower <= e.rate && e.rate <= b2.upper) as usize;
                if !b2.contains(e.rate, 3.0 * e.std_error()) {
                    fails.push(format!("BER {snr}dB gr={gr} N={n}: {:.4e} not in [{:.4e},{:.4e}]", e.rate, b2.lower, b2.upper));
                }
            }
        }
    }
    let detail = format!(
        "{checked} MC points checked, {skipped} below 10/trials, {strict_out} outside without sampling slack; failures: {}",
        if fails.is_empty() { "none".to_string() } else { fails.join("; ") }
    );
    outcome(fails.is_empty(), detail)
}

fn c5_bound_ratio() -> Outcome {
    let mut ok = true;
    let mut d = Vec::new();
    for (gr, want) in [(0.1, 1.5e5), (0.01, 40.0)] {
        let b = ser_x1_bounds_sync(&link(15.0, gr, 1)).unwrap();
        let r = b.upper / b.lower;
        ok &= rel(r, want) <= 0.2;
        d.push(format!("gr={gr}: UB/LB={r:.4e} vs {want:.1e}"));
    }
    outcome(ok, d.join(", "))
}

fn c6_async_ser() -> Outcome {
    let mut ok = true;
    let mut d = Vec::new();
    for (n, alpha, want) in [(2, 0.0, 9.8e-3), (2, 0.5, 8.4e-3), (6, 0.5, 9.35e-3)] {
        let c = link(10.0, 0.1, n);
        let p = ser_x1_async(&c, alpha).unwrap();
        ok &= rel(p, want) <= 0.05;
        let e = run_ser_x1(&c, alpha, TRIALS, 6).unwrap();
        let z = (e.rate - p) / sigma(p, e.trials);
        ok &= z.abs() <= 3.0;
        d.push(format!("N={n} a={alpha}: {p:.4e} vs {want:.2e}, MC z={z:.2}"));
    }
    let mut mono = true;
    for n in 1..=6 {
        // alpha enters as alpha and 1 - alpha, so [0, 1/2] covers every offset.
        let c = link(10.0, 0.1, n);
        let v: Vec<f64> = (0..=10).map(|i| ser_x1_async(&c, i as f64 * 0.05).unwrap()).collect();
        mono &= v.windows(2).all(|w| w[1] <= w[0]);
    }
    ok &= mono;
    d.push(format!("monotone in alpha: {mono}"));
    outcome(ok, d.join(", "))
}

fn c7_ber_scaling() -> Outcome {
    let b = |gr, n| ber_x2_asymptotic(&link(20.0, gr, n)).unwrap();
    let r_n = b(0.1, 2) / b(0.1, 4);
    let r_g = b(0.05, 4) / b(0.1, 4);
    let inside = |r: f64| (50.0..=200.0).contains(&r);
    outcome(inside(r_n) && inside(r_g), format!("N=2/N=4: {r_n:.1}, gr 0.05/0.1: {r_g:.1}"))
}

fn c8_convexity() -> Outcome {
    let mut ok = true;
    let mut areas_snr = Vec::new();
    for i in 0..=6 {
        let c = rate(5.0 * i as f64, 0.1, PI / 4.0, 1);
        ok &= convexity_slopes(&c).unwrap().strictly_convex();
        areas_snr.push(region_vertices(&c).unwrap().area());
    }
    let mut areas_g = Vec::new();
    for g2 in [0.01, 0.1, 0.5, 1.0] {
        let c = rate(10.0, g2, PI / 4.0, 1);
        ok &= convexity_slopes(&c).unwrap().strictly_convex();
        areas_g.push(region_vertices(&c).unwrap().area());
    }
    let inc = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    ok &= inc(&areas_snr) && inc(&areas_g);
    outcome(
        ok,
        format!(
            "areas vs SNR {:?}, vs |g|^2 {:?}",
            areas_snr.iter().map(|a| format!("{a:.3}")).collect::<Vec<_>>(),
            areas_g.iter().map(|a| format!("{a:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn c9_information_ordering() -> Outcome {
    let mut fails = Vec::new();
    let mut points = 0;
    for snr in [0.0, 10.0, 20.0, 30.0] {
        for g2 in [0.01, 0.1, 1.0] {
            for theta in [0.0, PI / 4.0, PI / 2.0] {
                for n in [1, 2] {
                    let c = rate(snr, g2, theta, n);
                    let lo = rate_tag_lower_bound(&c).unwrap();
                    let mid = rate_tag_given_tx(&c).unwrap();
                    let hi = tdma_rates(&c).unwrap().r2_upper;
                    let (s_lo, s) = (sum_rate_lower_bound(&c).unwrap(), sum_rate_exact(&c).unwrap());
                    points += 1;
                    if !(lo <= mid + 1e-9 && mid <= hi + 1e-9 && s_lo <= s + 1e-9) {
                        fails.push(format!("{snr}dB g2={g2} th={theta:.3} N={n}"));
                    }
                }
            }
        }
    }
    let mut jensen = 0.0f64;
    for snr in [0.0, 10.0, 20.0, 30.0] {
        let c = rate(snr, 0.1, PI / 2.0, 1);
        jensen = jensen.max((sum_rate_exact(&c).unwrap() - sum_rate_lower_bound(&c).unwrap()).abs());
    }
    let mut mc_gap = 0.0f64;
    for c in [rate(10.0, 0.1, PI / 4.0, 1), rate(0.0, 0.5, 0.0, 1), rate(20.0, 1.0, PI / 4.0, 2)] {
        let m = run_mi_estimates(&c, TRIALS, 9).unwrap();
        mc_gap = mc_gap.max((m.sum_rate - sum_rate_exact(&c).unwrap()).abs());
        mc_gap = mc_gap.max((m.tag_mi - rate_tag_given_tx(&c).unwrap()).abs());
    }
    let ok = fails.is_empty() && jensen < 1e-6 && mc_gap <= 0.02;
    outcome(
        ok,
        format!(
            "{points} grid points, ordering failures: {}; Jensen gap {jensen:.2e}; max MC gap {mc_gap:.4} bits",
            if fails.is_empty() { "none".to_string() } else { fails.join("; ") }
        ),
    )
}

fn c10_ml_oracle() -> Outcome {
    let frames = 100_000;
    let (two, ml) = run_ser_x1_vs_ml(&link(15.0, 0.01, 2), frames, 10).unwrap();
    let ok = (two.rate - ml.rate).abs() <= 0.1 * ml.rate;
    let (two5, ml5) = run_ser_x1_vs_ml(&link(5.0, 0.01, 2), frames, 10).unwrap();
    outcome(
        ok,
        format!(
            "15dB: two-step {} / ML {} errors in {} symbols; reference at 5dB: {:.4e} vs {:.4e}",
            two.errors, ml.errors, two.trials, two5.rate, ml5.rate
        ),
    )
}

fn out_dir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&d).unwrap();
    d
}

/// Run the binary and return the CSV and sidecar bytes.
fn cli_run(args: &[&str], threads: &str, tag: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let out = out_dir().join(format!("{tag}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_mmac"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .env("MMAC_THREADS", threads)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("{args:?} exited with {status}"));
    }
    let csv = std::fs::read(&out).map_err(|e| e.to_string())?;
    let json = std::fs::read(out.with_extension("json")).map_err(|e| e.to_string())?;
    Ok((csv, json))
}

fn c11_determinism() -> Outcome {
    let runs: [&[&str]; 5] = [
        &["error-rates", "--mode", "ser-sync", "--sweep", "snr_db=0,5,10,15", "--trials", "1e6", "--seed", "3"],
        &["error-rates", "--mode", "ser-async", "--config", "", "--sweep", "alpha=0,0.5", "--trials", "1e6", "--seed", "6"],
        &["error-rates", "--mode", "ber-sync", "--sweep", "snr_db=0,5,10,15,20,25", "--trials", "1e6", "--seed", "4"],
        &["error-rates", "--mode", "ber-async", "--sweep", "alpha=0,0.25,0.5", "--trials", "1e6", "--seed", "7"],
        &["mi", "--trials", "1e6", "--seed", "9"],
    ];
    let cfg_path = out_dir().join("async_n2.json");
    let cfg = serde_json::json!({
        "snr_db": 10.0, "rho": 0.5, "g_mag2": 0.2, "theta": "uniform", "n": 2,
        "tag": { "c1": [1.0, 0.0], "c0": [0.0, 0.0] }, "tx_modulation": "QPSK"
    });
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let mut ok = true;
    let mut d = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let args: Vec<&str> =
            run.iter().map(|a| if a.is_empty() { cfg_path.to_str().unwrap() } else { a }).collect();
        let a = cli_run(&args, "1", &format!("det{i}_a"));
        let b = cli_run(&args, "4", &format!("det{i}_b"));
        let same = matches!((&a, &b), (Ok(x), Ok(y)) if x == y);
        if let Err(e) = a.as_ref().and(b.as_ref()) {
            d.push(format!("run {i}: {e}"));
        }
        ok &= same;
        d.push(format!("run {i} identical: {same}"));
    }
    let c = link(15.0, 0.01, 2);
    let one = with_threads(1, || run_ser_x1_vs_ml(&c, 20_000, 10).unwrap()).unwrap();
    let four = with_threads(4, || run_ser_x1_vs_ml(&c, 20_000, 10).unwrap()).unwrap();
    ok &= one == four;
    d.push(format!("ML pairing identical: {}", one == four));
    outcome(ok, d.join(", "))
}

/// Id, name, time budget and check.
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "threshold table", Duration::from_secs(1), c1_threshold_table),
        (2, "asymptotic threshold", Duration::from_secs(1), c2_asymptotic_threshold),
        (3, "SER analytic vs MC", Duration::from_secs(60), c3_ser_vs_mc),
        (4, "bound sandwich", Duration::from_secs(600), c4_bound_sandwich),
        (5, "bound-ratio anchor", Duration::from_secs(1), c5_bound_ratio),
        (6, "async SER anchors", Duration::from_secs(121), c6_async_ser),
        (7, "BER scaling anchors", Duration::from_secs(1), c7_ber_scaling),
        (8, "rate-region convexity", Duration::from_secs(10), c8_convexity),
        (9, "information ordering", Duration::from_secs(300), c9_information_ordering),
        (10, "detector vs ML oracle", Duration::from_secs(300), c10_ml_oracle),
        (11, "determinism", Duration::from_secs(600), c11_determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        println!(
            "criterion {id:>2} {} {name} ({:.2}s, budget {}s): {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
