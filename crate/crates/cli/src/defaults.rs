//! Built-in configurations and config-file loading.

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::Path;

use mmac_core::model::{TagSpec, ThetaSpec};
use mmac_core::{ConfigFile, TxModulation};

use crate::CliError;

/// Rate-region link: SNR 10 dB, rho 0.5, |g|^2 0.1, theta pi/4, N 1, BPSK tag, Gaussian Tx.
pub fn rate_defaults() -> ConfigFile {
    ConfigFile {
        snr_db: 10.0,
        rho: 0.5,
        g_mag2: 0.1,
        theta: ThetaSpec::Radians(FRAC_PI_4),
        n: 1,
        alpha: 0.0,
        tag: TagSpec { c1: [1.0, 0.0], c0: [-1.0, 0.0] },
        tx_modulation: TxModulation::Gaussian,
    }
}

/// Detection link: SNR 10 dB, |g|^2 rho 0.1, uniform phase, N 1, on/off tag, QPSK Tx.
pub fn link_defaults() -> ConfigFile {
    link(10.0, 0.1, 1)
}

/// Detection link with the given SNR, |g|^2 rho and N; rho is fixed at 0.5.
pub fn link(snr_db: f64, g2_rho: f64, n: usize) -> ConfigFile {
    ConfigFile {
        snr_db,
        rho: 0.5,
        g_mag2: g2_rho / 0.5,
        theta: ThetaSpec::Keyword("uniform".into()),
        n,
        alpha: 0.0,
        tag: TagSpec { c1: [1.0, 0.0], c0: [0.0, 0.0] },
        tx_modulation: TxModulation::Qpsk,
    }
}

/// Read `path` when given, otherwise return `fallback`.
pub fn load(path: Option<&Path>, fallback: ConfigFile) -> Result<ConfigFile, CliError> {
    let Some(p) = path else { return Ok(fallback) };
    let text = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
    let cfg: ConfigFile =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", p.display())))?;
    cfg.to_system()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let (r, _) = rate_defaults().to_system().unwrap();
        assert!((r.backscatter_gain() - 0.05).abs() < 1e-15);
        let (l, _) = link_defaults().to_system().unwrap();
        assert!((l.backscatter_gain() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn round_trip_through_json() {
        let c = link(20.0, 0.05, 4);
        let text = serde_json::to_string(&c).unwrap();
        let back: ConfigFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<ConfigFile>(&text.replace("\"rho\"", "\"rh0\"")).is_err());
    }
}
