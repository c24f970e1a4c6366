//! One-variable parameter sweeps over a base configuration.

use std::fmt;

use mmac_core::model::ThetaSpec;
use mmac_core::{ConfigFile, SystemConfig};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    SnrDb,
    GMag2,
    Theta,
    Alpha,
    N,
}

impl SweepVar {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "snr_db" => Self::SnrDb,
            "g_mag2" => Self::GMag2,
            "theta" => Self::Theta,
            "alpha" => Self::Alpha,
            "n" => Self::N,
            _ => return Err(CliError::Usage(format!("unknown sweep variable {s:?}; use snr_db, g_mag2, theta, alpha or n"))),
        })
    }

    fn current(self, base: &ConfigFile) -> f64 {
        match self {
            Self::SnrDb => base.snr_db,
            Self::GMag2 => base.g_mag2,
            Self::Theta => match base.theta {
                ThetaSpec::Radians(t) => t,
                ThetaSpec::Keyword(_) => f64::NAN,
            },
            Self::Alpha => base.alpha,
            Self::N => base.n as f64,
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SnrDb => "snr_db",
            Self::GMag2 => "g_mag2",
            Self::Theta => "theta",
            Self::Alpha => "alpha",
            Self::N => "n",
        })
    }
}

/// A validated sweep; `explicit` is false for the single-point default.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub values: Vec<f64>,
    pub base: ConfigFile,
    pub explicit: bool,
}

/// One evaluated sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub config: SystemConfig,
    pub alpha: f64,
}

impl SweepSpec {
    /// Parse `VAR=v1,v2,...`, or a single point at `default_var` when `arg` is absent.
    pub fn new(arg: Option<&str>, base: ConfigFile, default_var: SweepVar) -> Result<Self, CliError> {
        let Some(arg) = arg else {
            let x = default_var.current(&base);
            return Ok(Self { variable: default_var, values: vec![x], base, explicit: false });
        };
        let (var, list) = arg
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("sweep must look like VAR=v1,v2,..., got {arg:?}")))?;
        let variable = SweepVar::parse(var.trim())?;
        let values = list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad sweep value {v:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let spec = Self { variable, values, base, explicit: true };
        spec.points()?;
        Ok(spec)
    }

    /// The configuration at `x`.
    pub fn config_at(&self, x: f64) -> Result<ConfigFile, CliError> {
        if !x.is_finite() {
            return Err(CliError::Usage(format!("sweep value for {} must be finite, got {x}", self.variable)));
        }
        let mut c = self.base.clone();
        match self.variable {
            SweepVar::SnrDb => c.snr_db = x,
            SweepVar::GMag2 => c.g_mag2 = x,
            SweepVar::Theta => c.theta = ThetaSpec::Radians(x),
            SweepVar::Alpha => c.alpha = x,
            SweepVar::N => {
                if x < 1.0 || x.fract() != 0.0 {
                    return Err(CliError::Usage(format!("n must be a positive integer, got {x}")));
                }
                c.n = x as usize;
            }
        }
        Ok(c)
    }

    /// Every point, validated.
    pub fn points(&self) -> Result<Vec<Point>, CliError> {
        if self.values.is_empty() {
            return Err(CliError::Usage("sweep has no values".into()));
        }
        self.values
            .iter()
            .map(|&x| {
                let (config, alpha) = self.config_at(x)?.to_system()?;
                Ok(Point { x, config, alpha })
            })
            .collect()
    }

    /// `vertex@var=value` for explicit sweeps, the bare vertex otherwise.
    pub fn label(&self, vertex: &str, x: f64) -> String {
        if self.explicit {
            format!("{vertex}@{}={}", self.variable, crate::output::fmt_num(x))
        } else {
            vertex.to_string()
        }
    }
}
