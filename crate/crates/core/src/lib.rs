//! Rate region and detection toolkit for the multiplicative multiple-access
//! channel seen by an ambient backscatter receiver.
//!
//! A legacy transmitter sends symbols `x1`; a passive tag multiplies the
//! incident wave by `1 + g sqrt(rho) c(x2)` and the receiver sees
//! `y = sqrt(snr) x1 (1 + g sqrt(rho) c) + z`. The crate provides
//!
//! - [`numerics`]: special functions, quadrature, Marcum Q, bisection,
//! - [`model`]: configuration, constellations and frame synthesis,
//! - [`rate_region`]: mutual informations, TDMA rates, region vertices and the slope test,
//! - [`detector`]: the two-step coherent/noncoherent receiver and a small-N ML oracle,
//! - [`analytics`]: closed forms and bounds for SER and BER, sync and async,
//! - [`simulate`]: seeded, thread-count independent Monte Carlo.

// Argument checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod detector;
pub mod error;
pub mod model;
pub mod numerics;
pub mod rate_region;
pub mod simulate;

pub use analytics::{BoundPair, ThresholdMethod, ThresholdResult, ThresholdRule};
pub use detector::{DetectionResult, Strategy, TwoStepDetector};
pub use error::{Error, Result};
pub use model::{
    db_to_linear, linear_to_db, ConfigFile, Phase, ReceivedFrame, RelativeChannel, SystemConfig, TagConstellation,
    TxModulation,
};
pub use numerics::Tolerance;
pub use rate_region::{RatePoint, RegionVertices, SlopePair, TdmaRates};
pub use simulate::{ErrorEstimate, MiEstimates};
