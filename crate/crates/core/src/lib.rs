//! Performance engine for dual-hop THz-RF decode-and-forward relay links over
//! α-μ fading with pointing errors.
//!
//! - [`specfun`]: gamma family, ₂F̃₁, univariate and bivariate Meijer G.
//! - [`channels`]: fading and pointing-error laws, SNR distributions, link budgets.
//! - [`analytic`]: closed-form outage, average SNR and ergodic-capacity bound.
//! - [`oracle`]: seeded Monte Carlo and adaptive quadrature ground truth.

pub mod analytic;
pub mod channels;
pub mod error;
pub mod oracle;
pub mod specfun;

pub use error::{Error, Result};
