//! Probability-domain assessment of probabilistic forecasts.
//!
//! The crate evaluates forecasts on the probability scale rather than the
//! log scale: information measures are expressed as probabilities
//! (geometric means, generalized means) so that a reported score can be read
//! directly as "the probability the forecast assigned to what happened".
//!
//! Modules:
//!
//! * [`coupled`] - deformed logarithm / exponential pairs and the coupling
//!   algebra relating risk bias, coupling strength, and dimension.
//! * [`metrics`] - information metrics of discrete distributions carried in
//!   the probability domain (average probability, probability-domain
//!   divergence and cross entropy, generalized means, coupled probabilities).
//! * [`quad`] - adaptive Gauss-Kronrod quadrature used for density averages
//!   and normalization checks, including infinite-tail transforms.
//! * [`distributions`] - coupled Gaussian and coupled exponential families
//!   (heavy-tail, Gaussian, compact-support regimes) with closed-form
//!   normalizations, sampling, and generalized density averages.
//! * [`profile`] - risk profiles of forecast sets: the curve of generalized
//!   means of realized-event probabilities over a grid of risk bias, with the
//!   named decisiveness / accuracy / robustness points.
//! * [`bench`] - a synthetic two-class overfitting benchmark sweeping model
//!   dimension, used to compare metric behavior across model mismatch.

#![forbid(unsafe_code)]
// Quadrature node tables and frozen reference constants keep their full
// published digits even where f64 rounds them.
#![allow(clippy::excessive_precision)]

pub mod bench;
pub mod coupled;
pub mod distributions;
pub mod error;
pub mod metrics;
pub mod profile;
pub mod quad;

pub use error::{Error, Result};
