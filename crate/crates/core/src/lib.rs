//! Computable randomness for finite-alphabet sequences under imprecise
//! forecasting systems.
//!
//! The crate evaluates coherent lower expectations exactly, builds and
//! verifies supermartingale betting strategies, measures the randomness
//! deficiency of data prefixes against forecasting systems, and estimates
//! expectation intervals for gambles along sequences.
//!
//! All model arithmetic uses exact [`Rational`]s. Floating point only
//! appears when reporting logarithms of capital.

pub mod analysis;
pub mod error;
pub mod files;
pub mod forecast;
pub mod lower;
pub mod martingale;
pub mod par;
pub mod rational;
pub mod sequence;
pub mod space;

pub use error::{Error, Result};
pub use forecast::{forecast_at, pointwise_leq, ForecastingSystem, Situation};
pub use lower::{check_coherence, dominates, interval_model, intersect, lower, probe_gambles, upper, IntervalQ, LowerExpectation, Representation};
pub use rational::Rational;
pub use space::{gamble_range, linear_expectation, negate, Gamble, Pmf, SampleSpace};
