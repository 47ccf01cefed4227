//! Position error benchmark for anchor networks with random geometry.
//!
//! The crate covers the exact benchmark for a given set of anchor directions
//! ([`geometry`]), its closed-form distribution conditioned on the number of
//! anchors ([`analytic`]), the distribution of the number of hearable anchors
//! under interference, shadowing, load and frequency reuse
//! ([`localizability`]), a network Monte Carlo used as ground truth
//! ([`simulator`]), a plug-in mutual information estimator ([`infoanalysis`])
//! and the command line front end ([`cli`]).

pub mod analytic;
pub mod cdf;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod infoanalysis;
pub mod localizability;
pub mod quadrature;
pub mod simulator;

pub use error::{Error, Result};
