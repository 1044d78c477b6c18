//! Numerical laboratory for dying channels: block-fading links whose
//! transmission is cut off at a random attack time.
//!
//! The crate covers single-channel outage (Monte Carlo, bounds and high-SNR
//! approximations), outage-minimising power allocation by small convex
//! programs, and the asymptotic outage behaviour of many parallel dying
//! sub-channels with independent or m-dependent attacks.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analytic;
mod barrier;
pub mod channel;
pub mod cli;
pub mod copula;
pub mod error;
pub mod montecarlo;
pub mod parallel;
pub mod power;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
