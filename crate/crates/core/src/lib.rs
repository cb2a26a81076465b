//! Black-Scholes European call pricing and an empirical laboratory for the
//! central-limit route to log-normal returns.
//!
//! The crate is organised bottom-up:
//!
//! * [`core_math`]: normal CDF/PDF/quantile and an adaptive quadrature used as
//!   an independent oracle for every closed form.
//! * [`pricing`]: the closed-form call price, the lognormal payoff
//!   expectation and the no-arbitrage inputs that connect them.
//! * [`lattice_mc`]: a Cox-Ross-Rubinstein tree and a Monte Carlo engine that
//!   must converge to the closed form.
//! * [`clt_lab`]: triangular arrays of stationary independent increments,
//!   Lindeberg statistics, Kolmogorov-Smirnov normality tests and a
//!   variance-linearity fit.
//! * [`cli`]: argument parsing, dispatch and JSON/CSV/text reports.
//!
//! Stochastic routines are deterministic functions of their seed. Work is
//! spread over rayon when the `parallel` feature is enabled (the default);
//! results do not depend on the number of threads.

pub mod cli;
pub mod clt_lab;
pub mod core_math;
mod error;
pub mod lattice_mc;
pub mod parallel;
pub mod pricing;
pub mod rng;

pub use error::{Error, Result};
pub use parallel::Execution;
