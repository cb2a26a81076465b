//! Empirical laboratory for the central-limit route to normal log-returns.
//!
//! A log-return process with stationary independent increments is cut into a
//! triangular array `X_ni = Y_{ti/n} - Y_{t(i-1)/n}`. Row sums telescope to
//! `Y_t - Y_0`; the Lindeberg condition on the cells decides whether those
//! sums become normal as `n` grows. This module samples such arrays for a
//! handful of increment laws and measures every ingredient: cell variances,
//! the Lindeberg sum, a Kolmogorov-Smirnov distance to the normal limit and
//! the linearity of `Var[Y_t]` in `t`.

mod experiment;
mod ks;
mod lindeberg;
mod model;
mod sampling;
mod variance;

pub use experiment::{run_convergence_experiment, ConvergenceReport, Verdict};
pub use ks::{ks_normal_test, ks_two_sample, KsOutcome, KS_CRITICAL_1PCT, MIN_KS_SAMPLES};
pub use lindeberg::{
    analytic_lindeberg, lindeberg_statistic, max_cell_variance, LindebergEstimate,
};
pub use model::{IncrementModel, ModelKind};
pub use sampling::{sample_cells, sample_row_sum, ArraySpec};
pub use variance::{
    additivity_check, variance_linearity_check, AdditivityCheck, VarianceFit, VariancePoint,
};
