use std::fmt;

use crate::clt_lab::lindeberg::summarize;
use crate::clt_lab::sampling::sample_rows;
use crate::clt_lab::{ks_normal_test, max_cell_variance, ArraySpec};
use crate::rng::derive_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    NormalLimit,
    NonNormalLimit,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NormalLimit => "normal_limit",
            Verdict::NonNormalLimit => "non_normal_limit",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-rung statistics of a convergence experiment. All vectors are indexed
/// like `n_ladder`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub n_ladder: Vec<usize>,
    pub ks_statistics: Vec<f64>,
    /// 1% critical value; the same on every rung since the sample count is fixed.
    pub ks_threshold: f64,
    /// Monte Carlo Lindeberg sums.
    pub lindeberg_values: Vec<f64>,
    pub lindeberg_std_errors: Vec<f64>,
    pub lindeberg_analytic: Vec<f64>,
    pub max_cell_variance: Vec<f64>,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    /// Lindeberg sums fall towards zero: the last value is exactly zero, or
    /// it is below half the first and below a tenth of `sigma^2 t`.
    pub fn lindeberg_vanishing(&self, total_variance: f64) -> bool {
        let (first, last) = match (self.lindeberg_values.first(), self.lindeberg_values.last()) {
            (Some(&f), Some(&l)) => (f, l),
            _ => return false,
        };
        last == 0.0 || (last < 0.5 * first && last < 0.1 * total_variance)
    }
}

/// Samples the array at every `n` in `n_ladder`, tests the row sums against
/// `Normal(0, sigma^2 t)` and records the Lindeberg sums and cell variances.
///
/// `spec.rows` is ignored; rung `n` uses the seed `derive_seed(spec.seed, n)`.
pub fn run_convergence_experiment(
    spec: &ArraySpec,
    n_ladder: &[usize],
    epsilon: f64,
) -> Result<ConvergenceReport> {
    if n_ladder.is_empty() {
        return Err(Error::validation("n_ladder", "ladder must not be empty"));
    }
    if n_ladder.windows(2).any(|w| w[0] >= w[1]) || n_ladder[0] == 0 {
        return Err(Error::validation(
            "n_ladder",
            "ladder must be strictly increasing positive integers",
        ));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::validation(
            "epsilon",
            format!("{epsilon} must be positive"),
        ));
    }
    spec.validate()?;
    let total_variance = spec.model.per_unit_variance() * spec.horizon;
    let limit_sd = total_variance.sqrt();

    let mut report = ConvergenceReport {
        n_ladder: n_ladder.to_vec(),
        ks_statistics: Vec::with_capacity(n_ladder.len()),
        ks_threshold: f64::NAN,
        lindeberg_values: Vec::with_capacity(n_ladder.len()),
        lindeberg_std_errors: Vec::with_capacity(n_ladder.len()),
        lindeberg_analytic: Vec::with_capacity(n_ladder.len()),
        max_cell_variance: Vec::with_capacity(n_ladder.len()),
        verdict: Verdict::Inconclusive,
    };
    for &n in n_ladder {
        let rung = ArraySpec {
            rows: n,
            seed: derive_seed(spec.seed, n as u64),
            ..*spec
        };
        let draws = sample_rows(&rung, epsilon);
        let sums: Vec<f64> = draws.iter().map(|d| d.sum).collect();
        let ks = ks_normal_test(&sums, 0.0, limit_sd)?;
        let lindeberg = summarize(&rung, epsilon, &draws);
        report.ks_statistics.push(ks.statistic);
        report.ks_threshold = ks.threshold;
        report.lindeberg_values.push(lindeberg.estimate);
        report.lindeberg_std_errors.push(lindeberg.std_error);
        report.lindeberg_analytic.push(lindeberg.analytic);
        report
            .max_cell_variance
            .push(max_cell_variance(&spec.model, n, spec.horizon)?);
    }
    let last_ks = *report.ks_statistics.last().expect("non-empty ladder");
    report.verdict = if last_ks >= report.ks_threshold {
        Verdict::NonNormalLimit
    } else if report.lindeberg_vanishing(total_variance) {
        Verdict::NormalLimit
    } else {
        Verdict::Inconclusive
    };
    Ok(report)
}
