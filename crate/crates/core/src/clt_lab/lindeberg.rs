use crate::clt_lab::sampling::sample_rows;
use crate::clt_lab::{ArraySpec, IncrementModel};
use crate::parallel::mean_and_variance;
use crate::{Error, Result};

/// Monte Carlo and analytic values of the Lindeberg sum
/// `n E[X^2; |X| > eps]` for one row of a stationary array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindebergEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub analytic: f64,
}

impl LindebergEstimate {
    /// `|estimate - analytic|` in standard errors (0 when both agree exactly).
    pub fn discrepancy(&self) -> f64 {
        let gap = (self.estimate - self.analytic).abs();
        if gap == 0.0 {
            0.0
        } else {
            gap / self.std_error
        }
    }
}

fn check_inputs(model: &IncrementModel, rows: usize, horizon: f64) -> Result<()> {
    model.validate()?;
    if rows == 0 {
        return Err(Error::validation(
            "rows",
            "at least one cell per row is required",
        ));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::validation(
            "horizon",
            format!("{horizon} must be positive and finite"),
        ));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && !epsilon.is_nan() {
        Ok(())
    } else {
        Err(Error::validation(
            "epsilon",
            format!("{epsilon} must be positive"),
        ))
    }
}

/// Exact `n E[X^2; |X| > eps]` with `X` one increment over `t / n`.
pub fn analytic_lindeberg(
    model: &IncrementModel,
    rows: usize,
    horizon: f64,
    epsilon: f64,
) -> Result<f64> {
    check_inputs(model, rows, horizon)?;
    check_epsilon(epsilon)?;
    Ok(rows as f64 * model.tail_second_moment(horizon / rows as f64, epsilon))
}

/// Largest cell second moment `max_i E[X_ni^2] = sigma^2 t / n`; all cells
/// share one law.
pub fn max_cell_variance(model: &IncrementModel, rows: usize, horizon: f64) -> Result<f64> {
    check_inputs(model, rows, horizon)?;
    Ok(model.per_unit_variance() * horizon / rows as f64)
}

/// Estimates the Lindeberg sum by averaging `sum_i X_i^2 1{|X_i| > eps}` over
/// `spec.samples` independently drawn rows of `spec.rows` cells.
pub fn lindeberg_statistic(spec: &ArraySpec, epsilon: f64) -> Result<LindebergEstimate> {
    spec.validate()?;
    check_epsilon(epsilon)?;
    let draws = sample_rows(spec, epsilon);
    Ok(summarize(spec, epsilon, &draws))
}

pub(crate) fn summarize(
    spec: &ArraySpec,
    epsilon: f64,
    draws: &[super::sampling::RowDraw],
) -> LindebergEstimate {
    let (estimate, variance) = mean_and_variance(spec.execution, draws, |d| d.tail);
    LindebergEstimate {
        estimate,
        std_error: (variance / draws.len() as f64).sqrt(),
        analytic: spec.rows as f64 * spec.model.tail_second_moment(spec.cell_width(), epsilon),
    }
}
