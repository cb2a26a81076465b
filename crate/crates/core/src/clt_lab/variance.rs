use crate::clt_lab::sampling::sample_rows;
use crate::clt_lab::{ArraySpec, IncrementModel};
use crate::parallel::{block_sum, mean_and_variance, Execution};
use crate::rng::derive_seed;
use crate::{Error, Result};

/// Simulated `Var[Y_t - Y_0]` at one horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePoint {
    pub horizon: f64,
    pub variance: f64,
    /// Standard error of the sample variance (fourth-moment based).
    pub std_error: f64,
}

/// Least-squares line `variance ~ intercept + slope * horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub slope_std_error: f64,
    pub intercept_std_error: f64,
    pub points: Vec<VariancePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditivityCheck {
    /// `Var^[Y_{s+t}]`.
    pub combined: VariancePoint,
    /// `Var^[Y_s]` and `Var^[Y_t']` from independent simulations.
    pub first: VariancePoint,
    pub second: VariancePoint,
    /// `combined - (first + second)`.
    pub difference: f64,
    pub std_error: f64,
}

impl AdditivityCheck {
    pub fn z_score(&self) -> f64 {
        self.difference / self.std_error
    }
}

fn estimate_point(spec: &ArraySpec) -> VariancePoint {
    let draws = sample_rows(spec, f64::INFINITY);
    let m = draws.len() as f64;
    let (mean, variance) = mean_and_variance(spec.execution, &draws, |d| d.sum);
    let fourth = block_sum(spec.execution, &draws, |d| (d.sum - mean).powi(4)) / m;
    // Var(s^2) ~ (mu4 - sigma^4 (m - 3) / (m - 1)) / m
    let var_of_var = ((fourth - variance * variance * (m - 3.0) / (m - 1.0)) / m).max(0.0);
    VariancePoint {
        horizon: spec.horizon,
        variance,
        std_error: var_of_var.sqrt(),
    }
}

fn point_spec(
    model: &IncrementModel,
    horizon: f64,
    rows: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<ArraySpec> {
    if samples < 2 {
        return Err(Error::validation(
            "samples",
            "at least 2 samples are needed for a variance",
        ));
    }
    Ok(ArraySpec::new(*model, horizon, rows, samples, seed)?.execution(exec))
}

/// Simulates `Var[Y_t - Y_0]` at each horizon (`rows` cells per path, an
/// independent seed per horizon) and fits a line in `t`.
pub fn variance_linearity_check(
    model: &IncrementModel,
    horizons: &[f64],
    rows: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<VarianceFit> {
    if horizons.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::validation(
            "horizons",
            "every horizon must be positive and finite",
        ));
    }
    let mut distinct = horizons.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::validation(
            "horizons",
            "at least 3 distinct horizons are required",
        ));
    }
    let points = horizons
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            point_spec(model, t, rows, samples, derive_seed(seed, i as u64), exec)
                .map(|s| estimate_point(&s))
        })
        .collect::<Result<Vec<_>>>()?;

    let k = points.len() as f64;
    let t_mean = points.iter().map(|p| p.horizon).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.horizon - t_mean).powi(2)).sum();
    // slope = sum w_i v_i, intercept = sum c_i v_i
    let w: Vec<f64> = points.iter().map(|p| (p.horizon - t_mean) / sxx).collect();
    let c: Vec<f64> = w.iter().map(|wi| 1.0 / k - t_mean * wi).collect();
    let slope: f64 = w.iter().zip(&points).map(|(wi, p)| wi * p.variance).sum();
    let intercept: f64 = c.iter().zip(&points).map(|(ci, p)| ci * p.variance).sum();
    let slope_var: f64 = w
        .iter()
        .zip(&points)
        .map(|(wi, p)| (wi * p.std_error).powi(2))
        .sum();
    let intercept_var: f64 = c
        .iter()
        .zip(&points)
        .map(|(ci, p)| (ci * p.std_error).powi(2))
        .sum();
    let max_residual = points
        .iter()
        .map(|p| (p.variance - intercept - slope * p.horizon).abs())
        .fold(0.0, f64::max);
    Ok(VarianceFit {
        slope,
        intercept,
        max_residual,
        slope_std_error: slope_var.sqrt(),
        intercept_std_error: intercept_var.sqrt(),
        points,
    })
}

/// Compares `Var^[Y_{s+t}]` with `Var^[Y_s] + Var^[Y_t']`, all three from
/// independent simulations.
pub fn additivity_check(
    model: &IncrementModel,
    s: f64,
    t: f64,
    rows: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<AdditivityCheck> {
    let combined = estimate_point(&point_spec(
        model,
        s + t,
        rows,
        samples,
        derive_seed(seed, 0),
        exec,
    )?);
    let first = estimate_point(&point_spec(
        model,
        s,
        rows,
        samples,
        derive_seed(seed, 1),
        exec,
    )?);
    let second = estimate_point(&point_spec(
        model,
        t,
        rows,
        samples,
        derive_seed(seed, 2),
        exec,
    )?);
    Ok(AdditivityCheck {
        combined,
        first,
        second,
        difference: combined.variance - first.variance - second.variance,
        std_error: (combined.std_error.powi(2)
            + first.std_error.powi(2)
            + second.std_error.powi(2))
        .sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HORIZONS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

    #[test]
    fn rejects_too_few_horizons() {
        let m = IncrementModel::normal(0.0225).unwrap();
        let e = Execution::default();
        assert!(variance_linearity_check(&m, &[1.0, 2.0], 8, 100, 0, e).is_err());
        assert!(variance_linearity_check(&m, &[1.0, 1.0, 2.0], 8, 100, 0, e).is_err());
        assert!(variance_linearity_check(&m, &[1.0, -1.0, 2.0], 8, 100, 0, e).is_err());
        assert!(variance_linearity_check(&m, &HORIZONS, 8, 1, 0, e).is_err());
    }

    #[test]
    fn slope_and_intercept_for_each_model() {
        for m in [
            IncrementModel::normal(0.0225).unwrap(),
            IncrementModel::two_point(0.0225).unwrap(),
            IncrementModel::uniform(0.0225).unwrap(),
            IncrementModel::centered_exponential(0.0225).unwrap(),
        ] {
            let fit = variance_linearity_check(&m, &HORIZONS, 16, 40_000, 17, Execution::default())
                .unwrap();
            assert!(
                (fit.slope - 0.0225).abs() < 3.0 * fit.slope_std_error,
                "{m:?} {fit:?}"
            );
            assert!(
                fit.intercept.abs() < 3.0 * fit.intercept_std_error,
                "{m:?} {fit:?}"
            );
            assert_eq!(fit.points.len(), 4);
        }
    }

    #[test]
    fn additivity_holds() {
        let m = IncrementModel::normal(0.0225).unwrap();
        let a = additivity_check(&m, 0.5, 0.5, 16, 40_000, 3, Execution::default()).unwrap();
        assert!(a.z_score().abs() < 3.0, "{a:?}");
    }

    #[test]
    fn variance_standard_error_matches_normal_theory() {
        // for normal data Var(s^2) = 2 sigma^4 / (m - 1)
        let m = IncrementModel::normal(1.0).unwrap();
        let spec = ArraySpec::new(m, 1.0, 1, 100_000, 2).unwrap();
        let p = estimate_point(&spec);
        let theory = (2.0 / 99_999.0f64).sqrt();
        assert!((p.std_error / theory - 1.0).abs() < 0.05);
    }
}
