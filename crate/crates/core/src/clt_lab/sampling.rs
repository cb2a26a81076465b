use crate::clt_lab::IncrementModel;
use crate::parallel::{map_indexed, Execution};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Samples handed to one work unit.
const SAMPLE_CHUNK: usize = 256;

/// One row of a triangular array, repeated `samples` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArraySpec {
    pub model: IncrementModel,
    /// Horizon `t > 0`.
    pub horizon: f64,
    /// Number of cells `n` in the row.
    pub rows: usize,
    pub samples: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl ArraySpec {
    pub fn new(
        model: IncrementModel,
        horizon: f64,
        rows: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let spec = ArraySpec {
            model,
            horizon,
            rows,
            samples,
            seed,
            execution: Execution::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn execution(self, execution: Execution) -> Self {
        ArraySpec { execution, ..self }
    }

    pub fn with_rows(self, rows: usize) -> Self {
        ArraySpec { rows, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::validation(
                "horizon",
                format!("{} must be positive and finite", self.horizon),
            ));
        }
        if self.rows == 0 {
            return Err(Error::validation(
                "rows",
                "at least one cell per row is required",
            ));
        }
        if self.samples == 0 {
            return Err(Error::validation(
                "samples",
                "at least one sample is required",
            ));
        }
        Ok(())
    }

    /// Length `t / n` of one cell.
    pub fn cell_width(&self) -> f64 {
        self.horizon / self.rows as f64
    }
}

/// A sampled row: its sum and its Lindeberg sum `sum_i X_i^2 1{|X_i| > eps}`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct RowDraw {
    pub sum: f64,
    pub tail: f64,
}

fn draw_row(model: &IncrementModel, rows: usize, h: f64, eps: f64, rng: &mut StreamRng) -> RowDraw {
    if let IncrementModel::TwoPoint { variance } = *model {
        // one random bit per cell
        let s = (variance * h).sqrt();
        let mut ups = 0u64;
        let mut left = rows;
        while left > 0 {
            let word = rng.next_u64();
            let take = left.min(64);
            let bits = if take == 64 {
                word
            } else {
                word & ((1u64 << take) - 1)
            };
            ups += u64::from(bits.count_ones());
            left -= take;
        }
        let tail = if s > eps { rows as f64 * s * s } else { 0.0 };
        return RowDraw {
            sum: s * (2.0 * ups as f64 - rows as f64),
            tail,
        };
    }
    let mut sum = 0.0;
    let mut tail = 0.0;
    for _ in 0..rows {
        let x = model.sample(h, rng);
        sum += x;
        if x.abs() > eps {
            tail += x * x;
        }
    }
    RowDraw { sum, tail }
}

/// Row sums and Lindeberg sums; sample `j` uses stream `j`.
pub(crate) fn sample_rows(spec: &ArraySpec, eps: f64) -> Vec<RowDraw> {
    let model = spec.model;
    let rows = spec.rows;
    let h = spec.cell_width();
    let seed = spec.seed;
    map_indexed(spec.execution, spec.samples, SAMPLE_CHUNK, move |j| {
        let mut rng = StreamRng::new(seed, j);
        draw_row(&model, rows, h, eps, &mut rng)
    })
}

/// `samples` independent draws of `Y_t - Y_0 = sum_i X_ni`.
pub fn sample_row_sum(spec: &ArraySpec) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok(sample_rows(spec, f64::INFINITY)
        .into_iter()
        .map(|r| r.sum)
        .collect())
}

/// The individual cells `X_n1, ..., X_nn` of sample `sample_index`, drawn
/// from the same stream as [`sample_row_sum`].
pub fn sample_cells(spec: &ArraySpec, sample_index: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let h = spec.cell_width();
    let mut rng = StreamRng::new(spec.seed, sample_index);
    if let IncrementModel::TwoPoint { variance } = spec.model {
        let s = (variance * h).sqrt();
        let mut cells = Vec::with_capacity(spec.rows);
        let mut word = 0;
        for i in 0..spec.rows {
            if i % 64 == 0 {
                word = rng.next_u64();
            }
            cells.push(if (word >> (i % 64)) & 1 == 1 { s } else { -s });
        }
        return Ok(cells);
    }
    Ok((0..spec.rows)
        .map(|_| spec.model.sample(h, &mut rng))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(model: IncrementModel, rows: usize, samples: usize) -> ArraySpec {
        ArraySpec::new(model, 1.0, rows, samples, 42).unwrap()
    }

    #[test]
    fn validation() {
        let m = IncrementModel::normal(0.0225).unwrap();
        assert!(ArraySpec::new(m, 0.0, 1, 1, 0).is_err());
        assert!(ArraySpec::new(m, 1.0, 0, 1, 0).is_err());
        assert!(ArraySpec::new(m, 1.0, 1, 0, 0).is_err());
        let bad = ArraySpec {
            model: IncrementModel::Normal { variance: -1.0 },
            ..spec(m, 1, 1)
        };
        assert!(sample_row_sum(&bad).is_err());
    }

    #[test]
    fn single_step_two_point_support() {
        let m = IncrementModel::two_point(0.0225).unwrap();
        let xs = sample_row_sum(&spec(m, 1, 1000)).unwrap();
        assert!(xs.iter().all(|&x| x == 0.15 || x == -0.15));
        assert!(xs.iter().any(|&x| x > 0.0) && xs.iter().any(|&x| x < 0.0));
    }

    #[test]
    fn cells_add_up_to_the_row_sum() {
        for m in [
            IncrementModel::two_point(0.0225).unwrap(),
            IncrementModel::uniform(0.0225).unwrap(),
            IncrementModel::poisson_jump(1.0, 2.0).unwrap(),
        ] {
            for rows in [1, 63, 64, 65, 300] {
                let sp = spec(m, rows, 5);
                let sums = sample_row_sum(&sp).unwrap();
                for (j, &sum) in sums.iter().enumerate() {
                    let cells = sample_cells(&sp, j as u64).unwrap();
                    assert_eq!(cells.len(), rows);
                    let total: f64 = cells.iter().sum();
                    assert!((total - sum).abs() < 1e-12, "{m:?} rows={rows}");
                }
            }
        }
    }

    #[test]
    fn two_point_variance_concentrates() {
        let m = IncrementModel::two_point(0.0225).unwrap();
        let samples = 100_000;
        let xs = sample_row_sum(&spec(m, 4096, samples)).unwrap();
        let mean = xs.iter().sum::<f64>() / samples as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        let tol = 3.0 * (2.0 / samples as f64).sqrt() * 0.0225;
        assert!((var - 0.0225).abs() < tol, "{var}");
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let m = IncrementModel::centered_exponential(0.0225).unwrap();
        let a = sample_row_sum(&spec(m, 50, 3000).execution(Execution::Sequential)).unwrap();
        let b = sample_row_sum(&spec(m, 50, 3000).execution(Execution::Parallel)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_and_last_cells_share_a_law() {
        use crate::clt_lab::ks_two_sample;
        for m in [
            IncrementModel::uniform(0.0225).unwrap(),
            IncrementModel::centered_exponential(0.0225).unwrap(),
            IncrementModel::poisson_jump(0.1, 2.0).unwrap(),
        ] {
            let sp = spec(m, 32, 1);
            let (first, last): (Vec<f64>, Vec<f64>) = (0..4000u64)
                .map(|i| {
                    let cells = sample_cells(&sp, i).unwrap();
                    (cells[0], cells[31])
                })
                .unzip();
            let ks = ks_two_sample(&first, &last).unwrap();
            assert!(ks.passes(), "{:?}: {ks:?}", m.kind());
        }
    }
}
