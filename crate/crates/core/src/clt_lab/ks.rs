//! Kolmogorov-Smirnov distances.

use crate::core_math::standard_normal_cdf;
use crate::{Error, Result};

/// Asymptotic 1% critical value of `sqrt(m) D`.
pub const KS_CRITICAL_1PCT: f64 = 1.628;

/// Below this sample size the asymptotic critical value is not trusted.
pub const MIN_KS_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    /// 1% critical value for this sample size.
    pub threshold: f64,
    pub samples: usize,
}

impl KsOutcome {
    /// Statistic strictly below the 1% critical value.
    pub fn passes(&self) -> bool {
        self.statistic < self.threshold
    }
}

/// `sup_x |F_m(x) - cdf(x)|` over sorted data, checking both sides of every
/// jump. Tied values are treated as one jump.
fn sup_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let m = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max(f - i as f64 / m).max(j as f64 / m - f);
        i = j;
    }
    d
}

fn sorted_copy(samples: &[f64], name: &'static str) -> Result<Vec<f64>> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientData {
            got: samples.len(),
            need: MIN_KS_SAMPLES,
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain(name, "samples must be finite"));
    }
    let mut v = samples.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// One-sample test of `samples` against `Normal(mean, std_dev^2)`.
pub fn ks_normal_test(samples: &[f64], mean: f64, std_dev: f64) -> Result<KsOutcome> {
    if !(std_dev > 0.0 && std_dev.is_finite()) || !mean.is_finite() {
        return Err(Error::domain(
            "ks_normal_test",
            format!("need finite mean and std_dev > 0, got ({mean}, {std_dev})"),
        ));
    }
    let sorted = sorted_copy(samples, "ks_normal_test")?;
    let statistic = sup_distance(&sorted, |x| standard_normal_cdf((x - mean) / std_dev));
    Ok(KsOutcome {
        statistic,
        threshold: KS_CRITICAL_1PCT / (sorted.len() as f64).sqrt(),
        samples: sorted.len(),
    })
}

/// Two-sample statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsOutcome> {
    let a = sorted_copy(a, "ks_two_sample")?;
    let b = sorted_copy(b, "ks_two_sample")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsOutcome {
        statistic: d,
        threshold: KS_CRITICAL_1PCT * ((na + nb) / (na * nb)).sqrt(),
        samples: a.len() + b.len(),
    })
}
