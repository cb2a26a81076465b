use std::fmt;
use std::str::FromStr;

use crate::core_math::{standard_normal_pdf, standard_normal_sf};
use crate::rng::StreamRng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    TwoPoint,
    Uniform,
    CenteredExponential,
    Normal,
    PoissonJump,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::TwoPoint,
        ModelKind::Uniform,
        ModelKind::CenteredExponential,
        ModelKind::Normal,
        ModelKind::PoissonJump,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::TwoPoint => "two_point",
            ModelKind::Uniform => "uniform",
            ModelKind::CenteredExponential => "centered_exponential",
            ModelKind::Normal => "normal",
            ModelKind::PoissonJump => "poisson_jump",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::validation(
                    "model",
                    format!(
                        "unknown model kind '{s}' (expected one of two_point, uniform, \
                         centered_exponential, normal, poisson_jump)"
                    ),
                )
            })
    }
}

/// Law of one increment `Y_{s+h} - Y_s` of a mean-zero process with
/// stationary independent increments.
///
/// Every model is centred analytically and has variance
/// `per_unit_variance * h` over a step of length `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncrementModel {
    /// `±sqrt(sigma^2 h)` with probability 1/2 each.
    TwoPoint {
        variance: f64,
    },
    /// Uniform on `[-b, b]`, `b = sqrt(3 sigma^2 h)`.
    Uniform {
        variance: f64,
    },
    /// `s (E - 1)` with `E ~ Exp(1)` and `s = sqrt(sigma^2 h)`.
    CenteredExponential {
        variance: f64,
    },
    Normal {
        variance: f64,
    },
    /// Compensated Poisson jumps: `a (N_h - lambda h)`, `N_h ~ Poisson(lambda h)`.
    PoissonJump {
        jump: f64,
        intensity: f64,
    },
}

fn positive(field: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::validation(
            field,
            format!("{v} must be positive and finite"),
        ))
    }
}

impl IncrementModel {
    pub fn two_point(variance: f64) -> Result<Self> {
        Ok(IncrementModel::TwoPoint {
            variance: positive("variance", variance)?,
        })
    }

    pub fn uniform(variance: f64) -> Result<Self> {
        Ok(IncrementModel::Uniform {
            variance: positive("variance", variance)?,
        })
    }

    pub fn centered_exponential(variance: f64) -> Result<Self> {
        Ok(IncrementModel::CenteredExponential {
            variance: positive("variance", variance)?,
        })
    }

    pub fn normal(variance: f64) -> Result<Self> {
        Ok(IncrementModel::Normal {
            variance: positive("variance", variance)?,
        })
    }

    pub fn poisson_jump(jump: f64, intensity: f64) -> Result<Self> {
        if !(jump.is_finite() && jump != 0.0) {
            return Err(Error::validation(
                "jump",
                format!("{jump} must be finite and non-zero"),
            ));
        }
        Ok(IncrementModel::PoissonJump {
            jump,
            intensity: positive("intensity", intensity)?,
        })
    }

    /// Builds a model of `kind` with unit-time variance `variance`; for
    /// `poisson_jump` the intensity is `variance / jump^2`.
    pub fn from_kind(kind: ModelKind, variance: f64, jump: f64) -> Result<Self> {
        match kind {
            ModelKind::TwoPoint => IncrementModel::two_point(variance),
            ModelKind::Uniform => IncrementModel::uniform(variance),
            ModelKind::CenteredExponential => IncrementModel::centered_exponential(variance),
            ModelKind::Normal => IncrementModel::normal(variance),
            ModelKind::PoissonJump => {
                positive("variance", variance)?;
                IncrementModel::poisson_jump(jump, variance / (jump * jump))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            IncrementModel::TwoPoint { variance }
            | IncrementModel::Uniform { variance }
            | IncrementModel::CenteredExponential { variance }
            | IncrementModel::Normal { variance } => positive("variance", variance).map(|_| ()),
            IncrementModel::PoissonJump { jump, intensity } => {
                IncrementModel::poisson_jump(jump, intensity).map(|_| ())
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            IncrementModel::TwoPoint { .. } => ModelKind::TwoPoint,
            IncrementModel::Uniform { .. } => ModelKind::Uniform,
            IncrementModel::CenteredExponential { .. } => ModelKind::CenteredExponential,
            IncrementModel::Normal { .. } => ModelKind::Normal,
            IncrementModel::PoissonJump { .. } => ModelKind::PoissonJump,
        }
    }

    /// `sigma^2 = Var[Y_1 - Y_0]`.
    pub fn per_unit_variance(&self) -> f64 {
        match *self {
            IncrementModel::TwoPoint { variance }
            | IncrementModel::Uniform { variance }
            | IncrementModel::CenteredExponential { variance }
            | IncrementModel::Normal { variance } => variance,
            IncrementModel::PoissonJump { jump, intensity } => jump * jump * intensity,
        }
    }

    pub fn increment_mean(&self, _h: f64) -> f64 {
        0.0
    }

    pub fn increment_variance(&self, h: f64) -> f64 {
        self.per_unit_variance() * h
    }

    /// Half-width of the support of one increment, if bounded.
    pub fn support_radius(&self, h: f64) -> Option<f64> {
        match *self {
            IncrementModel::TwoPoint { variance } => Some((variance * h).sqrt()),
            IncrementModel::Uniform { variance } => Some((3.0 * variance * h).sqrt()),
            _ => None,
        }
    }

    /// Draws one increment over a step of length `h`.
    pub fn sample(&self, h: f64, rng: &mut StreamRng) -> f64 {
        match *self {
            IncrementModel::TwoPoint { variance } => {
                let s = (variance * h).sqrt();
                if rng.next_u64() >> 63 == 1 {
                    s
                } else {
                    -s
                }
            }
            IncrementModel::Uniform { variance } => {
                let b = (3.0 * variance * h).sqrt();
                b * (2.0 * rng.uniform_open() - 1.0)
            }
            IncrementModel::CenteredExponential { variance } => {
                let s = (variance * h).sqrt();
                s * (-rng.uniform_open().ln() - 1.0)
            }
            IncrementModel::Normal { variance } => (variance * h).sqrt() * rng.standard_normal(),
            IncrementModel::PoissonJump { jump, intensity } => {
                let mean = intensity * h;
                jump * (poisson(mean, rng) as f64 - mean)
            }
        }
    }

    /// `E[Z^2; |Z| > eps]` for one increment `Z` over a step of length `h`.
    pub fn tail_second_moment(&self, h: f64, eps: f64) -> f64 {
        match *self {
            IncrementModel::TwoPoint { variance } => {
                let s2 = variance * h;
                if s2.sqrt() > eps {
                    s2
                } else {
                    0.0
                }
            }
            IncrementModel::Uniform { variance } => {
                let b = (3.0 * variance * h).sqrt();
                if b <= eps {
                    0.0
                } else {
                    (b * b * b - eps * eps * eps) / (3.0 * b)
                }
            }
            IncrementModel::CenteredExponential { variance } => {
                // int_u^inf (x-1)^2 e^{-x} dx = (u^2 + 1) e^{-u}
                let s = (variance * h).sqrt();
                let upper = 1.0 + eps / s;
                let lower = 1.0 - eps / s;
                let mut tail = (upper * upper + 1.0) * (-upper).exp();
                if lower > 0.0 {
                    tail += 1.0 - (lower * lower + 1.0) * (-lower).exp();
                }
                s * s * tail
            }
            IncrementModel::Normal { variance } => {
                let s2 = variance * h;
                let c = eps / s2.sqrt();
                2.0 * s2 * (standard_normal_sf(c) + c * standard_normal_pdf(c))
            }
            IncrementModel::PoissonJump { jump, intensity } => {
                poisson_jump_tail(jump, intensity * h, eps)
            }
        }
    }
}

fn poisson_jump_tail(jump: f64, mean: f64, eps: f64) -> f64 {
    let a2 = jump * jump;
    let last = (mean + 40.0 * mean.sqrt() + 50.0).ceil() as u64;
    let ln_mean = mean.ln();
    let mut total = 0.0;
    for k in 0..=last {
        let centred = k as f64 - mean;
        if (jump * centred).abs() <= eps {
            continue;
        }
        let ln_pmf = -mean + k as f64 * ln_mean - libm::lgamma(k as f64 + 1.0);
        total += a2 * centred * centred * ln_pmf.exp();
    }
    total
}

/// Inversion sampler. Means above 32 are split into independent chunks so
/// `e^{-mean}` never underflows.
fn poisson(mean: f64, rng: &mut StreamRng) -> u64 {
    const CHUNK: f64 = 32.0;
    let mut remaining = mean;
    let mut count = 0;
    while remaining > 0.0 {
        let m = remaining.min(CHUNK);
        remaining -= m;
        let u = rng.uniform_open();
        let mut k = 0u64;
        let mut pmf = (-m).exp();
        let mut cdf = pmf;
        while u > cdf && pmf > 0.0 {
            k += 1;
            pmf *= m / k as f64;
            cdf += pmf;
        }
        count += k;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_math::{integrate, QuadratureSettings};

    fn models() -> Vec<IncrementModel> {
        vec![
            IncrementModel::two_point(0.0225).unwrap(),
            IncrementModel::uniform(0.0225).unwrap(),
            IncrementModel::centered_exponential(0.0225).unwrap(),
            IncrementModel::normal(0.0225).unwrap(),
            IncrementModel::poisson_jump(0.3, 0.25).unwrap(),
        ]
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.as_str().parse::<ModelKind>().unwrap(), k);
        }
        assert!(matches!(
            "cauchy".parse::<ModelKind>(),
            Err(Error::Validation { field: "model", .. })
        ));
    }

    #[test]
    fn validation() {
        assert!(IncrementModel::normal(0.0).is_err());
        assert!(IncrementModel::uniform(f64::INFINITY).is_err());
        assert!(IncrementModel::poisson_jump(0.0, 1.0).is_err());
        assert!(IncrementModel::poisson_jump(1.0, -1.0).is_err());
        let p = IncrementModel::from_kind(ModelKind::PoissonJump, 2.0, 1.0).unwrap();
        assert_eq!(
            p,
            IncrementModel::PoissonJump {
                jump: 1.0,
                intensity: 2.0
            }
        );
    }

    #[test]
    fn poisson_variance_is_a_squared_lambda() {
        let m = IncrementModel::poisson_jump(1.5, 2.0).unwrap();
        assert_eq!(m.per_unit_variance(), 4.5);
        assert_eq!(m.increment_variance(0.5), 2.25);
    }

    #[test]
    fn tail_at_zero_threshold_is_full_variance() {
        for m in models() {
            for h in [1.0, 0.1, 1.0 / 64.0] {
                let v = m.tail_second_moment(h, 1e-300);
                assert!(
                    (v - m.increment_variance(h)).abs() < 1e-12 * m.increment_variance(h),
                    "{m:?} h={h}: {v}"
                );
            }
        }
    }

    #[test]
    fn continuous_tails_against_quadrature() {
        let s = QuadratureSettings::new(1e-15, 1e-12, 2000).unwrap();
        let h: f64 = 0.05;
        let eps = 0.02;
        // uniform: density 1/(2b) on [-b, b]
        let b = (3.0 * 0.0225 * h).sqrt();
        let q = 2.0 * integrate(|z| z * z / (2.0 * b), eps, b, s).unwrap().value;
        let m = IncrementModel::uniform(0.0225).unwrap();
        assert!((m.tail_second_moment(h, eps) - q).abs() < 1e-14);
        // normal
        let sd = (0.0225 * h).sqrt();
        let dens = |z: f64| {
            z * z * (-0.5 * (z / sd).powi(2)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
        };
        let q = 2.0 * integrate(dens, eps, f64::INFINITY, s).unwrap().value;
        let m = IncrementModel::normal(0.0225).unwrap();
        assert!((m.tail_second_moment(h, eps) - q).abs() < 1e-14);
        // centred exponential: Z = sd (E - 1), density of Z is e^{-(z/sd + 1)} / sd on z > -sd
        let dens = |z: f64| z * z * (-(z / sd + 1.0)).exp() / sd;
        let q = integrate(dens, eps, f64::INFINITY, s).unwrap().value
            + integrate(dens, -sd, -eps, s).unwrap().value;
        let m = IncrementModel::centered_exponential(0.0225).unwrap();
        assert!((m.tail_second_moment(h, eps) - q).abs() < 1e-14);
    }

    #[test]
    fn normal_tail_reference_values() {
        // scipy: n * tail at eps = 0.01, sigma^2 = 0.0225, t = 1
        let m = IncrementModel::normal(0.0225).unwrap();
        let expect = [
            (100, 0.020_945_604_355_282_095),
            (1000, 0.004_889_240_329_015_427),
        ];
        for (n, v) in expect {
            let got = n as f64 * m.tail_second_moment(1.0 / n as f64, 0.01);
            assert!((got - v).abs() < 1e-14, "n={n}: {got}");
        }
    }

    #[test]
    fn poisson_tail_reference_values() {
        // scipy Poisson sums for a = 1, lambda = 2, t = 1, eps = 0.01
        let m = IncrementModel::poisson_jump(1.0, 2.0).unwrap();
        let expect = [
            (1, 2.0),
            (16, 2.0),
            (256, 1.984_496_594_714_684),
            (4096, 1.999_023_914_220_761_8),
        ];
        for (n, v) in expect {
            let got = n as f64 * m.tail_second_moment(1.0 / n as f64, 0.01);
            assert!((got - v).abs() < 1e-12, "n={n}: {got}");
        }
    }

    #[test]
    fn sample_moments_match_analytic() {
        for m in models() {
            let h = 0.25;
            let mut rng = StreamRng::new(77, 0);
            let n = 400_000;
            let xs: Vec<f64> = (0..n).map(|_| m.sample(h, &mut rng)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let second = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
            let fourth = xs.iter().map(|x| x.powi(4)).sum::<f64>() / n as f64;
            let v = m.increment_variance(h);
            let mean_se = (v / n as f64).sqrt();
            let second_se = ((fourth - second * second) / n as f64).sqrt();
            assert!(mean.abs() < 4.0 * mean_se, "{m:?} mean {mean}");
            assert!(
                (second - v).abs() < 4.0 * second_se,
                "{m:?} second {second} vs {v}"
            );
        }
    }

    #[test]
    fn poisson_sampler_large_mean() {
        let mut rng = StreamRng::new(5, 5);
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|_| poisson(1000.0, &mut rng) as f64).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 1000.0).abs() < 4.0 * (1000.0 / n as f64).sqrt());
    }

    #[test]
    fn bounded_support() {
        let m = IncrementModel::uniform(0.0225).unwrap();
        let r = m.support_radius(0.01).unwrap();
        let mut rng = StreamRng::new(1, 2);
        for _ in 0..10_000 {
            assert!(m.sample(0.01, &mut rng).abs() <= r);
        }
        assert_eq!(m.tail_second_moment(0.01, r), 0.0);
        assert!(IncrementModel::normal(1.0)
            .unwrap()
            .support_radius(1.0)
            .is_none());
    }
}
