use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::validation(
                "probability",
                format!("{value} is outside [0, 1]"),
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

fn finite(function: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::domain(function, format!("non-finite argument {x}")))
    }
}

/// Standard normal CDF, `N(x) = erfc(-x / sqrt 2) / 2`.
///
/// Unchecked; NaN in, NaN out. Hot loops use this form.
#[inline]
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - N(x)` without cancellation.
#[inline]
pub fn standard_normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

#[inline]
pub fn standard_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn norm_cdf(x: f64) -> Result<Probability> {
    let x = finite("norm_cdf", x)?;
    Ok(Probability(standard_normal_cdf(x)))
}

pub fn norm_sf(x: f64) -> Result<Probability> {
    let x = finite("norm_sf", x)?;
    Ok(Probability(standard_normal_sf(x)))
}

pub fn norm_pdf(x: f64) -> Result<f64> {
    let x = finite("norm_pdf", x)?;
    Ok(standard_normal_pdf(x))
}

pub fn norm_inv_cdf(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(standard_normal_quantile(p))
    } else {
        Err(Error::domain(
            "norm_inv_cdf",
            format!("{p} is outside (0, 1)"),
        ))
    }
}

// Acklam's rational approximation (relative error ~1.15e-9).
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.024_25;

/// Inverse of the standard normal CDF on (0, 1).
///
/// Acklam's approximation followed by one Halley step against the erfc-based
/// CDF, which brings the error down to a few ulps.
pub fn standard_normal_quantile(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return if p == 0.0 {
            f64::NEG_INFINITY
        } else if p == 1.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
    }
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    // Halley refinement; work with the smaller tail to avoid cancellation.
    let e = if x > 0.0 {
        (1.0 - p) - standard_normal_sf(x)
    } else {
        standard_normal_cdf(x) - p
    };
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core_math::{integrate, QuadratureSettings};

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(norm_cdf(0.0).unwrap().value(), 0.5);
    }

    #[test]
    fn cdf_matches_worked_example_rounding() {
        // 3-digit values used in the textbook example
        assert!((norm_cdf(0.0802).unwrap().value() - 0.532).abs() < 5e-4);
        assert!((norm_cdf(-0.0698).unwrap().value() - 0.472).abs() < 5e-4);
    }

    #[test]
    fn cdf_at_five_against_quadrature() {
        // density integrated over (-inf, 0] and [0, 5]
        let s = QuadratureSettings::new(1e-14, 1e-14, 2000).unwrap();
        let left = integrate(standard_normal_pdf, f64::NEG_INFINITY, 0.0, s).unwrap();
        let right = integrate(standard_normal_pdf, 0.0, 5.0, s).unwrap();
        let oracle = left.value + right.value;
        assert!((norm_cdf(5.0).unwrap().value() - oracle).abs() < 1e-12);
        // 40-digit reference: 0.99999971334842812080608832624766712535
        assert!((norm_cdf(5.0).unwrap().value() - 0.999_999_713_348_428_1).abs() < 1e-15);
    }

    #[test]
    fn pdf_values() {
        assert!((norm_pdf(0.0).unwrap() - 0.398_942_280_4).abs() < 1e-10);
        assert_eq!(norm_pdf(1.3).unwrap(), norm_pdf(-1.3).unwrap());
        // 0.24197072451914334979783...
        let p1 = norm_pdf(1.0).unwrap();
        assert!((p1 - 0.241_970_724_519_143_35).abs() < 1e-16);
        let h = 1e-5;
        let fd = (standard_normal_cdf(1.0 + h) - standard_normal_cdf(1.0 - h)) / (2.0 * h);
        assert!((fd - p1).abs() < 1e-9);
    }

    #[test]
    fn non_finite_inputs_are_domain_errors() {
        for x in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            assert!(matches!(norm_cdf(x), Err(Error::Domain { .. })));
            assert!(matches!(norm_pdf(x), Err(Error::Domain { .. })));
        }
        assert!(norm_inv_cdf(0.0).is_err());
        assert!(norm_inv_cdf(1.0).is_err());
    }

    #[test]
    fn probability_bounds() {
        assert!(Probability::new(0.0).is_ok());
        assert!(Probability::new(1.0).is_ok());
        assert!(Probability::new(1.0 + 1e-12).is_err());
        assert!(Probability::new(f64::NAN).is_err());
    }

    // Upper-tail targets are bisected on the survival function so the
    // oracle keeps full resolution near 1.
    fn bisect_quantile(p: f64) -> f64 {
        let upper = p > 0.5;
        let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let below = if upper {
                standard_normal_sf(mid) > 1.0 - p
            } else {
                standard_normal_cdf(mid) < p
            };
            if below {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn quantile_against_bisection() {
        let mut p = 1e-15;
        while p < 1.0 {
            for q in [p, 1.0 - p] {
                if q <= 0.0 || q >= 1.0 {
                    continue;
                }
                let x = standard_normal_quantile(q);
                assert!((x - bisect_quantile(q)).abs() < 1e-9, "p = {q}");
            }
            p *= 1.7;
        }
        for i in 1..1000 {
            let q = i as f64 / 1000.0;
            assert!((standard_normal_quantile(q) - bisect_quantile(q)).abs() < 1e-12);
        }
    }
}
