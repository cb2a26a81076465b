use std::collections::BTreeMap;

use crate::parallel::{map_indexed, mean_and_variance, Execution};
use crate::pricing::{d_plus_minus, risk_neutral_params, OptionSpec, PriceResult, PricingMethod};
use crate::rng::StreamRng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub paths: usize,
    pub seed: u64,
    /// Paths per work unit. Does not affect the result.
    pub batch_size: usize,
    pub execution: Execution,
}

impl McConfig {
    pub fn new(paths: usize, seed: u64, batch_size: usize) -> Result<Self> {
        let cfg = McConfig {
            paths,
            seed,
            batch_size,
            execution: Execution::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `paths` paths with the default batch size.
    pub fn with_paths(paths: usize, seed: u64) -> Result<Self> {
        McConfig::new(paths, seed, paths.clamp(1, 4096))
    }

    pub fn execution(self, execution: Execution) -> Self {
        McConfig { execution, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(Error::validation(
                "paths",
                "at least 2 paths are needed for a standard error",
            ));
        }
        if self.batch_size == 0 || self.batch_size > self.paths {
            return Err(Error::validation(
                "batch_size",
                format!(
                    "{} must lie in [1, paths = {}]",
                    self.batch_size, self.paths
                ),
            ));
        }
        Ok(())
    }
}

/// Standard normal draws, path `i` on stream `i`.
fn normal_draws(cfg: &McConfig) -> Vec<f64> {
    let seed = cfg.seed;
    map_indexed(cfg.execution, cfg.paths, cfg.batch_size, move |i| {
        StreamRng::new(seed, i).standard_normal()
    })
}

/// Monte Carlo estimate of `e^{-rt} E[max(X_0 e^Y - K, 0)]` with `Y` drawn
/// from the risk-neutral normal law.
pub fn mc_price(spec: &OptionSpec, cfg: &McConfig) -> Result<PriceResult> {
    spec.validate()?;
    cfg.validate()?;
    let mut detail = BTreeMap::new();
    detail.insert("paths".to_string(), cfg.paths as f64);
    if spec.total_volatility() == 0.0 {
        return Ok(PriceResult {
            price: spec.intrinsic_forward_value(),
            d_plus: None,
            d_minus: None,
            method: PricingMethod::MonteCarlo,
            std_error: Some(0.0),
            detail,
        });
    }
    let law = risk_neutral_params(spec)?;
    let discount = spec.discount_factor();
    let draws = normal_draws(cfg);
    let (mean, variance) = mean_and_variance(cfg.execution, &draws, |z| {
        let terminal = spec.spot * (law.mean + law.std_dev * z).exp();
        discount * (terminal - spec.strike).max(0.0)
    });
    let (d_plus, d_minus) = d_plus_minus(spec)?;
    Ok(PriceResult {
        price: mean,
        d_plus: Some(d_plus),
        d_minus: Some(d_minus),
        method: PricingMethod::MonteCarlo,
        std_error: Some((variance / cfg.paths as f64).sqrt()),
        detail,
    })
}

/// Simulated `E[X_t] / (X_0 e^{rt})`, which forward pricing requires to be 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardCheck {
    pub ratio: f64,
    pub std_error: f64,
}

impl ForwardCheck {
    /// Distance from 1 in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.std_error == 0.0 {
            if self.ratio == 1.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.ratio - 1.0) / self.std_error
        }
    }
}

pub fn mc_forward_check(spec: &OptionSpec, cfg: &McConfig) -> Result<ForwardCheck> {
    spec.validate()?;
    cfg.validate()?;
    if spec.total_volatility() == 0.0 {
        return Ok(ForwardCheck {
            ratio: 1.0,
            std_error: 0.0,
        });
    }
    let law = risk_neutral_params(spec)?;
    let drift = law.mean - spec.rate * spec.expiry;
    let draws = normal_draws(cfg);
    let (mean, variance) =
        mean_and_variance(cfg.execution, &draws, |z| (drift + law.std_dev * z).exp());
    Ok(ForwardCheck {
        ratio: mean,
        std_error: (variance / cfg.paths as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::bs_call_price;

    fn example() -> OptionSpec {
        OptionSpec::new(50.0, 52.0, 0.04, 1.0, 0.15).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(1, 0, 1).is_err());
        assert!(McConfig::new(10, 0, 0).is_err());
        assert!(McConfig::new(10, 0, 11).is_err());
        assert!(McConfig::new(10, 0, 10).is_ok());
        assert_eq!(McConfig::with_paths(100_000, 3).unwrap().batch_size, 4096);
        assert_eq!(McConfig::with_paths(10, 3).unwrap().batch_size, 10);
    }

    #[test]
    fn zero_volatility_is_exact() {
        let spec = OptionSpec {
            volatility: 0.0,
            ..example()
        };
        let cfg = McConfig::with_paths(1000, 1).unwrap();
        let r = mc_price(&spec, &cfg).unwrap();
        assert_eq!(r.price, spec.intrinsic_forward_value());
        assert_eq!(r.std_error, Some(0.0));
        assert_eq!(mc_forward_check(&spec, &cfg).unwrap().ratio, 1.0);
    }

    #[test]
    fn far_strike_prices_zero() {
        let spec = OptionSpec {
            strike: 1e9,
            ..example()
        };
        let r = mc_price(&spec, &McConfig::with_paths(10_000, 5).unwrap()).unwrap();
        assert_eq!(r.price, 0.0);
        assert_eq!(r.std_error, Some(0.0));
    }

    #[test]
    fn within_three_standard_errors() {
        let closed = bs_call_price(&example()).unwrap().price;
        let r = mc_price(&example(), &McConfig::with_paths(200_000, 11).unwrap()).unwrap();
        let se = r.std_error.unwrap();
        assert!(
            (r.price - closed).abs() <= 3.0 * se,
            "{} vs {closed} (se {se})",
            r.price
        );
    }

    #[test]
    fn batch_size_and_execution_do_not_change_bits() {
        let base = McConfig::new(50_000, 99, 50_000)
            .unwrap()
            .execution(Execution::Sequential);
        let reference = mc_price(&example(), &base).unwrap();
        for batch in [1, 17, 4096] {
            for exec in [Execution::Sequential, Execution::Parallel] {
                let cfg = McConfig::new(50_000, 99, batch).unwrap().execution(exec);
                let r = mc_price(&example(), &cfg).unwrap();
                assert_eq!(r.price.to_bits(), reference.price.to_bits());
                assert_eq!(
                    r.std_error.map(f64::to_bits),
                    reference.std_error.map(f64::to_bits)
                );
            }
        }
    }

    #[test]
    fn lognormal_skew_stress_forward() {
        let spec = OptionSpec::new(100.0, 100.0, 0.0, 2.0, 0.5).unwrap();
        let f = mc_forward_check(&spec, &McConfig::with_paths(1_000_000, 8).unwrap()).unwrap();
        assert!(
            f.z_score().abs() <= 3.0,
            "ratio {} se {}",
            f.ratio,
            f.std_error
        );
    }
}
