use std::collections::BTreeMap;

use crate::pricing::{d_plus_minus, OptionSpec, PriceResult, PricingMethod};
use crate::{Error, Result};

/// Above this many steps the terminal distribution is summed with log-space
/// binomial weights instead of backward induction.
pub const LOG_SPACE_THRESHOLD: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeConfig {
    pub steps: usize,
}

impl TreeConfig {
    pub fn new(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::validation("steps", "tree needs at least one step"));
        }
        Ok(TreeConfig { steps })
    }
}

/// One-step lattice parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrrParameters {
    pub up: f64,
    pub down: f64,
    /// Risk-neutral probability of an up move.
    pub probability: f64,
    /// One-step growth factor `e^{r t / n}`.
    pub growth: f64,
}

impl CrrParameters {
    /// `u = e^{sigma sqrt(t/n)}`, `d = 1/u`, `p = (e^{rt/n} - d) / (u - d)`.
    pub fn new(spec: &OptionSpec, steps: usize) -> Result<Self> {
        let dt = spec.expiry / steps as f64;
        let up = (spec.volatility * dt.sqrt()).exp();
        let down = 1.0 / up;
        let growth = (spec.rate * dt).exp();
        let probability = (growth - down) / (up - down);
        if !(probability > 0.0 && probability < 1.0) {
            return Err(Error::TreeParameterization { probability, steps });
        }
        Ok(CrrParameters {
            up,
            down,
            probability,
            growth,
        })
    }
}

fn backward_induction(spec: &OptionSpec, steps: usize, lattice: &CrrParameters) -> f64 {
    let log_up = lattice.up.ln();
    let mut values: Vec<f64> = (0..=steps)
        .map(|k| {
            let terminal = spec.spot * ((2 * k as i64 - steps as i64) as f64 * log_up).exp();
            (terminal - spec.strike).max(0.0)
        })
        .collect();
    let p = lattice.probability;
    for level in (0..steps).rev() {
        for k in 0..=level {
            values[k] = p * values[k + 1] + (1.0 - p) * values[k];
        }
    }
    values[0] * (-spec.rate * spec.expiry).exp()
}

fn log_space_sum(spec: &OptionSpec, steps: usize, lattice: &CrrParameters) -> f64 {
    let n = steps as f64;
    let log_up = lattice.up.ln();
    let log_p = lattice.probability.ln();
    let log_q = (1.0 - lattice.probability).ln();
    let log_n_fact = libm::lgamma(n + 1.0);
    // only nodes finishing in the money contribute
    let first = ((spec.strike / spec.spot).ln() / log_up + n) / 2.0;
    let first = first.floor().max(0.0) as usize;
    let mut total = 0.0;
    for k in (first..=steps).rev() {
        let kf = k as f64;
        let terminal = spec.spot * ((2.0 * kf - n) * log_up).exp();
        if terminal <= spec.strike {
            continue;
        }
        let log_weight = log_n_fact - libm::lgamma(kf + 1.0) - libm::lgamma(n - kf + 1.0)
            + kf * log_p
            + (n - kf) * log_q;
        total += log_weight.exp() * (terminal - spec.strike);
    }
    total * (-spec.rate * spec.expiry).exp()
}

/// Prices the call on an `n`-step CRR lattice.
///
/// Zero volatility (or zero expiry) falls back to the deterministic limit.
pub fn crr_tree_price(spec: &OptionSpec, cfg: TreeConfig) -> Result<PriceResult> {
    spec.validate()?;
    TreeConfig::new(cfg.steps)?;
    let steps = cfg.steps;
    let nodes = ((steps + 1) * (steps + 2) / 2) as f64;
    let mut detail = BTreeMap::new();
    detail.insert("steps".to_string(), steps as f64);
    detail.insert("nodes".to_string(), nodes);
    if spec.total_volatility() == 0.0 {
        return Ok(PriceResult {
            price: spec.intrinsic_forward_value(),
            d_plus: None,
            d_minus: None,
            method: PricingMethod::Tree,
            std_error: None,
            detail,
        });
    }
    let lattice = CrrParameters::new(spec, steps)?;
    let price = if steps > LOG_SPACE_THRESHOLD {
        log_space_sum(spec, steps, &lattice)
    } else {
        backward_induction(spec, steps, &lattice)
    };
    detail.insert("up".to_string(), lattice.up);
    detail.insert("down".to_string(), lattice.down);
    detail.insert("probability".to_string(), lattice.probability);
    let (d_plus, d_minus) = d_plus_minus(spec)?;
    Ok(PriceResult {
        price,
        d_plus: Some(d_plus),
        d_minus: Some(d_minus),
        method: PricingMethod::Tree,
        std_error: None,
        detail,
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
    fn one_step_zero_strike_is_spot() {
        let spec = OptionSpec::new(100.0, 1e-12, 0.05, 1.0, 0.2).unwrap();
        let r = crr_tree_price(&spec, TreeConfig::new(1).unwrap()).unwrap();
        assert!((r.price - 100.0).abs() < 1e-9);
    }

    #[test]
    fn martingale_identity_holds() {
        for steps in [1, 7, 100, 5000] {
            let l = CrrParameters::new(&example(), steps).unwrap();
            let one_step = l.probability * l.up + (1.0 - l.probability) * l.down;
            assert!((one_step - l.growth).abs() < 1e-15);
        }
    }

    #[test]
    fn evaluation_routes_agree() {
        for steps in [1, 2, 31, 500, 1000] {
            let l = CrrParameters::new(&example(), steps).unwrap();
            let a = backward_induction(&example(), steps, &l);
            let b = log_space_sum(&example(), steps, &l);
            assert!((a - b).abs() < 1e-11, "steps {steps}: {a} vs {b}");
        }
    }

    #[test]
    fn converges_to_closed_form() {
        let closed = bs_call_price(&example()).unwrap().price;
        let r = crr_tree_price(&example(), TreeConfig::new(10_000).unwrap()).unwrap();
        assert!((r.price - closed).abs() <= 1e-3);
        // python/mpmath reference for the 10_000-step gap
        assert!(((r.price - closed).abs() - 4.451_161e-5).abs() < 1e-9);
    }

    #[test]
    fn error_shrinks_roughly_like_one_over_n() {
        let closed = bs_call_price(&example()).unwrap().price;
        let errs: Vec<f64> = [10, 100, 1000]
            .iter()
            .map(|&n| {
                (crr_tree_price(&example(), TreeConfig::new(n).unwrap())
                    .unwrap()
                    .price
                    - closed)
                    .abs()
            })
            .collect();
        let slope = (errs[2].ln() - errs[0].ln()) / (1000f64.ln() - 10f64.ln());
        assert!(slope < -0.8, "log-log slope {slope}");
    }

    #[test]
    fn bad_parameterisation_asks_for_more_steps() {
        let spec = OptionSpec::new(100.0, 100.0, 1.0, 1.0, 0.01).unwrap();
        match crr_tree_price(&spec, TreeConfig { steps: 1 }) {
            Err(Error::TreeParameterization { probability, steps }) => {
                assert!(probability > 1.0);
                assert_eq!(steps, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(crr_tree_price(&spec, TreeConfig { steps: 100_000 }).is_ok());
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(TreeConfig::new(0).is_err());
        assert!(crr_tree_price(&example(), TreeConfig { steps: 0 }).is_err());
    }

    #[test]
    fn zero_volatility_is_deterministic() {
        let spec = OptionSpec {
            volatility: 0.0,
            ..example()
        };
        let r = crr_tree_price(&spec, TreeConfig::new(10).unwrap()).unwrap();
        assert_eq!(r.price, spec.intrinsic_forward_value());
        assert_eq!(r.method, PricingMethod::Tree);
    }
}
