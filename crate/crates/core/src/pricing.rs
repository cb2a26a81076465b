//! Closed-form European call pricing and the no-arbitrage identities behind
//! it.
//!
//! Under the pricing measure the log-return `Y = log(X_t / X_0)` is normal
//! with variance `sigma^2 t`. Forward-pricing of the underlying pins its mean
//! to `(r - sigma^2/2) t`, and the call price is the discounted lognormal
//! payoff expectation `e^{-rt} X_0 E[max(e^Y - K/X_0, 0)]`.

use std::collections::BTreeMap;
use std::fmt;

use crate::core_math::{standard_normal_cdf, standard_normal_sf};
use crate::{Error, Result};

/// Market and contract inputs for one European call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    /// Current price of the underlying, `X_0`.
    pub spot: f64,
    pub strike: f64,
    /// Continuously-compounded annual risk-free rate.
    pub rate: f64,
    /// Time to expiry in years.
    pub expiry: f64,
    /// Annualised standard deviation of the log-return.
    pub volatility: f64,
}

impl OptionSpec {
    pub fn new(spot: f64, strike: f64, rate: f64, expiry: f64, volatility: f64) -> Result<Self> {
        let spec = OptionSpec {
            spot,
            strike,
            rate,
            expiry,
            volatility,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spot > 0.0 && self.spot.is_finite()) {
            return Err(Error::validation(
                "spot",
                format!("{} must be positive and finite", self.spot),
            ));
        }
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(Error::validation(
                "strike",
                format!("{} must be positive and finite", self.strike),
            ));
        }
        if !self.rate.is_finite() {
            return Err(Error::validation(
                "rate",
                format!("{} must be finite", self.rate),
            ));
        }
        if !(self.expiry >= 0.0 && self.expiry.is_finite()) {
            return Err(Error::validation(
                "expiry",
                format!("{} must be non-negative and finite", self.expiry),
            ));
        }
        if !(self.volatility >= 0.0 && self.volatility.is_finite()) {
            return Err(Error::validation(
                "volatility",
                format!("{} must be non-negative and finite", self.volatility),
            ));
        }
        Ok(())
    }

    /// Standard deviation of the log-return over the option's life, `sigma sqrt(t)`.
    pub fn total_volatility(&self) -> f64 {
        self.volatility * self.expiry.sqrt()
    }

    pub fn discount_factor(&self) -> f64 {
        (-self.rate * self.expiry).exp()
    }

    /// Price when the log-return has no variance: `max(X_0 - K e^{-rt}, 0)`.
    pub fn intrinsic_forward_value(&self) -> f64 {
        (self.spot - self.strike * self.discount_factor()).max(0.0)
    }
}

/// Mean and standard deviation of a normal log-return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams {
    pub mean: f64,
    pub std_dev: f64,
}

impl NormalParams {
    pub fn new(mean: f64, std_dev: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::validation("mean", format!("{mean} must be finite")));
        }
        if !(std_dev >= 0.0 && std_dev.is_finite()) {
            return Err(Error::validation(
                "std_dev",
                format!("{std_dev} must be non-negative and finite"),
            ));
        }
        Ok(NormalParams { mean, std_dev })
    }

    /// `E(e^Y) = e^{mean + std_dev^2 / 2}`.
    pub fn exp_mean(&self) -> f64 {
        (self.mean + 0.5 * self.std_dev * self.std_dev).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PricingMethod {
    ClosedForm,
    Tree,
    MonteCarlo,
}

impl PricingMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PricingMethod::ClosedForm => "closed_form",
            PricingMethod::Tree => "tree",
            PricingMethod::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for PricingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A price together with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub price: f64,
    /// `None` when `sigma sqrt(t) = 0`.
    pub d_plus: Option<f64>,
    pub d_minus: Option<f64>,
    pub method: PricingMethod,
    /// Monte Carlo standard error.
    pub std_error: Option<f64>,
    /// Method-specific numbers (step count, node count, path count, ...).
    pub detail: BTreeMap<String, f64>,
}

/// `(d+, d-)` for a spec with `sigma sqrt(t) > 0`.
pub fn d_plus_minus(spec: &OptionSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let vol = spec.total_volatility();
    if vol == 0.0 {
        return Err(Error::DegenerateVolatility);
    }
    let log_moneyness = spec.rate * spec.expiry + (spec.spot / spec.strike).ln();
    let d_plus = log_moneyness / vol + 0.5 * vol;
    let d_minus = log_moneyness / vol - 0.5 * vol;
    Ok((d_plus, d_minus))
}

/// `value * e^{-rate * t}`.
pub fn discount(value: f64, rate: f64, t: f64) -> f64 {
    value * (-rate * t).exp()
}

/// Black-Scholes European call price `X_0 N(d+) - K e^{-rt} N(d-)`.
///
/// With `sigma sqrt(t) = 0` the price is the deterministic limit
/// `max(X_0 - K e^{-rt}, 0)`; at `t = 0` that is the payoff `max(X_0 - K, 0)`.
pub fn bs_call_price(spec: &OptionSpec) -> Result<PriceResult> {
    spec.validate()?;
    let mut detail = BTreeMap::new();
    detail.insert("total_volatility".to_string(), spec.total_volatility());
    detail.insert("discount_factor".to_string(), spec.discount_factor());
    if spec.total_volatility() == 0.0 {
        return Ok(PriceResult {
            price: spec.intrinsic_forward_value(),
            d_plus: None,
            d_minus: None,
            method: PricingMethod::ClosedForm,
            std_error: None,
            detail,
        });
    }
    let (d_plus, d_minus) = d_plus_minus(spec)?;
    let price = spec.spot * standard_normal_cdf(d_plus)
        - discount(spec.strike, spec.rate, spec.expiry) * standard_normal_cdf(d_minus);
    Ok(PriceResult {
        price: price.max(0.0),
        d_plus: Some(d_plus),
        d_minus: Some(d_minus),
        method: PricingMethod::ClosedForm,
        std_error: None,
        detail,
    })
}

/// The pieces of `E[max(e^Y - M, 0)]` for normal `Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalCall {
    pub value: f64,
    pub h_plus: f64,
    pub h_minus: f64,
    /// `E(e^Y)`.
    pub exp_mean: f64,
}

/// `E(e^Y) N(h+) - M N(h-)` with `h± = [log(E(e^Y)/M) ± sigma_Y^2/2] / sigma_Y`.
pub fn lognormal_call_terms(params: &NormalParams, threshold: f64) -> Result<LognormalCall> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::domain(
            "lognormal_call_expectation",
            format!("threshold {threshold} must be positive and finite"),
        ));
    }
    let sd = params.std_dev;
    if !(sd > 0.0 && sd.is_finite()) || !params.mean.is_finite() {
        return Err(Error::domain(
            "lognormal_call_expectation",
            format!(
                "requires finite mean and std_dev > 0, got ({}, {sd})",
                params.mean
            ),
        ));
    }
    let log_exp_mean = params.mean + 0.5 * sd * sd;
    let log_ratio = log_exp_mean - threshold.ln();
    let h_plus = (log_ratio + 0.5 * sd * sd) / sd;
    let h_minus = (log_ratio - 0.5 * sd * sd) / sd;
    let exp_mean = log_exp_mean.exp();
    // N(h) = 1 - N(-h); the tail form keeps precision when h is large.
    let value = exp_mean * standard_normal_sf(-h_plus) - threshold * standard_normal_sf(-h_minus);
    Ok(LognormalCall {
        value: value.max(0.0),
        h_plus,
        h_minus,
        exp_mean,
    })
}

pub fn lognormal_call_expectation(params: &NormalParams, threshold: f64) -> Result<f64> {
    lognormal_call_terms(params, threshold).map(|c| c.value)
}

/// Risk-neutral law of `log(X_t / X_0)`: mean `(r - sigma^2/2) t`, sd `sigma sqrt(t)`.
pub fn risk_neutral_params(spec: &OptionSpec) -> Result<NormalParams> {
    spec.validate()?;
    let v = spec.volatility;
    NormalParams::new(
        (spec.rate - 0.5 * v * v) * spec.expiry,
        spec.total_volatility(),
    )
}
