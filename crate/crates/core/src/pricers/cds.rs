use chrono::NaiveDate;

use super::PricingError;
use crate::daycount::year_fraction;
use crate::market_data::{MarketFactors, ZeroCurve};

const GRID_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdsDirection {
    ProtectionBought,
    ProtectionSold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdsSpec {
    pub notional: f64,
    pub maturity: NaiveDate,
    pub contractual_spread: f64,
    pub direction: CdsDirection,
    pub currency: String,
}

impl CdsSpec {
    pub fn new(
        notional: f64,
        maturity: NaiveDate,
        contractual_spread: f64,
        direction: CdsDirection,
        currency: impl Into<String>,
    ) -> Result<Self, PricingError> {
        if !(notional.is_finite() && notional > 0.0) {
            return Err(PricingError::InvalidSpec(format!("notional {notional}")));
        }
        if !(contractual_spread.is_finite() && contractual_spread >= 0.0) {
            return Err(PricingError::InvalidSpec(format!(
                "contractual spread {contractual_spread}"
            )));
        }
        Ok(Self {
            notional,
            maturity,
            contractual_spread,
            direction,
            currency: currency.into(),
        })
    }
}

/// Legs per unit notional, seen from the protection buyer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdsLegs {
    pub protection: f64,
    pub premium: f64,
    /// `∫ D(u) S(u) du` over the remaining life.
    pub risky_annuity: f64,
}

/// Both legs share the risky annuity: protection is `(1−R) λ · annuity`,
/// premium is `spread · annuity`. Flat curves use the closed form; other
/// curves integrate by the trapezoid rule on a grid of at most quarterly steps.
pub fn cds_legs(
    spec: &CdsSpec,
    valuation: NaiveDate,
    curve: &ZeroCurve,
    factors: &MarketFactors,
) -> Result<CdsLegs, PricingError> {
    if valuation > spec.maturity {
        return Err(PricingError::PastMaturity {
            valuation,
            maturity: spec.maturity,
        });
    }
    let tau = year_fraction(valuation, spec.maturity);
    let lambda = factors.hazard_rate;
    let risky_annuity = if tau == 0.0 {
        0.0
    } else if let Some(z) = curve.flat_rate() {
        let k = z + lambda;
        if k.abs() < 1e-14 {
            tau
        } else {
            -(-k * tau).exp_m1() / k
        }
    } else {
        let n = (tau / GRID_STEP).ceil().max(1.0) as usize;
        let h = tau / n as f64;
        let f = |u: f64| (-(curve.zero_rate(u) + lambda) * u).exp();
        let interior: f64 = (1..n).map(|i| f(i as f64 * h)).sum();
        h * (0.5 * (f(0.0) + f(tau)) + interior)
    };
    Ok(CdsLegs {
        protection: (1.0 - factors.recovery) * lambda * risky_annuity,
        premium: spec.contractual_spread * risky_annuity,
        risky_annuity,
    })
}

/// Value to the holder: protection minus premium when protection is bought,
/// the negative of that when sold. Scaled by notional.
pub fn price_cds(
    spec: &CdsSpec,
    valuation: NaiveDate,
    curve: &ZeroCurve,
    factors: &MarketFactors,
) -> Result<f64, PricingError> {
    let legs = cds_legs(spec, valuation, curve, factors)?;
    let buyer = spec.notional * (legs.protection - legs.premium);
    Ok(match spec.direction {
        CdsDirection::ProtectionBought => buyer,
        CdsDirection::ProtectionSold => -buyer,
    })
}
