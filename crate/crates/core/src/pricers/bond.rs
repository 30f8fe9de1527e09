use chrono::{Months, NaiveDate};

use super::{CashflowSchedule, PricingError};
use crate::daycount::year_fraction;
use crate::market_data::{MarketFactors, ZeroCurve};

/// Fixed-coupon bullet bond. Coupons fall on dates rolled back from maturity
/// in steps of `12 / coupon_frequency` months, strictly after `issue`.
#[derive(Debug, Clone, PartialEq)]
pub struct BondSpec {
    pub notional: f64,
    pub issue: NaiveDate,
    pub maturity: NaiveDate,
    pub coupon_rate: f64,
    pub coupon_frequency: u32,
    pub currency: String,
}

impl BondSpec {
    pub fn new(
        notional: f64,
        issue: NaiveDate,
        maturity: NaiveDate,
        coupon_rate: f64,
        coupon_frequency: u32,
        currency: impl Into<String>,
    ) -> Result<Self, PricingError> {
        if !(notional.is_finite() && notional > 0.0) {
            return Err(PricingError::InvalidSpec(format!("notional {notional}")));
        }
        if maturity <= issue {
            return Err(PricingError::InvalidSpec(format!(
                "maturity {maturity} not after issue {issue}"
            )));
        }
        if ![1, 2, 4, 12].contains(&coupon_frequency) {
            return Err(PricingError::InvalidSpec(format!(
                "coupon frequency {coupon_frequency}"
            )));
        }
        if !(coupon_rate.is_finite() && coupon_rate >= 0.0) {
            return Err(PricingError::InvalidSpec(format!("coupon rate {coupon_rate}")));
        }
        Ok(Self {
            notional,
            issue,
            maturity,
            coupon_rate,
            coupon_frequency,
            currency: currency.into(),
        })
    }

    pub fn coupon_dates(&self) -> Vec<NaiveDate> {
        let step = 12 / self.coupon_frequency;
        let mut dates: Vec<NaiveDate> = (0u32..)
            .map_while(|k| self.maturity.checked_sub_months(Months::new(k * step)))
            .take_while(|&date| date > self.issue)
            .collect();
        dates.reverse();
        dates
    }

    /// Coupon amounts per unit notional.
    pub fn coupon_schedule(&self) -> CashflowSchedule {
        let amount = self.coupon_rate / f64::from(self.coupon_frequency);
        CashflowSchedule::new(self.coupon_dates().into_iter().map(|d| (d, amount)).collect())
            .expect("coupon dates are strictly increasing")
    }
}

/// Reduced-form dirty price, scaled by notional.
///
/// Per unit notional the value is
/// `Σ c_i D(τ_i) S(τ_i) + D(τ_N) S(τ_N) + R ∫ D d(−S)` over coupons paid
/// strictly after `valuation`, with `D(τ) = exp(−(z(τ) + basis) τ)`,
/// `S(τ) = exp(−λ τ)`, and the recovery integral taken by the trapezoid rule
/// on the remaining coupon grid. A coupon due on the valuation date is
/// treated as already paid; the redemption at maturity is not.
pub fn price_bond(
    spec: &BondSpec,
    valuation: NaiveDate,
    curve: &ZeroCurve,
    factors: &MarketFactors,
) -> Result<f64, PricingError> {
    if valuation > spec.maturity {
        return Err(PricingError::PastMaturity {
            valuation,
            maturity: spec.maturity,
        });
    }
    let discount = |tau: f64| (-(curve.zero_rate(tau) + factors.basis_spread) * tau).exp();
    let survival = |tau: f64| (-factors.hazard_rate * tau).exp();
    let coupon = spec.coupon_rate / f64::from(spec.coupon_frequency);

    let mut coupons = 0.0;
    let mut recovery_leg = 0.0;
    let (mut prev_df, mut prev_sp) = (1.0, 1.0);
    for date in spec.coupon_dates().into_iter().filter(|&d| d > valuation) {
        let tau = year_fraction(valuation, date);
        let (df, sp) = (discount(tau), survival(tau));
        coupons += coupon * df * sp;
        recovery_leg += 0.5 * (prev_df + df) * (prev_sp - sp);
        prev_df = df;
        prev_sp = sp;
    }
    let tau_n = year_fraction(valuation, spec.maturity);
    let redemption = discount(tau_n) * survival(tau_n);
    Ok(spec.notional * (coupons + redemption + factors.recovery * recovery_leg))
}
