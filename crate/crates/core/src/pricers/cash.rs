use chrono::NaiveDate;

use super::PricingError;
use crate::daycount::year_fraction;
use crate::market_data::ZeroCurve;

/// Deposit account accruing at a fixed continuously compounded rate
/// (negative rates allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct CashSpec {
    pub balance: f64,
    pub deposit_rate: f64,
    pub start: NaiveDate,
    pub currency: String,
}

/// `balance · exp(deposit_rate · τ)` with τ the time since the account
/// start. Curve and factors play no part.
pub fn price_cash(
    spec: &CashSpec,
    valuation: NaiveDate,
    _curve: &ZeroCurve,
) -> Result<f64, PricingError> {
    if valuation < spec.start {
        return Err(PricingError::BeforeStart {
            valuation,
            start: spec.start,
        });
    }
    let elapsed = year_fraction(spec.start, valuation);
    Ok(spec.balance * (spec.deposit_rate * elapsed).exp())
}
