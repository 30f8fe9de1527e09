use std::fmt;

use chrono::NaiveDate;

use super::{asset_weight, fx_split, AttributionError, AttributionResult, FxMode};
use crate::market_data::{FxQuote, MarketSnapshot};
use crate::pricers::{Pricer, PricingError};

/// Endpoint of a (sub)period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    Start,
    End,
}

/// One cross-evaluation `A_time(r_curve, x_factors)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub time: Corner,
    pub curve: Corner,
    pub factors: Corner,
}

impl fmt::Display for Evaluation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = |c: Corner| match c {
            Corner::Start => "t",
            Corner::End => "T",
        };
        write!(
            f,
            "A_{}(r_{}, x_{})",
            tag(self.time),
            tag(self.curve),
            tag(self.factors)
        )
    }
}

const fn ev(time: Corner, curve: Corner, factors: Corner) -> Evaluation {
    Evaluation {
        time,
        curve,
        factors,
    }
}

use Corner::{End as E, Start as S};

/// The six distinct cross-evaluations the split needs.
const EVALUATIONS: [Evaluation; 6] = [
    ev(S, S, S),
    ev(E, E, E),
    ev(E, S, E),
    ev(S, E, S),
    ev(E, E, S),
    ev(S, S, E),
];

/// Four-way split from an arbitrary evaluator of `A_time(r_curve, x_factors)`.
///
/// The evaluator is called once per distinct evaluation. The FX part uses
/// the observed prices `A_t(r_t, x_t)` and `A_T(r_T, x_T)`; the other three
/// parts are averages of endpoint differences weighted by the mode's EUR
/// conversion rate, and their sum is that weight times `A_T − A_t`.
pub fn split_from_evaluations<F, Err>(
    mut eval: F,
    chi_start: FxQuote,
    chi_end: FxQuote,
    fx_mode: FxMode,
) -> Result<AttributionResult, Err>
where
    F: FnMut(Evaluation) -> Result<f64, Err>,
{
    let mut values = [0.0; 6];
    for (slot, e) in values.iter_mut().zip(EVALUATIONS) {
        *slot = eval(e)?;
    }
    let [sss, eee, ese, ses, ees, sse] = values;

    let w = asset_weight(chi_start, chi_end, fx_mode);
    let rate = w * 0.5 * ((eee - ese) + (ses - sss));
    let market = w * 0.5 * ((eee - ees) + (sse - sss));
    let carry = w * 0.5 * ((ees - sse) + (ese - ses));
    let (fx, _) = fx_split(sss, eee, chi_start, chi_end, fx_mode);
    let total = eee * chi_end.rate() - sss * chi_start.rate();
    Ok(AttributionResult::new(fx, rate, market, carry, total))
}

/// Attribution of one instrument over `(t, T]` with no interim cashflows.
pub fn four_way_split(
    pricer: &dyn Pricer,
    t: NaiveDate,
    big_t: NaiveDate,
    snap_t: &MarketSnapshot,
    snap_big_t: &MarketSnapshot,
    fx_mode: FxMode,
) -> Result<AttributionResult, AttributionError> {
    if t >= big_t {
        return Err(AttributionError::EmptyPeriod {
            from: t,
            to: big_t,
        });
    }
    let pick = |c: Corner| match c {
        Corner::Start => snap_t,
        Corner::End => snap_big_t,
    };
    split_from_evaluations(
        |e| {
            let valuation = match e.time {
                Corner::Start => t,
                Corner::End => big_t,
            };
            pricer
                .price(valuation, &pick(e.curve).curve, &pick(e.factors).factors)
                .and_then(|v| {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(PricingError::InvalidSpec(format!("non-finite price {v}")))
                    }
                })
                .map_err(|source| AttributionError::PricerEvaluationFailed {
                    evaluation: e,
                    valuation,
                    source,
                })
        },
        snap_t.fx,
        snap_big_t.fx,
        fx_mode,
    )
}
