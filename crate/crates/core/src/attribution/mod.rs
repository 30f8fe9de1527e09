//! EUR PnL attribution.
//!
//! For a holding period `(t, T]` the EUR PnL `A_T χ_T − A_t χ_t` is split into
//!
//! - an FX part, driven by the change in `χ` (EUR per unit of asset currency);
//! - a rate part, the average over both endpoints of the repricing caused by
//!   swapping the discount curve `r_t → r_T`;
//! - a market part, the same construction for the residual factors `x`;
//! - carry, the time-passing remainder taken over a balanced mix of the
//!   `(r, x)` endpoint pairs, plus any coupons received.
//!
//! All four parts are built from cross-evaluated prices `A_s(r_u, x_v)` with
//! `s, u, v ∈ {t, T}`. Coupons and trades split the period into subperiods
//! that are attributed one after the other and summed.

mod engine;
mod position;
mod segment;
mod split;

use std::ops::{Add, AddAssign};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_data::FxQuote;
use crate::pricers::PricingError;

pub use engine::{
    attribute_portfolio, attribute_position, BucketTotal, PortfolioAttribution,
    PositionAttribution, Subperiod,
};
pub use position::{Bucket, Direction, Portfolio, Position, Transaction};
pub use segment::segment_period;
pub use split::{four_way_split, split_from_evaluations, Corner, Evaluation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttributionError {
    #[error("empty period ({from}, {to}]")]
    EmptyPeriod { from: NaiveDate, to: NaiveDate },
    #[error("pricer evaluation {evaluation} at {valuation} failed")]
    PricerEvaluationFailed {
        evaluation: Evaluation,
        valuation: NaiveDate,
        source: PricingError,
    },
    #[error("no market snapshot for {0}")]
    MissingSnapshot(NaiveDate),
    #[error("cashflow or trade on {0} does not fall on the attribution grid")]
    ScheduleOutsideGrid(NaiveDate),
    #[error("unknown bucket `{0}`")]
    UnknownBucket(String),
    #[error("duplicate position id `{0}`")]
    DuplicatePositionId(String),
    #[error("invalid position `{id}`: {reason}")]
    InvalidPosition { id: String, reason: String },
    #[error("position `{id}`")]
    Position {
        id: String,
        source: Box<AttributionError>,
    },
}

/// How EUR conversion weights are chosen in the FX split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FxMode {
    /// FX move earned on the average asset value; asset move converted at the
    /// average FX rate.
    #[default]
    AverageWeights,
    /// FX move earned on the starting asset value; asset move converted at
    /// the closing FX rate.
    StartEnd,
}

/// Coupon handling inside the carry part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CarryMode {
    /// Each subperiod starts from the ex-coupon price; coupons are converted
    /// at the subperiod's average FX rate. Parts add up to the total exactly.
    #[default]
    CorrectedStart,
    /// Each subperiod starts from the pre-coupon price `A_{u−}`. Parts fall
    /// short of the realized total by the interior coupons; the gap shows up
    /// in `residual`.
    PaperLiteral,
    /// Like `CorrectedStart`, but every coupon is converted at the closing FX
    /// rate of the whole period.
    SophisFrozenAtT,
}

/// The four EUR parts of a period's PnL.
///
/// `residual = total − (fx + rate + market + carry)` and is zero up to
/// round-off in every mode except [`CarryMode::PaperLiteral`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AttributionResult {
    pub fx: f64,
    pub rate: f64,
    pub market: f64,
    pub carry: f64,
    pub total: f64,
    pub residual: f64,
}

impl AttributionResult {
    pub fn new(fx: f64, rate: f64, market: f64, carry: f64, total: f64) -> Self {
        Self {
            fx,
            rate,
            market,
            carry,
            total,
            residual: total - (fx + rate + market + carry),
        }
    }

    pub fn parts_sum(&self) -> f64 {
        self.fx + self.rate + self.market + self.carry
    }

    /// `|residual| ≤ 1e-9 · max(1, |total|)`.
    pub fn is_additive(&self) -> bool {
        self.residual.abs() <= 1e-9 * self.total.abs().max(1.0)
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.fx * k, self.rate * k, self.market * k, self.carry * k, self.total * k)
    }
}

impl Add for AttributionResult {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.fx + rhs.fx,
            self.rate + rhs.rate,
            self.market + rhs.market,
            self.carry + rhs.carry,
            self.total + rhs.total,
        )
    }
}

impl AddAssign for AttributionResult {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for AttributionResult {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

/// Splits `a_end·χ_end − a_start·χ_start` into `(fx_part, asset_part)`.
pub fn fx_split(
    a_start: f64,
    a_end: f64,
    chi_start: FxQuote,
    chi_end: FxQuote,
    mode: FxMode,
) -> (f64, f64) {
    let (c0, c1) = (chi_start.rate(), chi_end.rate());
    match mode {
        FxMode::AverageWeights => (
            0.5 * (a_start + a_end) * (c1 - c0),
            0.5 * (c0 + c1) * (a_end - a_start),
        ),
        FxMode::StartEnd => (a_start * (c1 - c0), c1 * (a_end - a_start)),
    }
}

/// EUR weight applied to asset-currency price changes.
pub(crate) fn asset_weight(chi_start: FxQuote, chi_end: FxQuote, mode: FxMode) -> f64 {
    match mode {
        FxMode::AverageWeights => 0.5 * (chi_start.rate() + chi_end.rate()),
        FxMode::StartEnd => chi_end.rate(),
    }
}
