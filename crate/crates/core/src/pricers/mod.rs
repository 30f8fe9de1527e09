//! Pure pricing functions `A_s(r, x)`.
//!
//! Every pricer can be evaluated at any valuation date with any curve and any
//! factor set, not only the ones observed together on that date. Tenors are
//! measured from the valuation date, so a curve is used as a term structure
//! regardless of the date it was anchored on.

mod bond;
mod cash;
mod cds;

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_data::{MarketFactors, ZeroCurve};

pub use bond::{price_bond, BondSpec};
pub use cash::{price_cash, CashSpec};
pub use cds::{cds_legs, price_cds, CdsDirection, CdsLegs, CdsSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PricingError {
    #[error("valuation date {valuation} is after maturity {maturity}")]
    PastMaturity {
        valuation: NaiveDate,
        maturity: NaiveDate,
    },
    #[error("valuation date {valuation} is before account start {start}")]
    BeforeStart {
        valuation: NaiveDate,
        start: NaiveDate,
    },
    #[error("invalid instrument: {0}")]
    InvalidSpec(String),
    #[error("cashflow dates must be strictly increasing with non-negative amounts")]
    InvalidSchedule,
    #[error("empty interval ({from}, {to}]")]
    EmptyInterval { from: NaiveDate, to: NaiveDate },
}

/// Dated cash amounts paid out of an instrument. Amounts are in the same
/// units as the instrument's price.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CashflowSchedule {
    entries: Vec<(NaiveDate, f64)>,
}

impl CashflowSchedule {
    pub fn new(entries: Vec<(NaiveDate, f64)>) -> Result<Self, PricingError> {
        let ok = entries.iter().all(|&(_, a)| a.is_finite() && a >= 0.0)
            && entries.windows(2).all(|w| w[0].0 < w[1].0);
        if ok {
            Ok(Self { entries })
        } else {
            Err(PricingError::InvalidSchedule)
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(NaiveDate, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Amount paid exactly on `date`, zero when none.
    pub fn amount_on(&self, date: NaiveDate) -> f64 {
        self.entries
            .binary_search_by_key(&date, |&(d, _)| d)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|&(d, a)| (d, a * factor)).collect(),
        }
    }

    /// Entries with `from < date <= to`.
    pub fn coupons_in(
        &self,
        from: NaiveDate,
        to: NaiveDate,
    ) -> Result<Vec<(NaiveDate, f64)>, PricingError> {
        if from >= to {
            return Err(PricingError::EmptyInterval { from, to });
        }
        let lo = self.entries.partition_point(|&(d, _)| d <= from);
        let hi = self.entries.partition_point(|&(d, _)| d <= to);
        Ok(self.entries[lo..hi].to_vec())
    }
}

/// A deterministic price function `A_s(r, x)` in asset currency.
pub trait Pricer: fmt::Debug + Send + Sync {
    fn price(
        &self,
        valuation: NaiveDate,
        curve: &ZeroCurve,
        factors: &MarketFactors,
    ) -> Result<f64, PricingError>;

    /// Discrete cash paid out by the instrument. The price drops by the
    /// amount on each payment date.
    fn schedule(&self) -> CashflowSchedule {
        CashflowSchedule::empty()
    }

    fn maturity(&self) -> Option<NaiveDate> {
        None
    }
}

/// The instrument kinds the portfolio file can describe.
#[derive(Debug, Clone, PartialEq)]
pub enum Instrument {
    Bond(BondSpec),
    Cds(CdsSpec),
    Cash(CashSpec),
}

impl Instrument {
    pub fn currency(&self) -> &str {
        match self {
            Instrument::Bond(b) => &b.currency,
            Instrument::Cds(c) => &c.currency,
            Instrument::Cash(c) => &c.currency,
        }
    }
}

impl Pricer for Instrument {
    fn price(
        &self,
        valuation: NaiveDate,
        curve: &ZeroCurve,
        factors: &MarketFactors,
    ) -> Result<f64, PricingError> {
        match self {
            Instrument::Bond(b) => price_bond(b, valuation, curve, factors),
            Instrument::Cds(c) => price_cds(c, valuation, curve, factors),
            Instrument::Cash(c) => price_cash(c, valuation, curve),
        }
    }

    fn schedule(&self) -> CashflowSchedule {
        match self {
            Instrument::Bond(b) => b.coupon_schedule().scaled(b.notional),
            _ => CashflowSchedule::empty(),
        }
    }

    fn maturity(&self) -> Option<NaiveDate> {
        match self {
            Instrument::Bond(b) => Some(b.maturity),
            Instrument::Cds(c) => Some(c.maturity),
            Instrument::Cash(_) => None,
        }
    }
}
