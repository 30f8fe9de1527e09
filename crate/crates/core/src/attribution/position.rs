use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::AttributionError;
use crate::pricers::{CashflowSchedule, Pricer};

/// Position category used in the fund rollup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bucket {
    CapitalStructure,
    SeniorSub,
    MismatchBasis,
    MatchedBasis,
    Other,
    Hedge,
    Cash,
}

impl Bucket {
    pub const ALL: [Bucket; 7] = [
        Bucket::CapitalStructure,
        Bucket::SeniorSub,
        Bucket::MismatchBasis,
        Bucket::MatchedBasis,
        Bucket::Other,
        Bucket::Hedge,
        Bucket::Cash,
    ];

    /// Buckets rolled up into the POSITIONS line of the report.
    pub const INVESTMENT: [Bucket; 5] = [
        Bucket::CapitalStructure,
        Bucket::SeniorSub,
        Bucket::MismatchBasis,
        Bucket::MatchedBasis,
        Bucket::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::CapitalStructure => "CapitalStructure",
            Bucket::SeniorSub => "SeniorSub",
            Bucket::MismatchBasis => "MismatchBasis",
            Bucket::MatchedBasis => "MatchedBasis",
            Bucket::Other => "Other",
            Bucket::Hedge => "Hedge",
            Bucket::Cash => "Cash",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bucket::CapitalStructure => "Capital Structure",
            Bucket::SeniorSub => "Senior Sub",
            Bucket::MismatchBasis => "Mismatch Basis",
            Bucket::MatchedBasis => "Matched Basis",
            Bucket::Other => "Other",
            Bucket::Hedge => "Hedge",
            Bucket::Cash => "Cash",
        }
    }

    pub fn is_investment(self) -> bool {
        Self::INVESTMENT.contains(&self)
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Bucket {
    type Err = AttributionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Bucket::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| AttributionError::UnknownBucket(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Long,
    Short,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Long => 1.0,
            Direction::Short => -1.0,
        }
    }
}

/// A change in holdings. `quantity` is in units of the position's instrument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub date: NaiveDate,
    pub quantity: f64,
    /// EUR, non-negative.
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct Position {
    pub id: String,
    pub bucket: Bucket,
    pub pricer: Arc<dyn Pricer>,
    pub direction: Direction,
    /// Units held before the first listed transaction.
    pub opening_quantity: f64,
    pub schedule: CashflowSchedule,
    /// Sorted by date.
    pub transactions: Vec<Transaction>,
}

impl Position {
    /// Builds a position whose cashflow schedule is the pricer's own.
    pub fn new(
        id: impl Into<String>,
        bucket: Bucket,
        pricer: Arc<dyn Pricer>,
        direction: Direction,
        opening_quantity: f64,
        mut transactions: Vec<Transaction>,
    ) -> Result<Self, AttributionError> {
        let id = id.into();
        let invalid = |reason: String| AttributionError::InvalidPosition {
            id: id.clone(),
            reason,
        };
        if !opening_quantity.is_finite() {
            return Err(invalid(format!("opening quantity {opening_quantity}")));
        }
        transactions.sort_by_key(|tx| tx.date);
        for tx in &transactions {
            if !(tx.cost.is_finite() && tx.cost >= 0.0) {
                return Err(invalid(format!("negative cost on {}", tx.date)));
            }
            if !tx.quantity.is_finite() {
                return Err(invalid(format!("quantity on {}", tx.date)));
            }
            if let Some(maturity) = pricer.maturity() {
                if tx.date > maturity {
                    return Err(invalid(format!(
                        "trade on {} after maturity {maturity}",
                        tx.date
                    )));
                }
            }
        }
        let schedule = pricer.schedule();
        Ok(Self {
            id,
            bucket,
            pricer,
            direction,
            opening_quantity,
            schedule,
            transactions,
        })
    }

    pub fn with_schedule(mut self, schedule: CashflowSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    /// Units held just after all trades dated on or before `date`.
    pub fn quantity_after(&self, date: NaiveDate) -> f64 {
        self.opening_quantity
            + self
                .transactions
                .iter()
                .take_while(|tx| tx.date <= date)
                .map(|tx| tx.quantity)
                .sum::<f64>()
    }

    /// Costs of trades with `from < date <= to`.
    pub fn costs_in(&self, from: NaiveDate, to: NaiveDate) -> f64 {
        self.transactions
            .iter()
            .filter(|tx| tx.date > from && tx.date <= to)
            .map(|tx| tx.cost)
            .sum()
    }

    /// Coupon, trade and maturity dates strictly inside `(from, to]`.
    pub fn event_dates(&self, from: NaiveDate, to: NaiveDate) -> impl Iterator<Item = NaiveDate> + '_ {
        let coupons = self.schedule.entries().iter().map(|&(d, _)| d);
        let trades = self.transactions.iter().map(|tx| tx.date);
        coupons
            .chain(trades)
            .chain(self.pricer.maturity())
            .filter(move |&d| d > from && d <= to)
    }
}

/// Positions with unique ids. Base currency is always EUR.
#[derive(Debug, Clone, Default)]
pub struct Portfolio {
    positions: Vec<Position>,
}

impl Portfolio {
    pub fn new(positions: Vec<Position>) -> Result<Self, AttributionError> {
        let mut seen = HashSet::new();
        for p in &positions {
            if !seen.insert(p.id.as_str()) {
                return Err(AttributionError::DuplicatePositionId(p.id.clone()));
            }
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn base_currency(&self) -> &'static str {
        "EUR"
    }
}
