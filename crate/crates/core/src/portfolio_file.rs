//! Portfolio files.
//!
//! A portfolio is a TOML document with one `[[position]]` table per
//! position and optional `[[line]]` tables for pass-through report lines
//! (fees, other costs) given directly in EUR:
//!
//! ```toml
//! [[position]]
//! id = "LUMN-BOND"
//! bucket = "MatchedBasis"        # CapitalStructure, SeniorSub, MismatchBasis,
//!                                # MatchedBasis, Other, Hedge, Cash
//! direction = "long"             # or "short"; default long
//! quantity = 1.0                 # units held before the first trade; default 0
//!
//! [position.bond]                # exactly one of bond / cds / cash
//! notional = 4000000.0
//! issue = 2019-11-15
//! maturity = 2027-11-15
//! coupon_rate = 0.0475
//! frequency = 2
//! currency = "USD"
//!
//! [[position.trade]]
//! date = 2022-02-01
//! quantity = -0.25
//! cost = 1500.0                  # EUR
//!
//! [[line]]
//! label = "FEES"
//! amount_eur = -125000.0
//! ```
//!
//! CDS tables take `notional, maturity, spread, protection ("bought" or
//! "sold"), currency`; cash tables take `balance, rate, start, currency`.
//! Dates may be TOML dates or ISO strings.

use std::path::Path;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::attribution::{
    AttributionError, Bucket, Direction, Portfolio, Position, Transaction,
};
use crate::pricers::{BondSpec, CashSpec, CdsDirection, CdsSpec, Instrument, PricingError};

#[derive(Debug, Error)]
pub enum PortfolioError {
    #[error("reading {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown bucket `{token}`")]
    UnknownBucket { line: usize, token: String },
    #[error("line {line}: duplicate position id `{id}`")]
    DuplicatePositionId { line: usize, id: String },
    #[error("line {line}: position `{id}`: {message}")]
    InvalidPosition {
        line: usize,
        id: String,
        message: String,
    },
}

/// A report line passed through unchanged, in EUR.
#[derive(Debug, Clone, PartialEq)]
pub struct StandaloneLine {
    pub label: String,
    pub amount_eur: f64,
}

#[derive(Debug, Clone)]
pub struct PortfolioFile {
    pub portfolio: Portfolio,
    pub lines: Vec<StandaloneLine>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    position: Vec<RawPosition>,
    #[serde(default)]
    line: Vec<RawLine>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    label: String,
    amount_eur: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPosition {
    id: Spanned<String>,
    bucket: Spanned<String>,
    #[serde(default)]
    direction: Option<Spanned<String>>,
    #[serde(default)]
    quantity: f64,
    bond: Option<RawBond>,
    cds: Option<RawCds>,
    cash: Option<RawCash>,
    #[serde(default)]
    trade: Vec<RawTrade>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBond {
    notional: f64,
    issue: Spanned<toml::Value>,
    maturity: Spanned<toml::Value>,
    coupon_rate: f64,
    frequency: u32,
    currency: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCds {
    notional: f64,
    maturity: Spanned<toml::Value>,
    spread: f64,
    protection: Spanned<String>,
    currency: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCash {
    balance: f64,
    rate: f64,
    start: Spanned<toml::Value>,
    currency: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrade {
    date: Spanned<toml::Value>,
    quantity: f64,
    #[serde(default)]
    cost: f64,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn at(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].matches('\n').count() + 1
    }
}

fn date(value: &Spanned<toml::Value>, lines: &Lines) -> Result<NaiveDate, PortfolioError> {
    let text = match value.get_ref() {
        toml::Value::Datetime(dt) => dt.to_string(),
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    NaiveDate::parse_from_str(&text, "%Y-%m-%d").map_err(|e| PortfolioError::Parse {
        line: lines.at(value.span().start),
        message: format!("invalid date `{text}`: {e}"),
    })
}

/// Parses a portfolio document; see the module docs for the schema.
pub fn parse_portfolio(text: &str) -> Result<PortfolioFile, PortfolioError> {
    let lines = Lines(text);
    let raw: RawFile = toml::from_str(text).map_err(|e| PortfolioError::Parse {
        line: e.span().map_or(0, |s| lines.at(s.start)),
        message: e.message().to_string(),
    })?;

    let mut positions = Vec::with_capacity(raw.position.len());
    for p in raw.position {
        let line = lines.at(p.id.span().start);
        let id = p.id.get_ref().clone();
        let invalid = |message: String| PortfolioError::InvalidPosition {
            line,
            id: id.clone(),
            message,
        };
        let spec_err = |e: PricingError| invalid(e.to_string());

        let bucket: Bucket = p.bucket.get_ref().parse().map_err(|_| PortfolioError::UnknownBucket {
            line: lines.at(p.bucket.span().start),
            token: p.bucket.get_ref().clone(),
        })?;
        let direction = match p.direction.as_ref().map(|d| d.get_ref().as_str()) {
            None | Some("long") => Direction::Long,
            Some("short") => Direction::Short,
            Some(other) => {
                return Err(PortfolioError::Parse {
                    line: lines.at(p.direction.as_ref().unwrap().span().start),
                    message: format!("direction must be `long` or `short`, got `{other}`"),
                })
            }
        };

        let instrument = match (p.bond, p.cds, p.cash) {
            (Some(b), None, None) => Instrument::Bond(
                BondSpec::new(
                    b.notional,
                    date(&b.issue, &lines)?,
                    date(&b.maturity, &lines)?,
                    b.coupon_rate,
                    b.frequency,
                    b.currency,
                )
                .map_err(spec_err)?,
            ),
            (None, Some(c), None) => {
                let protection = match c.protection.get_ref().as_str() {
                    "bought" => CdsDirection::ProtectionBought,
                    "sold" => CdsDirection::ProtectionSold,
                    other => {
                        return Err(PortfolioError::Parse {
                            line: lines.at(c.protection.span().start),
                            message: format!("protection must be `bought` or `sold`, got `{other}`"),
                        })
                    }
                };
                Instrument::Cds(
                    CdsSpec::new(
                        c.notional,
                        date(&c.maturity, &lines)?,
                        c.spread,
                        protection,
                        c.currency,
                    )
                    .map_err(spec_err)?,
                )
            }
            (None, None, Some(c)) => {
                if !(c.balance.is_finite() && c.rate.is_finite()) {
                    return Err(invalid("cash balance and rate must be finite".into()));
                }
                Instrument::Cash(CashSpec {
                    balance: c.balance,
                    deposit_rate: c.rate,
                    start: date(&c.start, &lines)?,
                    currency: c.currency,
                })
            }
            _ => return Err(invalid("exactly one of bond, cds or cash is required".into())),
        };

        let trades = p
            .trade
            .iter()
            .map(|t| {
                Ok(Transaction {
                    date: date(&t.date, &lines)?,
                    quantity: t.quantity,
                    cost: t.cost,
                })
            })
            .collect::<Result<Vec<_>, PortfolioError>>()?;

        let position = Position::new(
            id.clone(),
            bucket,
            Arc::new(instrument),
            direction,
            p.quantity,
            trades,
        )
        .map_err(|e| match e {
            AttributionError::InvalidPosition { reason, .. } => invalid(reason),
            other => invalid(other.to_string()),
        })?;
        if positions.iter().any(|(q, _): &(Position, usize)| q.id == id) {
            return Err(PortfolioError::DuplicatePositionId { line, id });
        }
        positions.push((position, line));
    }

    let portfolio = Portfolio::new(positions.into_iter().map(|(p, _)| p).collect())
        .map_err(|e| PortfolioError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
    let lines = raw
        .line
        .into_iter()
        .map(|l| StandaloneLine {
            label: l.label,
            amount_eur: l.amount_eur,
        })
        .collect();
    Ok(PortfolioFile { portfolio, lines })
}

pub fn load_portfolio(path: impl AsRef<Path>) -> Result<PortfolioFile, PortfolioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| PortfolioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_portfolio(&text)
}
