//! Market state: zero curves, credit/basis factors, FX quotes and dated
//! snapshots, plus CSV ingestion.
//!
//! FX quotes follow a single convention throughout: `rate` is the EUR price of
//! one unit of the asset currency. A market quote such as "EUR-USD 1.10"
//! (USD per EUR) must be inverted before it is loaded.

use std::io::{Read, Write};

use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("zero curve needs at least one node")]
    EmptyNodes,
    #[error("curve tenors must be finite, non-negative and strictly increasing")]
    NonMonotoneTenors,
    #[error("negative tenor {0}")]
    NegativeTenor(f64),
    #[error("invalid {field}: {value}")]
    InvalidValue { field: &'static str, value: f64 },
    #[error("curve anchored at {curve} but snapshot is as of {as_of}")]
    AnchorMismatch { as_of: NaiveDate, curve: NaiveDate },
    #[error("line {line}, column `{column}`: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },
    #[error("line {line}: missing field `{column}`")]
    MissingField { line: u64, column: String },
    #[error("duplicate snapshot date {0}")]
    DuplicateDate(NaiveDate),
    #[error("csv: {0}")]
    Csv(String),
}

/// Continuously compounded zero curve on ACT/365F tenors.
///
/// Zero rates are linear in tenor between nodes and flat beyond the first and
/// last node.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCurve {
    anchor: NaiveDate,
    nodes: Vec<(f64, f64)>,
}

impl ZeroCurve {
    pub fn new(anchor: NaiveDate, nodes: Vec<(f64, f64)>) -> Result<Self, MarketError> {
        if nodes.is_empty() {
            return Err(MarketError::EmptyNodes);
        }
        let tenors_ok = nodes.iter().all(|&(t, _)| t.is_finite() && t >= 0.0)
            && nodes.windows(2).all(|w| w[0].0 < w[1].0);
        if !tenors_ok {
            return Err(MarketError::NonMonotoneTenors);
        }
        if let Some(&(_, z)) = nodes.iter().find(|(_, z)| !z.is_finite()) {
            return Err(MarketError::InvalidValue {
                field: "zero rate",
                value: z,
            });
        }
        Ok(Self { anchor, nodes })
    }

    pub fn flat(anchor: NaiveDate, rate: f64) -> Result<Self, MarketError> {
        Self::new(anchor, vec![(1.0, rate)])
    }

    pub fn anchor(&self) -> NaiveDate {
        self.anchor
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// True when every node carries the same zero rate.
    pub fn flat_rate(&self) -> Option<f64> {
        let first = self.nodes[0].1;
        self.nodes.iter().all(|&(_, z)| z == first).then_some(first)
    }

    pub fn zero_rate(&self, tenor: f64) -> f64 {
        let nodes = &self.nodes;
        let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
        if tenor <= first.0 {
            return first.1;
        }
        if tenor >= last.0 {
            return last.1;
        }
        let hi = nodes.partition_point(|&(t, _)| t < tenor);
        let (t0, z0) = nodes[hi - 1];
        let (t1, z1) = nodes[hi];
        if tenor == t1 {
            return z1;
        }
        let w = (tenor - t0) / (t1 - t0);
        z0 + w * (z1 - z0)
    }

    pub fn discount_factor(&self, tenor: f64) -> Result<f64, MarketError> {
        if tenor < 0.0 || tenor.is_nan() {
            return Err(MarketError::NegativeTenor(tenor));
        }
        Ok((-self.zero_rate(tenor) * tenor).exp())
    }

    /// Same curve with every node rate moved by `shift`, re-anchored.
    pub fn shifted(&self, anchor: NaiveDate, shift: f64) -> Self {
        Self {
            anchor,
            nodes: self.nodes.iter().map(|&(t, z)| (t, z + shift)).collect(),
        }
    }
}

/// Non-rate pricing inputs: flat default intensity, recovery and an additive
/// basis (liquidity) spread on bond discounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketFactors {
    pub hazard_rate: f64,
    pub recovery: f64,
    pub basis_spread: f64,
}

impl MarketFactors {
    pub fn new(hazard_rate: f64, recovery: f64, basis_spread: f64) -> Result<Self, MarketError> {
        if !(hazard_rate.is_finite() && hazard_rate >= 0.0) {
            return Err(MarketError::InvalidValue {
                field: "hazard",
                value: hazard_rate,
            });
        }
        if !(0.0..1.0).contains(&recovery) {
            return Err(MarketError::InvalidValue {
                field: "recovery",
                value: recovery,
            });
        }
        if !basis_spread.is_finite() {
            return Err(MarketError::InvalidValue {
                field: "basis",
                value: basis_spread,
            });
        }
        Ok(Self {
            hazard_rate,
            recovery,
            basis_spread,
        })
    }
}

/// EUR price of one unit of the asset currency.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FxQuote(f64);

impl FxQuote {
    pub fn new(rate: f64) -> Result<Self, MarketError> {
        if rate.is_finite() && rate > 0.0 {
            Ok(Self(rate))
        } else {
            Err(MarketError::InvalidValue {
                field: "fx",
                value: rate,
            })
        }
    }

    pub fn rate(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketSnapshot {
    pub as_of: NaiveDate,
    pub curve: ZeroCurve,
    pub factors: MarketFactors,
    pub fx: FxQuote,
}

impl MarketSnapshot {
    pub fn new(
        as_of: NaiveDate,
        curve: ZeroCurve,
        factors: MarketFactors,
        fx: FxQuote,
    ) -> Result<Self, MarketError> {
        if curve.anchor() != as_of {
            return Err(MarketError::AnchorMismatch {
                as_of,
                curve: curve.anchor(),
            });
        }
        Ok(Self {
            as_of,
            curve,
            factors,
            fx,
        })
    }
}

pub const MARKET_CSV_HEADER: [&str; 7] = [
    "date",
    "fx",
    "hazard",
    "recovery",
    "basis",
    "curve_tenors",
    "curve_rates",
];

/// Reads market snapshots from CSV with header
/// `date,fx,hazard,recovery,basis,curve_tenors,curve_rates`.
///
/// Curve columns hold `;`-separated numbers of equal length. Rows may come in
/// any order; the result is sorted by date. Line numbers in errors count the
/// header as line 1.
pub fn load_market_snapshots<R: Read>(source: R) -> Result<Vec<MarketSnapshot>, MarketError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| MarketError::Csv(e.to_string()))?
        .clone();
    let mut index = [0usize; 7];
    for (slot, name) in index.iter_mut().zip(MARKET_CSV_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| MarketError::MissingField {
                line: 1,
                column: name.to_string(),
            })?;
    }

    let mut snapshots = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let line = row as u64 + 2;
        let record = record.map_err(|e| MarketError::Csv(e.to_string()))?;
        let field = |k: usize| -> Result<&str, MarketError> {
            match record.get(index[k]) {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(MarketError::MissingField {
                    line,
                    column: MARKET_CSV_HEADER[k].to_string(),
                }),
            }
        };
        let parse_err = |k: usize, message: String| MarketError::Parse {
            line,
            column: MARKET_CSV_HEADER[k].to_string(),
            message,
        };
        let number = |k: usize| -> Result<f64, MarketError> {
            field(k)?
                .parse::<f64>()
                .map_err(|e| parse_err(k, e.to_string()))
        };
        let list = |k: usize| -> Result<Vec<f64>, MarketError> {
            field(k)?
                .split(';')
                .map(|s| s.trim().parse::<f64>().map_err(|e| parse_err(k, e.to_string())))
                .collect()
        };

        let date = NaiveDate::parse_from_str(field(0)?, "%Y-%m-%d")
            .map_err(|e| parse_err(0, e.to_string()))?;
        let fx = FxQuote::new(number(1)?).map_err(|e| parse_err(1, e.to_string()))?;
        let factors = MarketFactors::new(number(2)?, number(3)?, number(4)?).map_err(|e| {
            let k = match &e {
                MarketError::InvalidValue { field: "hazard", .. } => 2,
                MarketError::InvalidValue { field: "recovery", .. } => 3,
                _ => 4,
            };
            parse_err(k, e.to_string())
        })?;
        let tenors = list(5)?;
        let rates = list(6)?;
        if tenors.len() != rates.len() {
            return Err(parse_err(
                6,
                format!("{} rates for {} tenors", rates.len(), tenors.len()),
            ));
        }
        let curve = ZeroCurve::new(date, tenors.into_iter().zip(rates).collect())
            .map_err(|e| parse_err(5, e.to_string()))?;
        snapshots.push(MarketSnapshot::new(date, curve, factors, fx)?);
    }

    snapshots.sort_by_key(|s| s.as_of);
    if let Some(w) = snapshots.windows(2).find(|w| w[0].as_of == w[1].as_of) {
        return Err(MarketError::DuplicateDate(w[0].as_of));
    }
    Ok(snapshots)
}

/// Writes snapshots in the format read by [`load_market_snapshots`].
/// Numbers use Rust's shortest round-trip formatting, so reloading is exact.
pub fn write_market_snapshots<W: Write>(
    sink: W,
    snapshots: &[MarketSnapshot],
) -> Result<(), MarketError> {
    let mut writer = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| MarketError::Csv(e.to_string());
    writer.write_record(MARKET_CSV_HEADER).map_err(csv_err)?;
    let join = |values: Vec<f64>| {
        values
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(";")
    };
    for s in snapshots {
        let (tenors, rates): (Vec<f64>, Vec<f64>) = s.curve.nodes().iter().copied().unzip();
        writer
            .write_record([
                s.as_of.format("%Y-%m-%d").to_string(),
                s.fx.rate().to_string(),
                s.factors.hazard_rate.to_string(),
                s.factors.recovery.to_string(),
                s.factors.basis_spread.to_string(),
                join(tenors),
                join(rates),
            ])
            .map_err(csv_err)?;
    }
    writer
        .flush()
        .map_err(|e| MarketError::Csv(e.to_string()))
}
