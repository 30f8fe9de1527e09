//! Attribution reports.
//!
//! Layout follows a fund performance table: one row per position, a
//! subtotal per bucket, a POSITIONS line summing the investment buckets'
//! hedged PnL, standalone lines, and a TOTAL.
//!
//! Standalone lines:
//!
//! - `CASH PARKING`: full PnL net of costs of `Cash` positions;
//! - `IR HEDGE COSTS`: non-FX PnL net of costs of `Hedge` positions plus the
//!   rate part of all investment positions, i.e. what the rate hedge failed
//!   to offset;
//! - `FX COSTS/DISCREPANCY`: FX part of `Hedge` positions plus the FX part of
//!   all investment positions;
//! - pass-through lines from the portfolio file, in file order.
//!
//! With this split the TOTAL equals the fund's PnL net of costs plus the
//! pass-through lines. EUR prints with 0 decimals and basis points of NAV
//! with 1 decimal, both rounded half to even.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::attribution::{Bucket, PositionAttribution};
use crate::portfolio_file::StandaloneLine;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to report")]
    EmptyResults,
    #[error("NAV must be positive and finite, got {0}")]
    InvalidNav(f64),
    #[error("csv: {0}")]
    Csv(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
    Text,
}

pub const CASH_PARKING: &str = "CASH PARKING";
pub const IR_HEDGE_COSTS: &str = "IR HEDGE COSTS";
pub const FX_DISCREPANCY: &str = "FX COSTS/DISCREPANCY";

/// EUR amounts of one report row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Amounts {
    pub fx: f64,
    pub rate: f64,
    pub market: f64,
    pub carry: f64,
    pub costs: f64,
    pub total: f64,
    pub hedged: f64,
}

impl Amounts {
    fn of(p: &PositionAttribution) -> Self {
        let a = &p.aggregate;
        Self {
            fx: a.fx,
            rate: a.rate,
            market: a.market,
            carry: a.carry,
            costs: p.costs,
            total: a.total,
            hedged: p.hedged_pnl(),
        }
    }

    fn sum<'a>(items: impl IntoIterator<Item = &'a Amounts>) -> Self {
        items.into_iter().fold(Self::default(), |acc, x| Self {
            fx: acc.fx + x.fx,
            rate: acc.rate + x.rate,
            market: acc.market + x.market,
            carry: acc.carry + x.carry,
            costs: acc.costs + x.costs,
            total: acc.total + x.total,
            hedged: acc.hedged + x.hedged,
        })
    }

    fn values(&self) -> [f64; 7] {
        [
            self.fx,
            self.rate,
            self.market,
            self.carry,
            self.costs,
            self.total,
            self.hedged,
        ]
    }
}

/// One position. `hedged = market + carry − costs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub position: String,
    pub bucket: Bucket,
    pub amounts: Amounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketSection {
    pub bucket: Bucket,
    pub subtotal: Amounts,
    /// Highest and lowest hedged PnL among the members.
    pub top: String,
    pub worst: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineItem {
    pub label: String,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub nav: Option<f64>,
    pub rows: Vec<ReportRow>,
    pub buckets: Vec<BucketSection>,
    /// Sum over investment buckets.
    pub positions_total: Amounts,
    pub lines: Vec<LineItem>,
    /// Component columns: every position. `hedged`: POSITIONS plus all lines.
    pub total: Amounts,
}

impl Report {
    pub fn positions_line(&self) -> f64 {
        self.positions_total.hedged
    }

    pub fn total_line(&self) -> f64 {
        self.total.hedged
    }

    pub fn bps(&self, eur: f64) -> Option<f64> {
        self.nav.map(|nav| to_bps(eur, nav))
    }
}

/// `eur / nav · 10 000`, rounded half to even at one decimal.
pub fn to_bps(eur: f64, nav: f64) -> f64 {
    // One division, so exact decimal ties stay ties.
    (eur * 100_000.0 / nav).round_ties_even() / 10.0
}

pub fn build_report(
    results: &[PositionAttribution],
    extra_lines: &[StandaloneLine],
    nav: Option<f64>,
) -> Result<Report, ReportError> {
    if results.is_empty() {
        return Err(ReportError::EmptyResults);
    }
    if let Some(nav) = nav {
        if !(nav.is_finite() && nav > 0.0) {
            return Err(ReportError::InvalidNav(nav));
        }
    }
    let rows: Vec<ReportRow> = results
        .iter()
        .map(|p| ReportRow {
            position: p.id.clone(),
            bucket: p.bucket,
            amounts: Amounts::of(p),
        })
        .collect();

    let buckets: Vec<BucketSection> = Bucket::ALL
        .into_iter()
        .filter_map(|bucket| {
            let members: Vec<&ReportRow> = rows.iter().filter(|r| r.bucket == bucket).collect();
            let first = members.first()?;
            let (mut top, mut worst) = (*first, *first);
            for r in &members[1..] {
                if r.amounts.hedged > top.amounts.hedged {
                    top = r;
                }
                if r.amounts.hedged < worst.amounts.hedged {
                    worst = r;
                }
            }
            Some(BucketSection {
                bucket,
                subtotal: Amounts::sum(members.iter().map(|r| &r.amounts)),
                top: top.position.clone(),
                worst: worst.position.clone(),
            })
        })
        .collect();

    let sum_where = |pred: fn(Bucket) -> bool| {
        Amounts::sum(rows.iter().filter(|r| pred(r.bucket)).map(|r| &r.amounts))
    };
    let invest = sum_where(Bucket::is_investment);
    let hedge = sum_where(|b| b == Bucket::Hedge);
    let cash = sum_where(|b| b == Bucket::Cash);

    let mut lines = vec![
        LineItem {
            label: CASH_PARKING.into(),
            amount: cash.total - cash.costs,
        },
        LineItem {
            label: IR_HEDGE_COSTS.into(),
            amount: hedge.rate + hedge.market + hedge.carry - hedge.costs + invest.rate,
        },
        LineItem {
            label: FX_DISCREPANCY.into(),
            amount: hedge.fx + invest.fx,
        },
    ];
    lines.extend(extra_lines.iter().map(|l| LineItem {
        label: l.label.clone(),
        amount: l.amount_eur,
    }));

    let mut total = Amounts::sum(rows.iter().map(|r| &r.amounts));
    total.hedged = invest.hedged + lines.iter().map(|l| l.amount).sum::<f64>();

    Ok(Report {
        nav,
        rows,
        buckets,
        positions_total: invest,
        lines,
        total,
    })
}

fn eur(v: f64) -> String {
    let s = format!("{v:.0}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn bps_str(v: f64) -> String {
    let s = format!("{v:.1}");
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

const COLUMNS: [&str; 7] = [
    "fx", "rate", "market", "carry", "costs", "total", "hedged",
];

fn render_csv(report: &Report) -> Result<Vec<u8>, ReportError> {
    let err = |e: csv::Error| ReportError::Csv(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["position".to_string(), "bucket".to_string()];
    header.extend(COLUMNS.iter().map(|c| format!("{c}_eur")));
    if report.nav.is_some() {
        header.extend(COLUMNS.iter().map(|c| format!("{c}_bps")));
    }
    w.write_record(&header).map_err(err)?;

    let full = |name: &str, bucket: &str, a: &Amounts| {
        let mut rec = vec![name.to_string(), bucket.to_string()];
        rec.extend(a.values().iter().map(|&v| eur(v)));
        if let Some(nav) = report.nav {
            rec.extend(a.values().iter().map(|&v| bps_str(to_bps(v, nav))));
        }
        rec
    };
    let line_only = |name: &str, amount: f64| {
        let mut rec = vec![name.to_string(), String::new()];
        rec.extend(std::iter::repeat_n(String::new(), 6));
        rec.push(eur(amount));
        if let Some(nav) = report.nav {
            rec.extend(std::iter::repeat_n(String::new(), 6));
            rec.push(bps_str(to_bps(amount, nav)));
        }
        rec
    };

    for r in &report.rows {
        w.write_record(full(&r.position, r.bucket.as_str(), &r.amounts))
            .map_err(err)?;
    }
    for b in &report.buckets {
        w.write_record(full("SUBTOTAL", b.bucket.as_str(), &b.subtotal))
            .map_err(err)?;
    }
    w.write_record(full("POSITIONS", "", &report.positions_total))
        .map_err(err)?;
    for l in &report.lines {
        w.write_record(line_only(&l.label, l.amount)).map_err(err)?;
    }
    w.write_record(full("TOTAL", "", &report.total)).map_err(err)?;
    w.into_inner().map_err(|e| ReportError::Csv(e.to_string()))
}

#[derive(Serialize)]
struct JsonAmounts {
    fx_eur: f64,
    rate_eur: f64,
    market_eur: f64,
    carry_eur: f64,
    costs_eur: f64,
    total_eur: f64,
    hedged_eur: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fx_bps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate_bps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    market_bps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    carry_bps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    costs_bps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_bps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hedged_bps: Option<f64>,
}

fn round_eur(v: f64) -> f64 {
    let r = v.round_ties_even();
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl JsonAmounts {
    fn new(a: &Amounts, nav: Option<f64>) -> Self {
        let b = |v: f64| nav.map(|n| to_bps(v, n) + 0.0);
        Self {
            fx_eur: round_eur(a.fx),
            rate_eur: round_eur(a.rate),
            market_eur: round_eur(a.market),
            carry_eur: round_eur(a.carry),
            costs_eur: round_eur(a.costs),
            total_eur: round_eur(a.total),
            hedged_eur: round_eur(a.hedged),
            fx_bps: b(a.fx),
            rate_bps: b(a.rate),
            market_bps: b(a.market),
            carry_bps: b(a.carry),
            costs_bps: b(a.costs),
            total_bps: b(a.total),
            hedged_bps: b(a.hedged),
        }
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    position: &'a str,
    bucket: &'a str,
    #[serde(flatten)]
    amounts: JsonAmounts,
}

#[derive(Serialize)]
struct JsonBucket<'a> {
    bucket: &'a str,
    top: &'a str,
    worst: &'a str,
    subtotal: JsonAmounts,
    positions: Vec<JsonRow<'a>>,
}

#[derive(Serialize)]
struct JsonLine<'a> {
    label: &'a str,
    hedged_eur: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    hedged_bps: Option<f64>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    nav: Option<f64>,
    buckets: Vec<JsonBucket<'a>>,
    positions: JsonAmounts,
    lines: Vec<JsonLine<'a>>,
    total: JsonAmounts,
}

fn render_json(report: &Report) -> Result<Vec<u8>, ReportError> {
    let nav = report.nav;
    let doc = JsonReport {
        nav,
        buckets: report
            .buckets
            .iter()
            .map(|b| JsonBucket {
                bucket: b.bucket.as_str(),
                top: &b.top,
                worst: &b.worst,
                subtotal: JsonAmounts::new(&b.subtotal, nav),
                positions: report
                    .rows
                    .iter()
                    .filter(|r| r.bucket == b.bucket)
                    .map(|r| JsonRow {
                        position: &r.position,
                        bucket: r.bucket.as_str(),
                        amounts: JsonAmounts::new(&r.amounts, nav),
                    })
                    .collect(),
            })
            .collect(),
        positions: JsonAmounts::new(&report.positions_total, nav),
        lines: report
            .lines
            .iter()
            .map(|l| JsonLine {
                label: &l.label,
                hedged_eur: round_eur(l.amount),
                hedged_bps: nav.map(|n| to_bps(l.amount, n) + 0.0),
            })
            .collect(),
        total: JsonAmounts::new(&report.total, nav),
    };
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

fn render_text(report: &Report) -> Vec<u8> {
    let fmt = |v: f64| match report.nav {
        Some(nav) => bps_str(to_bps(v, nav)),
        None => eur(v),
    };
    let unit = if report.nav.is_some() { "bps of NAV" } else { "EUR" };
    let mut s = String::new();
    let _ = writeln!(s, "{:<44}{:>12}", format!("Hedged PnL ({unit})"), "");
    let _ = writeln!(s, "{:<44}{:>12}", "POSITIONS", fmt(report.positions_line()));
    for b in report.buckets.iter().filter(|b| b.bucket.is_investment()) {
        let _ = writeln!(s, "  {:<30}{:>12}", b.bucket.label(), fmt(b.subtotal.hedged));
        let hedged = |id: &str| {
            report
                .rows
                .iter()
                .find(|r| r.position == id)
                .map_or(0.0, |r| r.amounts.hedged)
        };
        if b.top == b.worst {
            let _ = writeln!(s, "    {:<20}{:>10}", format!("top=worst: {}", b.top), fmt(hedged(&b.top)));
        } else {
            let _ = writeln!(s, "    {:<20}{:>10}", format!("top: {}", b.top), fmt(hedged(&b.top)));
            let _ = writeln!(s, "    {:<20}{:>10}", format!("worst: {}", b.worst), fmt(hedged(&b.worst)));
        }
    }
    for l in &report.lines {
        let _ = writeln!(s, "{:<44}{:>12}", l.label, fmt(l.amount));
    }
    let _ = writeln!(s, "{:<44}{:>12}", "TOTAL", fmt(report.total_line()));
    s.into_bytes()
}

/// Renders `results` plus pass-through lines. Output is a pure function of
/// the inputs.
pub fn render_report(
    results: &[PositionAttribution],
    extra_lines: &[StandaloneLine],
    format: ReportFormat,
    nav: Option<f64>,
) -> Result<Vec<u8>, ReportError> {
    let report = build_report(results, extra_lines, nav)?;
    match format {
        ReportFormat::Csv => render_csv(&report),
        ReportFormat::Json => render_json(&report),
        ReportFormat::Text => Ok(render_text(&report)),
    }
}
