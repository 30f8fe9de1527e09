//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use attrib_core::attribution::Direction;
use attrib_core::{
    BondSpec, Bucket, CdsDirection, CdsSpec, FxQuote, Instrument, MarketFactors, MarketSnapshot,
    Portfolio, Position, Transaction, ZeroCurve,
};
use chrono::{Days, NaiveDate};

pub fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2022, 1, 1).unwrap()
}

pub fn end() -> NaiveDate {
    NaiveDate::from_ymd_opt(2022, 4, 1).unwrap()
}

/// Daily snapshots from `start()` to `end()` with drifting curves, spreads and FX.
pub fn snapshots() -> Vec<MarketSnapshot> {
    let days = (end() - start()).num_days() as u64;
    (0..=days)
        .map(|k| {
            let date = start() + Days::new(k);
            let f = k as f64 / days as f64;
            let nodes = [0.25, 1.0, 2.0, 5.0, 10.0, 30.0]
                .iter()
                .enumerate()
                .map(|(i, &tenor)| (tenor, 0.002 + 0.003 * i as f64 + 0.012 * f))
                .collect();
            MarketSnapshot::new(
                date,
                ZeroCurve::new(date, nodes).unwrap(),
                MarketFactors::new(0.02 + 0.01 * (6.0 * f).sin().abs(), 0.4, 0.002 - 0.001 * f).unwrap(),
                FxQuote::new(0.88 + 0.03 * f).unwrap(),
            )
            .unwrap()
        })
        .collect()
}

/// `n` bond and CDS positions with staggered coupon dates and one trade each.
pub fn portfolio(n: usize) -> Portfolio {
    let positions = (0..n)
        .map(|i| {
            let maturity = start() + Days::new(400 + 97 * i as u64);
            let instrument = if i % 3 == 2 {
                Instrument::Cds(CdsSpec::new(2e6, maturity, 0.01, CdsDirection::ProtectionBought, "USD").unwrap())
            } else {
                let issue = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
                Instrument::Bond(BondSpec::new(1e6 + 1e5 * i as f64, issue, maturity, 0.03 + 0.001 * i as f64, 4, "USD").unwrap())
            };
            let trade = Transaction {
                date: start() + Days::new(1 + (i as u64 * 7) % 89),
                quantity: 0.1,
                cost: 250.0,
            };
            Position::new(
                format!("P{i}"),
                Bucket::INVESTMENT[i % Bucket::INVESTMENT.len()],
                Arc::new(instrument),
                Direction::Long,
                1.0,
                vec![trade],
            )
            .unwrap()
        })
        .collect();
    Portfolio::new(positions).unwrap()
}
