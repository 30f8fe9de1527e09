#![allow(dead_code)]

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use attrib_core::daycount::year_fraction;
use attrib_core::{
    CashflowSchedule, FxQuote, MarketFactors, MarketSnapshot, Pricer, PricingError, ZeroCurve,
};
use chrono::{Days, NaiveDate};

pub fn d(y: i32, m: u32, day: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, day).unwrap()
}

pub fn base() -> NaiveDate {
    d(2022, 1, 1)
}

/// A date `days` after [`base`].
pub fn day(days: u64) -> NaiveDate {
    base().checked_add_days(Days::new(days)).unwrap()
}

/// Snapshot with a flat curve at `r`, hazard `x`, recovery 0.4, no basis.
pub fn snap(date: NaiveDate, r: f64, x: f64, chi: f64) -> MarketSnapshot {
    MarketSnapshot::new(
        date,
        ZeroCurve::flat(date, r).unwrap(),
        MarketFactors::new(x, 0.4, 0.0).unwrap(),
        FxQuote::new(chi).unwrap(),
    )
    .unwrap()
}

pub type ScalarFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// Prices through `f(s, r, x)` with `s` in years since [`base`], `r` the
/// one-year zero rate and `x` the hazard rate.
#[derive(Clone)]
pub struct FnPricer {
    pub f: Arc<ScalarFn>,
    pub schedule: CashflowSchedule,
}

impl FnPricer {
    pub fn new(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            schedule: CashflowSchedule::empty(),
        }
    }

    pub fn with_schedule(mut self, schedule: CashflowSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn eval(&self, date: NaiveDate, r: f64, x: f64) -> f64 {
        (self.f)(year_fraction(base(), date), r, x)
    }
}

impl fmt::Debug for FnPricer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnPricer")
    }
}

impl Pricer for FnPricer {
    fn price(&self, valuation: NaiveDate, curve: &ZeroCurve, factors: &MarketFactors) -> Result<f64, PricingError> {
        Ok(self.eval(valuation, curve.zero_rate(1.0), factors.hazard_rate))
    }

    fn schedule(&self) -> CashflowSchedule {
        self.schedule.clone()
    }
}

/// Ex-coupon prices looked up by valuation date; market state ignored.
#[derive(Debug, Clone)]
pub struct TablePricer {
    pub prices: HashMap<NaiveDate, f64>,
    pub schedule: CashflowSchedule,
}

impl Pricer for TablePricer {
    fn price(&self, valuation: NaiveDate, _: &ZeroCurve, _: &MarketFactors) -> Result<f64, PricingError> {
        self.prices
            .get(&valuation)
            .copied()
            .ok_or(PricingError::InvalidSpec(format!("no price on {valuation}")))
    }

    fn schedule(&self) -> CashflowSchedule {
        self.schedule.clone()
    }
}

/// `|a − b| ≤ tol · max(1, |b|)`
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Random smooth pricer family in `(s, r, x)` with a fixed coefficient vector.
pub fn poly_pricer(c: [f64; 8]) -> FnPricer {
    FnPricer::new(move |s, r, x| {
        c[0] + c[1] * s + c[2] * r + c[3] * x + c[4] * r * r + c[5] * r * x + c[6] * s * r
            + c[7] * (s * x).sin()
    })
}

use attrib_core::attribution::Direction;
use attrib_core::{BondSpec, FxMode, Instrument, Position, Transaction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The final four-part display written out term by term from the eight raw
/// prices `A_u(r_v, x_w)`. Returns `(fx, rate, market, carry, total)`.
pub fn eight_evaluation_oracle(
    pricer: &dyn Pricer,
    t: &MarketSnapshot,
    big_t: &MarketSnapshot,
    mode: FxMode,
) -> (f64, f64, f64, f64, f64) {
    // a[u][v][w] = A_u(r_v, x_w), index 0 for t and 1 for T.
    let ends = [t, big_t];
    let mut a = [[[0.0; 2]; 2]; 2];
    for (u, su) in ends.iter().enumerate() {
        for (v, sv) in ends.iter().enumerate() {
            for (w, sw) in ends.iter().enumerate() {
                a[u][v][w] = pricer.price(su.as_of, &sv.curve, &sw.factors).unwrap();
            }
        }
    }
    let (l, h) = (0, 1);
    let (chi_t, chi_bt) = (t.fx.rate(), big_t.fx.rate());
    let (fx, w) = match mode {
        FxMode::AverageWeights => ((a[l][l][l] + a[h][h][h]) / 2.0 * (chi_bt - chi_t), (chi_t + chi_bt) / 2.0),
        FxMode::StartEnd => (a[l][l][l] * (chi_bt - chi_t), chi_bt),
    };
    let rate = w * ((a[h][h][h] - a[h][l][h]) / 2.0 + (a[l][h][l] - a[l][l][l]) / 2.0);
    let market = w * ((a[h][h][h] - a[h][h][l]) / 2.0 + (a[l][l][h] - a[l][l][l]) / 2.0);
    let carry = w * ((a[h][h][l] - a[l][h][l]) / 2.0 + (a[h][l][h] - a[l][l][h]) / 2.0);
    let total = a[h][h][h] * chi_bt - a[l][l][l] * chi_t;
    (fx, rate, market, carry, total)
}

pub fn random_poly(rng: &mut ChaCha8Rng) -> [f64; 8] {
    [
        rng.random_range(50.0..150.0),
        rng.random_range(-5.0..5.0),
        rng.random_range(-500.0..500.0),
        rng.random_range(-300.0..300.0),
        rng.random_range(-2000.0..2000.0),
        rng.random_range(-1000.0..1000.0),
        rng.random_range(-50.0..50.0),
        rng.random_range(-10.0..10.0),
    ]
}

pub fn random_snapshot(rng: &mut ChaCha8Rng, date: NaiveDate) -> MarketSnapshot {
    let n = rng.random_range(1..5);
    let nodes = (1..=n)
        .map(|k| (k as f64 * 1.5, rng.random_range(-0.01..0.06)))
        .collect();
    MarketSnapshot::new(
        date,
        ZeroCurve::new(date, nodes).unwrap(),
        MarketFactors::new(
            rng.random_range(0.0..0.1),
            rng.random_range(0.0..0.6),
            rng.random_range(-0.005..0.01),
        )
        .unwrap(),
        FxQuote::new(rng.random_range(0.7..1.5)).unwrap(),
    )
    .unwrap()
}

/// A randomized position with coupons and trades over `(t, T]` and a
/// snapshot for every date it could need.
pub struct Instance {
    pub position: Position,
    pub t: NaiveDate,
    pub big_t: NaiveDate,
    pub snapshots: Vec<MarketSnapshot>,
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.random_range(20..400u64);
    let (t, big_t) = (day(0), day(len));
    let inside = |rng: &mut ChaCha8Rng| day(rng.random_range(1..=len));

    let pricer: Arc<dyn Pricer> = if rng.random_bool(0.5) {
        let mut dates: Vec<NaiveDate> = (0..rng.random_range(0..4)).map(|_| inside(&mut rng)).collect();
        dates.sort();
        dates.dedup();
        let schedule = CashflowSchedule::new(
            dates.into_iter().map(|d| (d, rng.random_range(0.0..5.0))).collect(),
        )
        .unwrap();
        Arc::new(poly_pricer(random_poly(&mut rng)).with_schedule(schedule))
    } else {
        let maturity = day(rng.random_range(len / 2..len * 8));
        let freq = [1, 2, 4, 12][rng.random_range(0..4)];
        let spec = BondSpec::new(100.0, d(2019, 1, 1), maturity, rng.random_range(0.0..0.1), freq, "USD").unwrap();
        Arc::new(Instrument::Bond(spec))
    };
    let last_trade = pricer.maturity().map_or(len, |m| len.min((m - t).num_days() as u64));
    let trades = (0..rng.random_range(0..4))
        .map(|_| Transaction {
            date: day(rng.random_range(1..=last_trade.max(1))),
            quantity: rng.random_range(-1.0..1.0),
            cost: rng.random_range(0.0..100.0),
        })
        .collect();
    let direction = if rng.random_bool(0.5) { Direction::Long } else { Direction::Short };
    let position = Position::new(
        format!("P{seed}"),
        attrib_core::Bucket::Other,
        pricer,
        direction,
        rng.random_range(0.5..3.0),
        trades,
    )
    .unwrap();
    let mut dates: Vec<NaiveDate> = vec![t, big_t];
    dates.extend(position.event_dates(t, big_t));
    for _ in 0..rng.random_range(0..3) {
        dates.push(inside(&mut rng));
    }
    dates.sort();
    dates.dedup();
    let snapshots = dates.into_iter().map(|d| random_snapshot(&mut rng, d)).collect();
    Instance {
        position,
        t,
        big_t,
        snapshots,
    }
}

/// Realized EUR PnL of a position over `grid` with coupons converted at the
/// subperiod's average rate, or at `chi_final` when given.
pub fn realized_pnl(
    position: &Position,
    snapshots: &[MarketSnapshot],
    grid: &[NaiveDate],
    chi_final: Option<f64>,
) -> f64 {
    let at = |d: NaiveDate| snapshots.iter().find(|s| s.as_of == d).unwrap();
    let value = |d: NaiveDate| {
        let s = at(d);
        position.pricer.price(d, &s.curve, &s.factors).unwrap() * s.fx.rate()
    };
    let mut pnl = 0.0;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        if position.pricer.maturity().is_some_and(|m| a >= m) {
            continue;
        }
        let held = position.direction.sign() * position.quantity_after(a);
        let coupon_chi = chi_final.unwrap_or((at(a).fx.rate() + at(b).fx.rate()) / 2.0);
        pnl += held * (value(b) - value(a) + position.schedule.amount_on(b) * coupon_chi);
    }
    pnl
}
