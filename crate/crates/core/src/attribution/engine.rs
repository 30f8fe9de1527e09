use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use super::split::{split_from_evaluations, Corner};
use super::{
    segment_period, AttributionError, AttributionResult, Bucket, CarryMode, FxMode, Portfolio,
    Position,
};
use crate::market_data::MarketSnapshot;

/// One grid interval `(start, end]` of a position's attribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subperiod {
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// Signed units held over the interval.
    pub holding: f64,
    /// EUR value of the coupon received at `end`, already inside `carry`.
    pub coupon_eur: f64,
    /// EUR transaction costs of trades in the interval, outside the four parts.
    pub costs: f64,
    pub result: AttributionResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionAttribution {
    pub id: String,
    pub bucket: Bucket,
    pub subperiods: Vec<Subperiod>,
    pub aggregate: AttributionResult,
    pub costs: f64,
}

impl PositionAttribution {
    /// Contribution after perfect rate and FX hedging:
    /// `market + carry − costs`.
    pub fn hedged_pnl(&self) -> f64 {
        self.aggregate.market + self.aggregate.carry - self.costs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketTotal {
    pub bucket: Bucket,
    pub positions: usize,
    pub result: AttributionResult,
    pub costs: f64,
    pub hedged: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioAttribution {
    pub grid: Vec<NaiveDate>,
    pub positions: Vec<PositionAttribution>,
    /// Only buckets with at least one position, in [`Bucket::ALL`] order.
    pub buckets: Vec<BucketTotal>,
    pub fund: AttributionResult,
    pub costs: f64,
}

fn snapshot_at(snapshots: &[MarketSnapshot], date: NaiveDate) -> Result<&MarketSnapshot, AttributionError> {
    snapshots
        .binary_search_by_key(&date, |s| s.as_of)
        .map(|i| &snapshots[i])
        .map_err(|_| AttributionError::MissingSnapshot(date))
}

/// Attributes one position over the grid `t = grid[0] < … < grid[n] = T`.
///
/// `snapshots` must be sorted by date and contain every grid date. Each
/// subperiod is split with [`split_from_evaluations`] on the position value
/// `sign · holding · A`; the coupon received at the subperiod end is
/// converted to EUR according to `carry_mode` and added to carry and total.
/// Holdings change only at grid dates: a coupon on a trade date is paid to
/// the holding before the trade.
pub fn attribute_position(
    position: &Position,
    snapshots: &[MarketSnapshot],
    grid: &[NaiveDate],
    fx_mode: FxMode,
    carry_mode: CarryMode,
) -> Result<PositionAttribution, AttributionError> {
    let (Some(&t), Some(&big_t)) = (grid.first(), grid.last()) else {
        return Err(AttributionError::EmptyPeriod {
            from: NaiveDate::MIN,
            to: NaiveDate::MIN,
        });
    };
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AttributionError::EmptyPeriod { from: t, to: big_t });
    }
    if let Some(d) = position
        .event_dates(t, big_t)
        .find(|d| grid.binary_search(d).is_err())
    {
        return Err(AttributionError::ScheduleOutsideGrid(d));
    }
    let snaps = grid
        .iter()
        .map(|&d| snapshot_at(snapshots, d))
        .collect::<Result<Vec<_>, _>>()?;
    let chi_final = snaps[snaps.len() - 1].fx;
    let sign = position.direction.sign();
    let maturity = position.pricer.maturity();

    let mut subperiods = Vec::with_capacity(grid.len() - 1);
    for (i, w) in grid.windows(2).enumerate() {
        let (start, end) = (w[0], w[1]);
        let (snap_s, snap_e) = (snaps[i], snaps[i + 1]);
        let holding = sign * position.quantity_after(start);
        let costs = position.costs_in(start, end);
        let matured = maturity.is_some_and(|m| start >= m);

        if holding == 0.0 || matured {
            subperiods.push(Subperiod {
                start,
                end,
                holding: if matured { 0.0 } else { holding },
                coupon_eur: 0.0,
                costs,
                result: AttributionResult::default(),
            });
            continue;
        }

        let start_coupon = match carry_mode {
            CarryMode::PaperLiteral => position.schedule.amount_on(start),
            _ => 0.0,
        };
        let pick = |c: Corner| match c {
            Corner::Start => snap_s,
            Corner::End => snap_e,
        };
        let split = split_from_evaluations(
            |e| {
                let valuation = match e.time {
                    Corner::Start => start,
                    Corner::End => end,
                };
                let price = position
                    .pricer
                    .price(valuation, &pick(e.curve).curve, &pick(e.factors).factors)
                    .map_err(|source| AttributionError::PricerEvaluationFailed {
                        evaluation: e,
                        valuation,
                        source,
                    })?;
                let pre_coupon = if e.time == Corner::Start { start_coupon } else { 0.0 };
                Ok(holding * (price + pre_coupon))
            },
            snap_s.fx,
            snap_e.fx,
            fx_mode,
        )?;

        // The split's total starts from the pre-coupon price under the literal
        // reading; the realized total always starts ex-coupon.
        let realized = split.total + holding * start_coupon * snap_s.fx.rate();
        let coupon_fx = match carry_mode {
            CarryMode::SophisFrozenAtT => chi_final.rate(),
            _ => 0.5 * (snap_s.fx.rate() + snap_e.fx.rate()),
        };
        let coupon_eur = holding * position.schedule.amount_on(end) * coupon_fx;
        let result = AttributionResult::new(
            split.fx,
            split.rate,
            split.market,
            split.carry + coupon_eur,
            realized + coupon_eur,
        );
        subperiods.push(Subperiod {
            start,
            end,
            holding,
            coupon_eur,
            costs,
            result,
        });
    }

    let aggregate = subperiods.iter().map(|s| s.result).sum();
    let costs = subperiods.iter().map(|s| s.costs).sum();
    Ok(PositionAttribution {
        id: position.id.clone(),
        bucket: position.bucket,
        subperiods,
        aggregate,
        costs,
    })
}

/// Attributes every position on the portfolio's common grid over `(t, T]`
/// and rolls the results up by bucket and fund.
///
/// Positions are evaluated in parallel; sums are taken in portfolio order.
pub fn attribute_portfolio(
    portfolio: &Portfolio,
    snapshots: &[MarketSnapshot],
    t: NaiveDate,
    big_t: NaiveDate,
    fx_mode: FxMode,
    carry_mode: CarryMode,
) -> Result<PortfolioAttribution, AttributionError> {
    let grid = segment_period(portfolio.positions(), t, big_t)?;
    let positions = portfolio
        .positions()
        .par_iter()
        .map(|p| {
            attribute_position(p, snapshots, &grid, fx_mode, carry_mode).map_err(|e| {
                AttributionError::Position {
                    id: p.id.clone(),
                    source: Box::new(e),
                }
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let buckets = Bucket::ALL
        .into_iter()
        .filter_map(|bucket| {
            let members: Vec<_> = positions.iter().filter(|p| p.bucket == bucket).collect();
            (!members.is_empty()).then(|| BucketTotal {
                bucket,
                positions: members.len(),
                result: members.iter().map(|p| p.aggregate).sum(),
                costs: members.iter().map(|p| p.costs).sum(),
                hedged: members.iter().map(|p| p.hedged_pnl()).sum(),
            })
        })
        .collect();
    let fund = positions.iter().map(|p| p.aggregate).sum();
    let costs = positions.iter().map(|p| p.costs).sum();
    Ok(PortfolioAttribution {
        grid,
        positions,
        buckets,
        fund,
        costs,
    })
}
