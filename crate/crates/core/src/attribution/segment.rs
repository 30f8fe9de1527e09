use chrono::NaiveDate;

use super::{AttributionError, Position};

/// Attribution grid `t = t_0 < … < t_n = T` for the given positions.
///
/// Contains both endpoints and every coupon, trade and maturity date in
/// `(t, T]`, sorted and deduplicated.
pub fn segment_period<'a>(
    positions: impl IntoIterator<Item = &'a Position>,
    t: NaiveDate,
    big_t: NaiveDate,
) -> Result<Vec<NaiveDate>, AttributionError> {
    if t >= big_t {
        return Err(AttributionError::EmptyPeriod {
            from: t,
            to: big_t,
        });
    }
    let mut grid = vec![t, big_t];
    for p in positions {
        grid.extend(p.event_dates(t, big_t));
    }
    grid.sort_unstable();
    grid.dedup();
    Ok(grid)
}
