//! ACT/365F year fractions.

use chrono::NaiveDate;

pub const DAYS_PER_YEAR: f64 = 365.0;

/// Signed ACT/365F year fraction from `from` to `to`.
pub fn year_fraction(from: NaiveDate, to: NaiveDate) -> f64 {
    (to - from).num_days() as f64 / DAYS_PER_YEAR
}
