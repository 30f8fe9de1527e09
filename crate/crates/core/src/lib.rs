//! Multi-currency PnL attribution.
//!
//! Splits the EUR profit and loss of single instruments and rebalanced
//! portfolios into an FX part, an interest-rate part, a residual market-risk
//! part and carry, using two-point averages of cross-evaluated prices
//! `A_s(r_u, x_v)`. A fine-grid path oracle measures how far the two-point
//! scheme sits from full-path stochastic-integral decompositions.
//!
//! Modules:
//!
//! - [`market_data`]: zero curves, credit/basis factors, FX quotes, snapshots.
//! - [`pricers`]: pure reduced-form pricers for bonds, CDS and cash.
//! - [`attribution`]: FX split, four-way split, coupon-aware subperiods,
//!   grid segmentation and portfolio rollup.
//! - [`path_oracle`]: simulated paths and discrete product / Itô sums.
//! - [`portfolio_file`] and [`report`]: portfolio ingestion and report rendering.

pub mod attribution;
pub mod daycount;
pub mod market_data;
pub mod path_oracle;
pub mod portfolio_file;
pub mod pricers;
pub mod report;

pub use attribution::{
    attribute_portfolio, attribute_position, four_way_split, fx_split, segment_period,
    AttributionError, AttributionResult, Bucket, CarryMode, FxMode, PortfolioAttribution,
    Portfolio, Position, PositionAttribution, Transaction,
};
pub use market_data::{
    load_market_snapshots, write_market_snapshots, FxQuote, MarketError, MarketFactors,
    MarketSnapshot, ZeroCurve,
};
pub use pricers::{
    BondSpec, CashSpec, CashflowSchedule, CdsDirection, CdsSpec, Instrument, Pricer,
    PricingError,
};
