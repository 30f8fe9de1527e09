use serde::Serialize;

use super::OracleError;

/// Relative finite-difference step: `h = FD_RELATIVE_STEP · max(1, |v|)`.
pub const FD_RELATIVE_STEP: f64 = 1e-5;

/// Left-endpoint sums of the discrete product formula for `A·χ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridDecomposition {
    /// `Σ A_{i−1} Δχ_i`
    pub fx_integral: f64,
    /// `Σ χ_{i−1} ΔA_i`
    pub asset_integral: f64,
    /// `Σ ΔA_i Δχ_i`
    pub covariation: f64,
}

impl GridDecomposition {
    pub fn total(&self) -> f64 {
        self.fx_integral + self.asset_integral + self.covariation
    }
}

/// Discrete product decomposition of `A_n χ_n − A_0 χ_0`. The three sums
/// telescope to the endpoint total for any grid.
pub fn grid_product_decomposition(
    asset: &[f64],
    fx: &[f64],
) -> Result<GridDecomposition, OracleError> {
    if asset.len() != fx.len() || asset.is_empty() {
        return Err(OracleError::LengthMismatch(asset.len(), fx.len()));
    }
    let mut out = GridDecomposition {
        fx_integral: 0.0,
        asset_integral: 0.0,
        covariation: 0.0,
    };
    for (a, c) in asset.windows(2).zip(fx.windows(2)) {
        let (da, dc) = (a[1] - a[0], c[1] - c[0]);
        out.fx_integral += a[0] * dc;
        out.asset_integral += c[0] * da;
        out.covariation += da * dc;
    }
    Ok(out)
}

/// A price `A_s(r, x)` with scalar rate and factor, `s` in years.
pub trait ScalarPricer {
    fn price(&self, s: f64, r: f64, x: f64) -> f64;
}

impl<F: Fn(f64, f64, f64) -> f64> ScalarPricer for F {
    fn price(&self, s: f64, r: f64, x: f64) -> f64 {
        self(s, r, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ItoDecomposition {
    /// `Σ ∂A/∂s Δu`
    pub carry: f64,
    /// `Σ ∂A/∂r Δr + ½ Σ ∂²A/∂r² (Δr)²`
    pub rate: f64,
    /// `Σ ∂A/∂x Δx + ½ Σ ∂²A/∂x² (Δx)²`
    pub market: f64,
    /// `A_T − A_t` along the path.
    pub total: f64,
    /// `total − (carry + rate + market)`.
    pub residual: f64,
}

/// Itô-style decomposition of `A_T − A_t` along scalar `r` and `x` paths.
///
/// All partials are central differences at the left endpoint
/// `(u_{i−1}, r_{i−1}, x_{i−1})`. Cross terms between `r` and `x` are not
/// attributed and end up in `residual`.
pub fn grid_ito_decomposition(
    pricer: &impl ScalarPricer,
    grid: &[f64],
    rate: &[f64],
    factor: &[f64],
) -> Result<ItoDecomposition, OracleError> {
    if rate.len() != grid.len() {
        return Err(OracleError::LengthMismatch(rate.len(), grid.len()));
    }
    if factor.len() != grid.len() {
        return Err(OracleError::LengthMismatch(factor.len(), grid.len()));
    }
    if grid.is_empty() {
        return Err(OracleError::LengthMismatch(0, 0));
    }
    let step = |v: f64| FD_RELATIVE_STEP * v.abs().max(1.0);
    let (mut carry, mut rate_part, mut market) = (0.0, 0.0, 0.0);
    for i in 1..grid.len() {
        let (s, r, x) = (grid[i - 1], rate[i - 1], factor[i - 1]);
        let (hs, hr, hx) = (step(s), step(r), step(x));
        let mid = pricer.price(s, r, x);
        let d_s = (pricer.price(s + hs, r, x) - pricer.price(s - hs, r, x)) / (2.0 * hs);
        let (r_up, r_dn) = (pricer.price(s, r + hr, x), pricer.price(s, r - hr, x));
        let (x_up, x_dn) = (pricer.price(s, r, x + hx), pricer.price(s, r, x - hx));
        let d_r = (r_up - r_dn) / (2.0 * hr);
        let d_rr = (r_up - 2.0 * mid + r_dn) / (hr * hr);
        let d_x = (x_up - x_dn) / (2.0 * hx);
        let d_xx = (x_up - 2.0 * mid + x_dn) / (hx * hx);
        if ![d_s, d_r, d_rr, d_x, d_xx].iter().all(|v| v.is_finite()) {
            return Err(OracleError::NonFiniteDerivative(i - 1));
        }
        let (du, dr, dx) = (grid[i] - s, rate[i] - r, factor[i] - x);
        carry += d_s * du;
        rate_part += d_r * dr + 0.5 * d_rr * dr * dr;
        market += d_x * dx + 0.5 * d_xx * dx * dx;
    }
    let n = grid.len() - 1;
    let total = pricer.price(grid[n], rate[n], factor[n]) - pricer.price(grid[0], rate[0], factor[0]);
    Ok(ItoDecomposition {
        carry,
        rate: rate_part,
        market,
        total,
        residual: total - (carry + rate_part + market),
    })
}
