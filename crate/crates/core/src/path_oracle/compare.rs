use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::decompose::grid_product_decomposition;
use super::simulate::{simulate_paths, PathSet, ProcessRole, SimulationParams};
use super::OracleError;
use crate::attribution::{fx_split, FxMode};
use crate::market_data::FxQuote;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    Fx,
    Asset,
    Covariation,
    Total,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Fx,
        Component::Asset,
        Component::Covariation,
        Component::Total,
    ];
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Fx => "fx",
            Component::Asset => "asset",
            Component::Covariation => "covariation",
            Component::Total => "total",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentDiff {
    pub component: Component,
    /// Two-point split from the path endpoints.
    pub coarse: f64,
    /// Left-endpoint grid sum.
    pub fine: f64,
    /// `coarse − fine`.
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub seed: u64,
    pub n_steps: usize,
    /// One entry per [`Component`], in [`Component::ALL`] order.
    pub components: Vec<ComponentDiff>,
}

impl Discrepancy {
    pub fn get(&self, component: Component) -> &ComponentDiff {
        self.components
            .iter()
            .find(|c| c.component == component)
            .expect("all components present")
    }
}

/// Compares the endpoint FX split with the fine-grid product decomposition
/// of an asset/FX path pair. The two-point scheme has no covariation term,
/// so its coarse value is zero.
pub fn compare_coarse_vs_fine(paths: &PathSet, fx_mode: FxMode) -> Result<Discrepancy, OracleError> {
    let asset = paths.trajectory(ProcessRole::Asset)?;
    let fx = paths.trajectory(ProcessRole::Fx)?;
    let fine = grid_product_decomposition(asset, fx)?;
    let quote = |v: f64| FxQuote::new(v).map_err(|e| OracleError::InvalidParameter(e.to_string()));
    let (a0, a1) = (asset[0], asset[asset.len() - 1]);
    let (c0, c1) = (quote(fx[0])?, quote(fx[fx.len() - 1])?);
    let (coarse_fx, coarse_asset) = fx_split(a0, a1, c0, c1, fx_mode);
    let coarse_total = a1 * c1.rate() - a0 * c0.rate();

    let row = |component, coarse: f64, fine: f64| ComponentDiff {
        component,
        coarse,
        fine,
        diff: coarse - fine,
    };
    Ok(Discrepancy {
        seed: paths.seed,
        n_steps: paths.n_steps(),
        components: vec![
            row(Component::Fx, coarse_fx, fine.fx_integral),
            row(Component::Asset, coarse_asset, fine.asset_integral),
            row(Component::Covariation, 0.0, fine.covariation),
            row(Component::Total, coarse_total, fine.total()),
        ],
    })
}

/// Sample mean and standard error of one component across seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub component: Component,
    pub mean_coarse: f64,
    pub mean_fine: f64,
    pub stderr_fine: f64,
    pub mean_diff: f64,
    pub stderr_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub discrepancies: Vec<Discrepancy>,
    pub summary: Vec<ComponentSummary>,
}

fn mean_stderr(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs [`compare_coarse_vs_fine`] for every seed. Seeds run in parallel;
/// results keep the order of `seeds`.
pub fn run_study(
    params: &SimulationParams,
    n_steps: usize,
    seeds: &[u64],
    fx_mode: FxMode,
) -> Result<StudyReport, OracleError> {
    let discrepancies = seeds
        .par_iter()
        .map(|&seed| compare_coarse_vs_fine(&simulate_paths(params, n_steps, seed)?, fx_mode))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = if discrepancies.is_empty() {
        Vec::new()
    } else {
        Component::ALL
            .into_iter()
            .map(|component| {
                let rows = discrepancies.iter().map(|d| d.get(component));
                let (mean_coarse, _) = mean_stderr(rows.clone().map(|r| r.coarse));
                let (mean_fine, stderr_fine) = mean_stderr(rows.clone().map(|r| r.fine));
                let (mean_diff, stderr_diff) = mean_stderr(rows.map(|r| r.diff));
                ComponentSummary {
                    component,
                    mean_coarse,
                    mean_fine,
                    stderr_fine,
                    mean_diff,
                    stderr_diff,
                }
            })
            .collect()
    };
    Ok(StudyReport {
        discrepancies,
        summary,
    })
}

/// CSV with columns `seed,n_steps,component,coarse,fine,diff`.
pub fn write_discrepancy_csv<W: Write>(
    sink: W,
    discrepancies: &[Discrepancy],
) -> Result<(), OracleError> {
    let err = |e: csv::Error| OracleError::Csv(e.to_string());
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["seed", "n_steps", "component", "coarse", "fine", "diff"])
        .map_err(err)?;
    for d in discrepancies {
        for c in &d.components {
            w.write_record([
                d.seed.to_string(),
                d.n_steps.to_string(),
                c.component.to_string(),
                c.coarse.to_string(),
                c.fine.to_string(),
                c.diff.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| OracleError::Csv(e.to_string()))
}
