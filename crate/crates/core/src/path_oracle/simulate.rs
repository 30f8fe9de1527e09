use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::OracleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProcessRole {
    /// Asset price `A` in asset currency.
    Asset,
    /// EUR per unit of asset currency.
    Fx,
    /// Scalar discount rate `r`.
    Rate,
    /// Scalar residual factor `x`.
    Factor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dynamics {
    /// Log-Euler step of a geometric Brownian motion; stays positive.
    Geometric,
    /// Euler step of an arithmetic Brownian motion.
    Arithmetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub role: ProcessRole,
    pub initial: f64,
    pub drift: f64,
    pub volatility: f64,
    pub dynamics: Dynamics,
}

impl ProcessSpec {
    pub fn geometric(role: ProcessRole, initial: f64, drift: f64, volatility: f64) -> Self {
        Self {
            role,
            initial,
            drift,
            volatility,
            dynamics: Dynamics::Geometric,
        }
    }

    pub fn arithmetic(role: ProcessRole, initial: f64, drift: f64, volatility: f64) -> Self {
        Self {
            role,
            initial,
            drift,
            volatility,
            dynamics: Dynamics::Arithmetic,
        }
    }
}

/// Jumps common to all processes. At a jump, geometric processes are
/// multiplied by `1 + size` and arithmetic ones shifted by `size`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct JumpSpec {
    /// Poisson intensity per year.
    pub intensity: f64,
    /// One size per process, in process order.
    pub sizes: Vec<f64>,
    /// Grid indices (1-based step ends) where a jump is forced.
    pub scheduled: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationParams {
    /// Length of the simulated period in years.
    pub horizon: f64,
    pub processes: Vec<ProcessSpec>,
    pub correlation: Vec<Vec<f64>>,
    pub jumps: Option<JumpSpec>,
}

impl SimulationParams {
    /// Independent geometric asset and FX processes.
    pub fn asset_fx(horizon: f64, asset: ProcessSpec, fx: ProcessSpec, correlation: f64) -> Self {
        Self {
            horizon,
            processes: vec![asset, fx],
            correlation: vec![vec![1.0, correlation], vec![correlation, 1.0]],
            jumps: None,
        }
    }

    fn validate(&self) -> Result<(), OracleError> {
        let bad = |msg: String| Err(OracleError::InvalidParameter(msg));
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return bad(format!("horizon {}", self.horizon));
        }
        for p in &self.processes {
            if !(p.volatility.is_finite() && p.volatility >= 0.0) {
                return bad(format!("{:?} volatility {}", p.role, p.volatility));
            }
            if !(p.initial.is_finite() && p.drift.is_finite()) {
                return bad(format!("{:?} initial value or drift", p.role));
            }
            if p.dynamics == Dynamics::Geometric && p.initial <= 0.0 {
                return bad(format!("{:?} geometric process needs a positive start", p.role));
            }
            if p.role == ProcessRole::Fx && p.dynamics != Dynamics::Geometric {
                return bad("fx process must be geometric".into());
            }
        }
        if let Some(j) = &self.jumps {
            if !(j.intensity.is_finite() && j.intensity >= 0.0) {
                return bad(format!("jump intensity {}", j.intensity));
            }
            if j.sizes.len() != self.processes.len() {
                return bad("one jump size per process".into());
            }
            for (p, &size) in self.processes.iter().zip(&j.sizes) {
                if !size.is_finite() || (p.dynamics == Dynamics::Geometric && size <= -1.0) {
                    return bad(format!("{:?} jump size {size}", p.role));
                }
            }
        }
        Ok(())
    }
}

/// Lower-triangular `L` with `L Lᵀ = C` for a positive semidefinite
/// correlation matrix `C`.
pub(crate) fn correlation_factor(c: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, OracleError> {
    const TOL: f64 = 1e-10;
    let n = c.len();
    let err = |m: String| Err(OracleError::InvalidCorrelation(m));
    if c.iter().any(|row| row.len() != n) {
        return err("matrix is not square".into());
    }
    for (i, row) in c.iter().enumerate() {
        if (row[i] - 1.0).abs() > TOL {
            return err(format!("diagonal entry {} is not 1", row[i]));
        }
        for (j, &v) in row.iter().enumerate() {
            if !(-1.0..=1.0).contains(&v) {
                return err(format!("entry {v} outside [-1, 1]"));
            }
            if (v - c[j][i]).abs() > TOL {
                return err("matrix is not symmetric".into());
            }
        }
    }
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let pivot = c[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if pivot < -TOL {
            return err("matrix is not positive semidefinite".into());
        }
        l[j][j] = pivot.max(0.0).sqrt();
        for i in j + 1..n {
            let rest = c[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if l[j][j] > TOL {
                l[i][j] = rest / l[j][j];
            } else if rest.abs() > TOL {
                return err("matrix is not positive semidefinite".into());
            }
        }
    }
    Ok(l)
}

/// Simulated trajectories on `u_k = k · horizon / n`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSet {
    pub grid: Vec<f64>,
    pub roles: Vec<ProcessRole>,
    pub trajectories: Vec<Vec<f64>>,
    pub seed: u64,
}

impl PathSet {
    /// Wraps hand-built trajectories. All must match the grid length; an FX
    /// trajectory must be strictly positive.
    pub fn from_trajectories(
        grid: Vec<f64>,
        paths: Vec<(ProcessRole, Vec<f64>)>,
        seed: u64,
    ) -> Result<Self, OracleError> {
        if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(OracleError::InvalidParameter(
                "grid must be non-empty and strictly increasing".into(),
            ));
        }
        for (role, path) in &paths {
            if path.len() != grid.len() {
                return Err(OracleError::LengthMismatch(path.len(), grid.len()));
            }
            if *role == ProcessRole::Fx && path.iter().any(|&v| v.is_nan() || v <= 0.0) {
                return Err(OracleError::InvalidParameter("fx path must stay positive".into()));
            }
        }
        let (roles, trajectories) = paths.into_iter().unzip();
        Ok(Self {
            grid,
            roles,
            trajectories,
            seed,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn trajectory(&self, role: ProcessRole) -> Result<&[f64], OracleError> {
        self.roles
            .iter()
            .position(|&r| r == role)
            .map(|i| self.trajectories[i].as_slice())
            .ok_or(OracleError::MissingProcess(role))
    }

    /// Every `stride`-th grid point, keeping both endpoints on the same path.
    pub fn subsample(&self, stride: usize) -> Result<Self, OracleError> {
        if stride == 0 || !self.n_steps().is_multiple_of(stride) {
            return Err(OracleError::InvalidParameter(format!(
                "stride {stride} does not divide {} steps",
                self.n_steps()
            )));
        }
        let take = |v: &Vec<f64>| v.iter().copied().step_by(stride).collect::<Vec<_>>();
        Ok(Self {
            grid: take(&self.grid),
            roles: self.roles.clone(),
            trajectories: self.trajectories.iter().map(take).collect(),
            seed: self.seed,
        })
    }
}

/// Euler-type simulation of correlated diffusions with optional common jumps.
/// Deterministic in `(params, n_steps, seed)`.
pub fn simulate_paths(
    params: &SimulationParams,
    n_steps: usize,
    seed: u64,
) -> Result<PathSet, OracleError> {
    if n_steps == 0 {
        return Err(OracleError::InvalidParameter("n_steps must be at least 1".into()));
    }
    if params.correlation.len() != params.processes.len() {
        return Err(OracleError::InvalidCorrelation(format!(
            "{} rows for {} processes",
            params.correlation.len(),
            params.processes.len()
        )));
    }
    params.validate()?;
    let chol = correlation_factor(&params.correlation)?;

    let m = params.processes.len();
    let dt = params.horizon / n_steps as f64;
    let sqrt_dt = dt.sqrt();
    let grid: Vec<f64> = (0..=n_steps).map(|k| k as f64 * dt).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jump_prob = params
        .jumps
        .as_ref()
        .map_or(0.0, |j| -(-j.intensity * dt).exp_m1());

    let mut state: Vec<f64> = params.processes.iter().map(|p| p.initial).collect();
    let mut trajectories: Vec<Vec<f64>> = state
        .iter()
        .map(|&v| {
            let mut path = Vec::with_capacity(n_steps + 1);
            path.push(v);
            path
        })
        .collect();
    let mut eps = vec![0.0; m];
    for k in 1..=n_steps {
        for e in eps.iter_mut() {
            *e = rng.sample(StandardNormal);
        }
        let u: f64 = rng.random();
        let jump = params
            .jumps
            .as_ref()
            .filter(|j| u < jump_prob || j.scheduled.contains(&k));
        for (j, p) in params.processes.iter().enumerate() {
            let z: f64 = (0..=j).map(|i| chol[j][i] * eps[i]).sum();
            let x = &mut state[j];
            match p.dynamics {
                Dynamics::Geometric => {
                    let v = p.volatility;
                    *x *= ((p.drift - 0.5 * v * v) * dt + v * sqrt_dt * z).exp();
                    if let Some(js) = jump {
                        *x *= 1.0 + js.sizes[j];
                    }
                }
                Dynamics::Arithmetic => {
                    *x += p.drift * dt + p.volatility * sqrt_dt * z;
                    if let Some(js) = jump {
                        *x += js.sizes[j];
                    }
                }
            }
            trajectories[j].push(*x);
        }
    }

    Ok(PathSet {
        grid,
        roles: params.processes.iter().map(|p| p.role).collect(),
        trajectories,
        seed,
    })
}
