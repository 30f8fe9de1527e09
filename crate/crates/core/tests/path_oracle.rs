use attrib_core::path_oracle::{
    compare_coarse_vs_fine, grid_ito_decomposition, grid_product_decomposition, run_study,
    simulate_paths, Component, JumpSpec, OracleError, PathSet, ProcessRole, ProcessSpec,
    SimulationParams,
};
use attrib_core::FxMode;
use proptest::prelude::*;

fn asset_fx(vol_a: f64, vol_c: f64, rho: f64) -> SimulationParams {
    SimulationParams::asset_fx(
        0.5,
        ProcessSpec::geometric(ProcessRole::Asset, 100.0, 0.02, vol_a),
        ProcessSpec::geometric(ProcessRole::Fx, 0.9, -0.01, vol_c),
        rho,
    )
}

/// Endpoint total relative to the size of the endpoint values.
fn identity_error(paths: &PathSet) -> f64 {
    let a = paths.trajectory(ProcessRole::Asset).unwrap();
    let c = paths.trajectory(ProcessRole::Fx).unwrap();
    let n = a.len() - 1;
    let (start, end) = (a[0] * c[0], a[n] * c[n]);
    let g = grid_product_decomposition(a, c).unwrap();
    (g.total() - (end - start)).abs() / start.abs().max(end.abs()).max(1.0)
}

proptest! {
    #[test]
    fn product_identity_holds_on_every_path(
        vol_a in 0.0f64..0.6, vol_c in 0.0f64..0.4, rho in -1.0f64..1.0,
        intensity in 0.0f64..20.0, ja in -0.5f64..0.5, jc in -0.3f64..0.3,
        n in 1usize..600, seed in any::<u64>(),
    ) {
        let mut params = asset_fx(vol_a, vol_c, rho);
        params.jumps = Some(JumpSpec { intensity, sizes: vec![ja, jc], scheduled: vec![n.div_ceil(2)] });
        let paths = simulate_paths(&params, n, seed).unwrap();
        prop_assert!(identity_error(&paths) <= 1e-12);
        let d = compare_coarse_vs_fine(&paths, FxMode::AverageWeights).unwrap();
        let total = d.get(Component::Total);
        prop_assert!((total.coarse - total.fine).abs() <= 1e-12 * total.coarse.abs().max(100.0));
    }

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>(), n in 1usize..200) {
        let mut params = asset_fx(0.2, 0.1, 0.3);
        params.jumps = Some(JumpSpec { intensity: 3.0, sizes: vec![-0.1, 0.05], scheduled: vec![] });
        let a = simulate_paths(&params, n, seed).unwrap();
        let b = simulate_paths(&params, n, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let fx = a.trajectory(ProcessRole::Fx).unwrap();
        prop_assert!(fx.iter().all(|&v| v > 0.0));
        prop_assert_eq!(fx.len(), n + 1);
    }
}

#[test]
fn three_point_example() {
    let g = grid_product_decomposition(&[100.0, 105.0, 110.0], &[1.0, 1.1, 1.2]).unwrap();
    assert!((g.fx_integral - 20.5).abs() < 1e-12);
    assert!((g.asset_integral - 10.5).abs() < 1e-12);
    assert!((g.covariation - 1.0).abs() < 1e-12);
    assert!((g.total() - 32.0).abs() < 1e-12);
}

#[test]
fn single_step_and_frozen_fx() {
    let g = grid_product_decomposition(&[100.0, 110.0], &[1.0, 1.2]).unwrap();
    assert!((g.fx_integral - 20.0).abs() < 1e-12);
    assert!((g.asset_integral - 10.0).abs() < 1e-12);
    assert!((g.covariation - 2.0).abs() < 1e-12);
    let g = grid_product_decomposition(&[100.0, 93.0, 110.0], &[1.1, 1.1, 1.1]).unwrap();
    assert_eq!((g.fx_integral, g.covariation), (0.0, 0.0));
    assert!((g.asset_integral - 11.0).abs() < 1e-12);
    assert!(matches!(
        grid_product_decomposition(&[1.0, 2.0], &[1.0]),
        Err(OracleError::LengthMismatch(2, 1))
    ));
}

#[test]
fn constant_paths_have_no_discrepancy() {
    let params = SimulationParams::asset_fx(
        1.0,
        ProcessSpec::geometric(ProcessRole::Asset, 100.0, 0.0, 0.0),
        ProcessSpec::geometric(ProcessRole::Fx, 0.9, 0.0, 0.0),
        0.0,
    );
    let paths = simulate_paths(&params, 50, 3).unwrap();
    assert!(paths.trajectory(ProcessRole::Asset).unwrap().iter().all(|&v| v == 100.0));
    for mode in [FxMode::AverageWeights, FxMode::StartEnd] {
        let d = compare_coarse_vs_fine(&paths, mode).unwrap();
        for c in &d.components {
            assert_eq!(c.diff, 0.0, "{:?}", c.component);
        }
    }
}

#[test]
fn invalid_correlation_is_rejected() {
    assert!(matches!(
        simulate_paths(&asset_fx(0.1, 0.1, 1.5), 10, 1),
        Err(OracleError::InvalidCorrelation(_))
    ));
}

#[test]
fn common_jump_appears_in_covariation() {
    let mut params = asset_fx(0.0, 0.0, 0.0);
    params.processes[0].drift = 0.0;
    params.processes[1].drift = 0.0;
    params.jumps = Some(JumpSpec { intensity: 0.0, sizes: vec![-0.2, 0.1], scheduled: vec![7] });
    let paths = simulate_paths(&params, 20, 5).unwrap();
    let g = grid_product_decomposition(
        paths.trajectory(ProcessRole::Asset).unwrap(),
        paths.trajectory(ProcessRole::Fx).unwrap(),
    )
    .unwrap();
    let product = (100.0 * -0.2) * (0.9 * 0.1);
    assert!((g.covariation - product).abs() < 1e-12);

    // With diffusion on top, the jump product still dominates the sum.
    let mut noisy = params.clone();
    noisy.processes[0].volatility = 0.05;
    noisy.processes[1].volatility = 0.05;
    let paths = simulate_paths(&noisy, 400, 5).unwrap();
    let a = paths.trajectory(ProcessRole::Asset).unwrap();
    let c = paths.trajectory(ProcessRole::Fx).unwrap();
    let g = grid_product_decomposition(a, c).unwrap();
    let at_jump = (a[7] - a[6]) * (c[7] - c[6]);
    assert!(at_jump < 0.0);
    assert!((g.covariation - at_jump).abs() < 0.1 * at_jump.abs());
}

#[test]
fn independent_covariation_averages_to_zero() {
    let seeds: Vec<u64> = (0..2000).collect();
    let report = run_study(&asset_fx(0.3, 0.15, 0.0), 32, &seeds, FxMode::AverageWeights).unwrap();
    let cov = report.summary.iter().find(|s| s.component == Component::Covariation).unwrap();
    assert!(cov.mean_fine.abs() < 3.0 * cov.stderr_fine, "{cov:?}");

    let report = run_study(&asset_fx(0.3, 0.15, 0.8), 32, &seeds, FxMode::AverageWeights).unwrap();
    let cov = report.summary.iter().find(|s| s.component == Component::Covariation).unwrap();
    assert!(cov.mean_fine > 3.0 * cov.stderr_fine, "{cov:?}");
}

#[test]
fn study_is_reproducible_and_ordered() {
    let seeds = [9, 3, 5];
    let a = run_study(&asset_fx(0.2, 0.1, 0.0), 16, &seeds, FxMode::StartEnd).unwrap();
    let b = run_study(&asset_fx(0.2, 0.1, 0.0), 16, &seeds, FxMode::StartEnd).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.discrepancies.iter().map(|d| d.seed).collect::<Vec<_>>(), seeds);
    let mut csv = Vec::new();
    attrib_core::path_oracle::write_discrepancy_csv(&mut csv, &a.discrepancies).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "seed,n_steps,component,coarse,fine,diff");
    assert_eq!(text.lines().count(), 1 + 3 * 4);
}

#[test]
fn linear_ito_decomposition_is_exact() {
    let params = SimulationParams {
        horizon: 1.0,
        processes: vec![
            ProcessSpec::arithmetic(ProcessRole::Rate, 0.02, 0.01, 0.01),
            ProcessSpec::arithmetic(ProcessRole::Factor, 0.03, 0.0, 0.02),
        ],
        correlation: vec![vec![1.0, 0.4], vec![0.4, 1.0]],
        jumps: None,
    };
    let paths = simulate_paths(&params, 100, 17).unwrap();
    let r = paths.trajectory(ProcessRole::Rate).unwrap();
    let x = paths.trajectory(ProcessRole::Factor).unwrap();
    let pricer = |s: f64, r: f64, x: f64| 100.0 + 2.0 * s - 500.0 * r - 300.0 * x;
    let ito = grid_ito_decomposition(&pricer, &paths.grid, r, x).unwrap();
    assert!((ito.carry - 2.0).abs() < 1e-6);
    assert!((ito.rate - -500.0 * (r[100] - r[0])).abs() < 1e-6);
    assert!((ito.market - -300.0 * (x[100] - x[0])).abs() < 1e-6);
    assert!(ito.residual.abs() < 1e-6);
}

#[test]
fn ito_residual_shrinks_with_grid() {
    let params = SimulationParams {
        horizon: 1.0,
        processes: vec![
            ProcessSpec::arithmetic(ProcessRole::Rate, 0.02, 0.0, 0.01),
            ProcessSpec::arithmetic(ProcessRole::Factor, 0.01, 0.0, 0.0),
        ],
        correlation: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        jumps: None,
    };
    let pricer = |s: f64, r: f64, _x: f64| {
        let d = r * (5.0 - s);
        100.0 * (1.0 - d + 0.5 * d * d)
    };
    for seed in 0..8 {
        let fine = simulate_paths(&params, 1024, seed).unwrap();
        let coarse = fine.subsample(64).unwrap();
        let res = |p: &PathSet| {
            grid_ito_decomposition(
                &pricer,
                &p.grid,
                p.trajectory(ProcessRole::Rate).unwrap(),
                p.trajectory(ProcessRole::Factor).unwrap(),
            )
            .unwrap()
            .residual
            .abs()
        };
        assert_eq!(coarse.n_steps(), 16);
        assert!(res(&fine) < res(&coarse), "seed {seed}: {} vs {}", res(&fine), res(&coarse));
    }
}
