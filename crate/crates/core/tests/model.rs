use qlt_core::convergence::{refinement_study, run_sweep, SweepPlan};
use qlt_core::estimates::mixed_convergence_functional;
use qlt_core::kinetic::{build_w0, reconstruct_f};
use qlt_core::presets::{BumpOnTail, Preset};
use qlt_core::solver::{mass_history, solve_coupled, solve_sn, tilde_shift};
use qlt_core::{RegularizationFamily, ScalarField, SolverConfig, SpatialGrid, TestFunctionSpec, TimeGrid};

fn mesh(nx: usize, nt: usize) -> (SpatialGrid, TimeGrid) {
    (SpatialGrid::new(1.0, 2.0, nx).unwrap(), TimeGrid::new(0.5, nt).unwrap())
}

#[test]
fn equilibrium_is_a_fixed_point_up_to_regularization() {
    let (grid, tgrid) = mesh(101, 500);
    let problem = Preset::LinearEquilibrium.problem(&grid, tgrid).unwrap();
    let exact = ScalarField::from_fn(grid, |x| (x - 1.0) * (2.0 - x) / 2.0).unwrap();
    assert!(problem.phi0().max_abs_diff(&exact).unwrap() < 1e-12);
    for n in [512, 1_000_000] {
        let run = solve_sn(&problem, RegularizationFamily::new(n).unwrap(), &SolverConfig::default()).unwrap();
        let last = run.solution.level_field(tgrid.nt());
        let dev = last.max_abs_diff(&exact).unwrap();
        let bound = grid.h().powi(2) + tgrid.dt() + 1.0 / n as f64;
        assert!(dev <= bound, "n={n}: {dev} > {bound}");
    }
}

#[test]
fn weak_residual_decreases_under_refinement_for_large_n() {
    let grids = [(51, 250), (101, 500), (201, 1000)];
    let etas = TestFunctionSpec::eta_library();
    let rows = refinement_study(
        &Preset::BumpOnTail(BumpOnTail::default()),
        (1.0, 2.0),
        0.5,
        100_000,
        &grids,
        &etas,
        &SolverConfig::default(),
    )
    .unwrap();
    for eta in &etas {
        let r: Vec<f64> = rows.iter().map(|row| row.residuals[&eta.name()]).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0] / 2.0), "{}: {r:?}", eta.name());
    }
}

#[test]
fn coupled_run_conserves_mass_and_tracks_the_reduced_variable() {
    let disc = |nx: usize, nt: usize| {
        let (grid, tgrid) = mesh(nx, nt);
        let kin = BumpOnTail::default().kinetic(&grid).unwrap();
        let sol = solve_coupled(&kin, tgrid, &SolverConfig::default()).unwrap();
        let mass = mass_history(&sol.f);
        for m in &mass {
            assert!((m - mass[0]).abs() <= 1e-12 * mass[0].abs());
        }
        assert!(sol.w.min() >= 0.0);
        reconstruct_f(&sol.w, kin.w0(), kin.f0()).unwrap().max_abs_diff(&sol.f).unwrap()
    };
    let (coarse, fine) = (disc(51, 250), disc(101, 500));
    assert!(fine < coarse, "{coarse} -> {fine}");
}

#[test]
fn kinetic_round_trip_on_bump_on_tail() {
    let (grid, _) = mesh(101, 10);
    let kin = BumpOnTail::default().kinetic(&grid).unwrap();
    let back = build_w0(kin.spectrum(), &grid).unwrap();
    assert!(back.max_abs_diff(kin.w0()).unwrap() < 1e-14);
}

#[test]
fn mixed_functional_is_finite_across_s() {
    let (grid, tgrid) = mesh(81, 400);
    let problem = Preset::BumpOnTail(BumpOnTail::default()).problem(&grid, tgrid).unwrap();
    let config = SolverConfig::default();
    let coarse = solve_sn(&problem, RegularizationFamily::new(8).unwrap(), &config).unwrap();
    let fine = solve_sn(&problem, RegularizationFamily::new(64).unwrap(), &config).unwrap();
    let tilde = tilde_shift(&coarse.solution, 8).unwrap();
    for s in [0.05, 0.25, 0.5, 0.75, 0.95] {
        let v = mixed_convergence_functional(&tilde, &fine.solution, s).unwrap();
        assert!(v.is_finite() && v > 0.0, "s={s}: {v}");
    }
}

#[test]
fn zero_data_sweep_is_identically_zero() {
    let (grid, tgrid) = mesh(41, 100);
    let problem = Preset::Zero.problem(&grid, tgrid).unwrap();
    let report = run_sweep(&problem, &SweepPlan::doubling(4, 32), &SolverConfig::default()).unwrap();
    assert!(report.all_valid);
    for row in &report.rows {
        for v in [row.pairwise_l2, row.grad_sigma, row.ae_proxy].into_iter().flatten() {
            assert_eq!(v, 0.0);
        }
    }
}
