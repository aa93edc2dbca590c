//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Tolerances are frozen here and deliberately not shared with the library
//! constants, so loosening those cannot make this suite pass.

use qlt_core::convergence::{ae_gradient_proxy, weak_residual};
use qlt_core::equilibrium::{equilibrium_m, stationarity_residual};
use qlt_core::estimates::{cutoff_t, estimate_report, primitive_j, regularization_residual, spread, time_regularize};
use qlt_core::kinetic::{build_g0, reconstruct_f};
use qlt_core::presets::{cubic_bump, BumpOnTail, Preset};
use qlt_core::solver::{mass_history, solve_coupled, solve_sn, tilde_shift};
use qlt_core::{
    ProblemData, RegularizationFamily, ScalarField, SolveReport, SolverConfig, SpaceTimeField, SpatialGrid,
    TestFunctionSpec, TimeGrid,
};

const X_A: f64 = 1.0;
const X_B: f64 = 2.0;
const NX: usize = 201;
const NT: usize = 2000;
const HORIZON: f64 = 0.5;
const N_VALUES: [u32; 8] = [4, 8, 16, 32, 64, 128, 256, 512];

struct Outcome {
    id: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn grids() -> (SpatialGrid, TimeGrid) {
    (SpatialGrid::new(X_A, X_B, NX).unwrap(), TimeGrid::new(HORIZON, NT).unwrap())
}

/// Space-time trapezoid, written out independently of the library quadrature.
fn trapz2(values: &[f64], nx: usize, nt: usize, h: f64, dt: f64) -> f64 {
    let mut total = 0.0;
    for m in 0..=nt {
        let wt = if m == 0 || m == nt { 0.5 } else { 1.0 };
        for i in 0..nx {
            let wx = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
            total += wt * wx * values[m * nx + i];
        }
    }
    total * h * dt
}

fn gradient(row: &[f64], h: f64) -> Vec<f64> {
    let n = row.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * h);
    d[n - 1] = (3.0 * row[n - 1] - 4.0 * row[n - 2] + row[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (row[i + 1] - row[i - 1]) / (2.0 * h);
    }
    d
}

fn solve_family(problem: &ProblemData) -> Vec<SolveReport> {
    let config = SolverConfig::default();
    std::thread::scope(|scope| {
        let handles: Vec<_> = N_VALUES
            .iter()
            .map(|&n| scope.spawn(move || solve_sn(problem, RegularizationFamily::new(n).unwrap(), &config).unwrap()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn criteria_one_to_four(problem: &ProblemData, runs: &[SolveReport]) -> Vec<Outcome> {
    let grid = problem.grid();
    let phi_max = problem.phi0().max();
    let g_abs = problem.g0().max_abs();
    let dt = HORIZON / NT as f64;

    let mut worst_low = 0.0f64;
    let mut worst_high = 0.0f64;
    let mut coercive = true;
    let mut margin = f64::INFINITY;
    for run in runs {
        let u = &run.solution;
        for (m, row) in u.levels().enumerate() {
            let upper = phi_max * (g_abs * m as f64 * dt).exp();
            for v in row {
                worst_low = worst_low.max(-v);
                worst_high = worst_high.max(v - upper);
            }
        }
        let n = run.n as f64;
        let bound = X_A * X_A / (2.0 * n);
        for row in u.levels() {
            for (i, v) in row.iter().enumerate().take(NX - 1).skip(1) {
                let x = grid.x(i);
                let a = x * x * (v.max(0.0) + 1.0 / n);
                coercive &= a >= bound;
                margin = margin.min(a / bound);
            }
        }
    }
    let mut out = vec![
        Outcome {
            id: 1,
            name: "maximum principle",
            passed: worst_low <= 1e-10 && worst_high <= 1e-8,
            detail: format!(
                "min undershoot {:.2e}, overshoot above max(phi0) e^(max|g0| t) {:.2e}",
                worst_low.max(0.0) + 0.0,
                worst_high.max(0.0) + 0.0
            ),
        },
        Outcome {
            id: 2,
            name: "coercivity",
            passed: coercive,
            detail: format!("min x^2 P_n(u_n) / (x_a^2/2n) = {margin:.4}"),
        },
    ];

    let psi = TestFunctionSpec::CompactBump;
    let reports: Vec<_> = runs.iter().map(|r| estimate_report(r, &[1, 2, 4], 0.25, &psi).unwrap()).collect();
    let spreads = spread(&reports);
    let worst = spreads.values().copied().fold(1.0, f64::max);
    out.push(Outcome {
        id: 3,
        name: "uniform estimates",
        passed: worst <= 10.0 && spreads.len() == 6,
        detail: format!("largest max/min ratio {worst:.3} over {} functionals", spreads.len()),
    });

    let h = grid.h();
    let pairwise: Vec<f64> = runs
        .windows(2)
        .map(|w| {
            let sq: Vec<f64> =
                w[0].solution.values().iter().zip(w[1].solution.values()).map(|(a, b)| (a - b) * (a - b)).collect();
            trapz2(&sq, NX, NT, h, dt).sqrt()
        })
        .collect();
    let reference = runs.last().unwrap();
    let ref_tilde = tilde_shift(&reference.solution, reference.n).unwrap();
    let sigma = 1.5;
    let grad_sq = |u: &SpaceTimeField| -> Vec<f64> {
        u.levels().flat_map(|row| gradient(&row.iter().map(|v| v * v).collect::<Vec<_>>(), h)).collect()
    };
    let ref_grad = grad_sq(&ref_tilde);
    let grad_dist: Vec<f64> = runs[..runs.len() - 1]
        .iter()
        .map(|r| {
            let g = grad_sq(&tilde_shift(&r.solution, r.n).unwrap());
            let p: Vec<f64> = g.iter().zip(&ref_grad).map(|(a, b)| (a - b).abs().powf(sigma)).collect();
            trapz2(&p, NX, NT, h, dt).powf(1.0 / sigma)
        })
        .collect();
    let proxy: Vec<f64> = runs[..runs.len() - 1]
        .iter()
        .map(|r| ae_gradient_proxy(&r.solution, &reference.solution, 0.5, &psi).unwrap())
        .collect();
    out.push(Outcome {
        id: 4,
        name: "n-convergence",
        passed: decreasing(&pairwise) && decreasing(&grad_dist) && decreasing(&proxy),
        detail: format!(
            "L2 {:.3e}->{:.3e}, grad-sq {:.3e}->{:.3e}, proxy {:.3e}->{:.3e}",
            pairwise[0],
            pairwise[pairwise.len() - 1],
            grad_dist[0],
            grad_dist[grad_dist.len() - 1],
            proxy[0],
            proxy[proxy.len() - 1]
        ),
    });
    out
}

fn exact_m(x: f64) -> f64 {
    (x - X_A) * (X_B - x) / 2.0
}

fn criterion_five() -> Outcome {
    let residuals = |nx: usize, nt: usize| -> Vec<f64> {
        let grid = SpatialGrid::new(X_A, X_B, nx).unwrap();
        let tgrid = TimeGrid::new(HORIZON, nt).unwrap();
        let m = ScalarField::from_fn(grid, exact_m).unwrap();
        // f0(s) = s with w0 = 0 gives g0 = p^2
        let g0 = ScalarField::from_fn(grid, |p| p * p).unwrap();
        let problem = ProblemData::new_relaxed(tgrid, m, g0).unwrap();
        let u = SpaceTimeField::from_fn(grid, tgrid, |x, _| exact_m(x)).unwrap();
        TestFunctionSpec::eta_library().iter().map(|eta| weak_residual(&u, &problem, eta).unwrap()).collect()
    };
    let coarse = residuals(NX, NT);
    let fine = residuals(2 * NX - 1, 2 * NT);
    let worst = coarse.iter().copied().fold(0.0, f64::max);
    let ratio = coarse.iter().zip(&fine).map(|(c, f)| c / f).fold(f64::INFINITY, f64::min);
    Outcome {
        id: 5,
        name: "weak-form identity",
        passed: worst <= 1e-4 && ratio >= 3.0,
        detail: format!("max residual {worst:.3e}, min ratio on refinement {ratio:.2}"),
    }
}

fn criterion_six() -> Outcome {
    let (grid, _) = grids();
    let zero = ScalarField::zeros(grid);
    let f0 = ScalarField::from_fn(grid, |s| s).unwrap();
    let m = equilibrium_m(&zero, &f0).unwrap();
    let err_quadratic = m.values().iter().zip(grid.nodes()).map(|(v, x)| (v - exact_m(x)).abs()).fold(0.0, f64::max);

    let u0 = cubic_bump(&grid, 0.8).unwrap();
    let m_const = equilibrium_m(&u0, &ScalarField::constant(grid, 2.5).unwrap()).unwrap();
    let err_constant = m_const.max_abs_diff(&u0).unwrap();

    // g0 = p^2 f0' = p^2
    let g0 = ScalarField::from_fn(grid, |p| p * p).unwrap();
    let residual = stationarity_residual(&m, &g0).unwrap();
    Outcome {
        id: 6,
        name: "equilibrium formula",
        passed: err_quadratic <= 1e-12 && err_constant <= 1e-12 && residual <= 1e-10,
        detail: format!("quadratic {err_quadratic:.2e}, constant f0 {err_constant:.2e}, stationarity {residual:.2e}"),
    }
}

fn criterion_seven() -> Outcome {
    let run = |nx: usize, nt: usize| -> (f64, f64) {
        let grid = SpatialGrid::new(X_A, X_B, nx).unwrap();
        let tgrid = TimeGrid::new(HORIZON, nt).unwrap();
        let kin = BumpOnTail::default().kinetic(&grid).unwrap();
        let sol = solve_coupled(&kin, tgrid, &SolverConfig::default()).unwrap();
        let recon = reconstruct_f(&sol.w, kin.w0(), kin.f0()).unwrap();
        let mass = mass_history(&sol.f);
        let drift = mass.iter().map(|m| (m - mass[0]).abs()).fold(0.0, f64::max) / mass[0].abs() / HORIZON;
        (recon.max_abs_diff(&sol.f).unwrap(), drift)
    };
    let (coarse, drift) = run(NX, NT);
    let (fine, _) = run(2 * NX - 1, 2 * NT);
    let ratio = coarse / fine;
    Outcome {
        id: 7,
        name: "coupled/reduced equivalence",
        passed: coarse <= 5e-2 && (1.6..=2.4).contains(&ratio) && drift <= 1e-6,
        detail: format!("discrepancy {coarse:.3e}, refinement ratio {ratio:.3}, mass drift {drift:.2e}/unit time"),
    }
}

fn criterion_eight(problem: &ProblemData, reference: &SolveReport) -> Outcome {
    let eps = 0.3;
    let step = 1e-4;
    let exact_t = |y: f64| y.signum() * y.abs().min(eps);
    let ys: Vec<f64> = (0..10_000).map(|i| -2.0 + 4.0 * i as f64 / 9_999.0).collect();
    let mut fd_err = 0.0f64;
    let mut bounds = true;
    for &y in &ys {
        let t = cutoff_t(y, eps);
        bounds &= t.abs() <= eps && y * t >= 0.0 && (t - exact_t(y)).abs() <= 1e-15;
        if (y.abs() - eps).abs() > 2.0 * step {
            let d = (primitive_j(y + step, eps) - primitive_j(y - step, eps)) / (2.0 * step);
            fd_err = fd_err.max((d - t).abs());
        }
    }

    let nu = 10.0;
    let u = &reference.solution;
    let u_nu = time_regularize(u, problem.phi0(), nu).unwrap();
    let residual = regularization_residual(&u_nu, u, nu).unwrap();
    let c = nu * u_nu.max_abs_diff(u).unwrap();
    let bound = c * u.tgrid().dt();
    let initial = u_nu.level(0) == problem.phi0().values();

    // time-constant u: u_nu has the closed form u + (phi0 - u) e^{-nu t}
    let (grid, tgrid) = grids();
    let frozen = SpaceTimeField::from_fn(grid, tgrid, |x, _| exact_m(x)).unwrap();
    let start = ScalarField::zeros(grid);
    let relaxed = time_regularize(&frozen, &start, nu).unwrap();
    let closed = SpaceTimeField::from_fn(grid, tgrid, |x, t| exact_m(x) * (1.0 - (-nu * t).exp())).unwrap();
    let closed_err = relaxed.max_abs_diff(&closed).unwrap();

    Outcome {
        id: 8,
        name: "auxiliary identities",
        passed: fd_err <= 1e-6 && bounds && residual <= bound && initial && closed_err <= 1e-12,
        detail: format!(
            "J'-T {fd_err:.2e}, T bounds {bounds}, u_nu residual {residual:.2e} <= C dt = {bound:.2e}, \
             u_nu(0)=phi0 {initial}, closed form {closed_err:.1e}"
        ),
    }
}

fn main() {
    let (grid, tgrid) = grids();
    let problem = Preset::BumpOnTail(BumpOnTail::default()).problem(&grid, tgrid).unwrap();
    let runs = solve_family(&problem);

    let mut outcomes = criteria_one_to_four(&problem, &runs);
    outcomes.push(criterion_five());
    outcomes.push(criterion_six());
    outcomes.push(criterion_seven());
    outcomes.push(criterion_eight(&problem, runs.last().unwrap()));

    // the g0 of the f0(s) = s data used in 5 and 6 must match the library transform
    let f0 = ScalarField::from_fn(grid, |s| s).unwrap();
    let g0 = build_g0(&f0, &ScalarField::zeros(grid)).unwrap();
    let g0_ok = g0.values().iter().zip(grid.nodes()).all(|(g, p)| (g - p * p).abs() <= 1e-10);

    let mut failed = 0;
    for o in &outcomes {
        println!("[{}] criterion {} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
        failed += usize::from(!o.passed);
    }
    if !g0_ok {
        println!("[FAIL] setup: g0 of f0(s) = s is not p^2");
        failed += 1;
    }
    println!("{} of {} criteria passed", outcomes.len() - failed.min(outcomes.len()), outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
