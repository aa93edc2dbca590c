use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::AtomicBool;

use qlt_core::convergence::{refinement_study, run_sweep_cancellable, weak_residual, SweepPlan};
use qlt_core::equilibrium;
use qlt_core::estimates::estimate_report;
use qlt_core::solver::solve_sn_cancellable;
use qlt_core::validation::{run_all, CriterionOutcome, ValidationSettings};
use qlt_core::{RegularizationFamily, SpatialGrid, TestFunctionSpec, TimeGrid};
use serde_json::json;

use crate::config::RunConfig;
use crate::data::resolve;
use crate::error::CliError;
use crate::output::{cell, csv_text, opt_cell, Staging};
use crate::svg;

/// Files written by a command, and the reason for exit 3 if an invariant failed.
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub violation: Option<String>,
}

fn meshes(config: &RunConfig) -> Result<(SpatialGrid, TimeGrid), CliError> {
    let grid = SpatialGrid::new(config.domain.x_a, config.domain.x_b, config.grid.nx)
        .map_err(|e| CliError::Config(format!("domain/grid: {e}")))?;
    let tgrid =
        TimeGrid::new(config.grid.horizon, config.grid.nt).map_err(|e| CliError::Config(format!("grid: {e}")))?;
    Ok((grid, tgrid))
}

pub fn solve(config: &RunConfig, cancel: &AtomicBool) -> Result<Outcome, CliError> {
    let (grid, tgrid) = meshes(config)?;
    let data = resolve(config, &grid)?;
    let problem = data.problem(tgrid)?;
    let reg = RegularizationFamily::new(config.regularization.n)?;
    let run = solve_sn_cancellable(&problem, reg, &config.solver_config(), Some(cancel))?;
    let psi = TestFunctionSpec::CompactBump;
    let estimates = estimate_report(&run, &config.functionals.l_list, config.functionals.theta, &psi)?;
    let weak: BTreeMap<String, f64> = TestFunctionSpec::eta_library()
        .iter()
        .map(|eta| Ok((eta.name(), weak_residual(&run.solution, &problem, eta)?)))
        .collect::<Result<_, qlt_core::Error>>()?;
    eprintln!("solved n = {} in {:.2} s", run.n, run.wallclock);

    let mut stage = Staging::new(&config.output.dir)?;
    let u = &run.solution;
    let rows = u.levels().enumerate().flat_map(|(m, level)| {
        let t = tgrid.t(m);
        level.iter().enumerate().map(move |(i, v)| vec![cell(t), cell(grid.x(i)), cell(*v)])
    });
    stage.write("solution.csv", &csv_text(&["t", "x", "u"], rows))?;
    stage.write_json(
        "report.json",
        &json!({
            "config": config,
            "solve": {
                "n": run.n,
                "max_principle_ok": run.max_principle_ok,
                "max_principle_violation": run.max_principle_violation,
                "coercivity_min": run.coercivity_min,
                "coercivity_bound": run.coercivity_bound,
                "valid": run.is_valid(),
                "u_min": u.min(),
                "u_max": u.max(),
            },
            "estimates": estimates,
            "weak_residuals": weak,
        }),
    )?;
    if config.output.svg {
        stage.write("solution.svg", &svg::heatmap(u, &format!("u_n, n = {}", run.n)))?;
    }
    let violation = (!run.is_valid()).then(|| {
        format!(
            "n = {}: maximum principle ok = {}, coercivity {:.3e} vs bound {:.3e}",
            run.n, run.max_principle_ok, run.coercivity_min, run.coercivity_bound
        )
    });
    Ok(Outcome { written: stage.commit()?, violation })
}

pub fn sweep(config: &RunConfig, cancel: &AtomicBool) -> Result<Outcome, CliError> {
    let (grid, tgrid) = meshes(config)?;
    let data = resolve(config, &grid)?;
    if data.from_files && !config.refinement.grids.is_empty() {
        return Err(CliError::Config("refinement.grids: a refinement study needs preset data".into()));
    }
    let problem = data.problem(tgrid)?;
    let mut plan = SweepPlan::new(config.regularization.n_list.clone());
    plan.request = config.functionals.request();
    plan.l_values = config.functionals.l_list.clone();
    let report = run_sweep_cancellable(&problem, &plan, &config.solver_config(), Some(cancel))?;

    let refinement = if config.refinement.grids.is_empty() {
        None
    } else {
        let grids: Vec<(usize, usize)> = config.refinement.grids.iter().map(|[a, b]| (*a, *b)).collect();
        Some(refinement_study(
            &data.preset,
            (config.domain.x_a, config.domain.x_b),
            config.grid.horizon,
            config.refinement.n,
            &grids,
            &plan.etas,
            &config.solver_config(),
        )?)
    };

    let mut stage = Staging::new(&config.output.dir)?;
    let l_list = &config.functionals.l_list;
    let mut header: Vec<String> =
        ["n", "pairwise_l2", "grad_sigma", "mixed", "ae_proxy", "weak_residual", "energy"].map(String::from).to_vec();
    header.extend(l_list.iter().map(|l| format!("grad_l{l}")));
    header.extend(["time_deriv_sq", "weighted_power", "max_principle_ok", "coercivity_min"].map(String::from));
    let rows = report.rows.iter().map(|r| {
        let mut row = vec![
            r.n.to_string(),
            opt_cell(r.pairwise_l2),
            opt_cell(r.grad_sigma),
            opt_cell(r.mixed),
            opt_cell(r.ae_proxy),
            cell(r.weak_residual),
            cell(r.estimates.energy),
        ];
        row.extend(l_list.iter().map(|l| cell(r.estimates.grad_norms[l])));
        row.extend([
            cell(r.estimates.time_deriv_sq),
            cell(r.estimates.weighted_power),
            r.max_principle_ok.to_string(),
            cell(r.coercivity_min),
        ]);
        row
    });
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    stage.write("convergence.csv", &csv_text(&header_refs, rows))?;
    stage.write_json("convergence.json", &json!({ "config": config, "report": report, "refinement": refinement }))?;

    if let Some(rows) = &refinement {
        let names: Vec<String> = plan.etas.iter().map(TestFunctionSpec::name).collect();
        let mut header = vec!["nx", "nt", "h", "dt"];
        header.extend(names.iter().map(String::as_str));
        let lines = rows.iter().map(|r| {
            let mut line = vec![r.nx.to_string(), r.nt.to_string(), cell(r.h), cell(r.dt)];
            line.extend(names.iter().map(|n| cell(r.residuals[n])));
            line
        });
        stage.write("refinement.csv", &csv_text(&header, lines))?;
    }
    if config.output.svg {
        let ns: Vec<f64> = report.rows.iter().map(|r| r.n as f64).collect();
        let series = [
            ("pairwise L2", report.rows.iter().map(|r| r.pairwise_l2).collect()),
            ("grad-square distance", report.rows.iter().map(|r| r.grad_sigma).collect()),
            ("a.e. proxy", report.rows.iter().map(|r| r.ae_proxy).collect()),
            ("mixed", report.rows.iter().map(|r| r.mixed).collect()),
        ];
        stage.write("convergence.svg", &svg::loglog("convergence in n", "n", &ns, &series))?;
    }
    let violation = (!report.all_valid).then(|| {
        let bad: Vec<String> = report
            .rows
            .iter()
            .filter(|r| !r.max_principle_ok || r.coercivity_min < r.coercivity_bound)
            .map(|r| r.n.to_string())
            .collect();
        format!("bounds violated for n = {}", bad.join(", "))
    });
    Ok(Outcome { written: stage.commit()?, violation })
}

pub fn equilibrium(config: &RunConfig) -> Result<Outcome, CliError> {
    let (grid, _) = meshes(config)?;
    let data = resolve(config, &grid)?;
    let result = equilibrium::compute(&data.u0, &data.f0)?;
    let mut stage = Staging::new(&config.output.dir)?;
    let rows = grid
        .nodes()
        .into_iter()
        .zip(result.m.values())
        .zip(result.m_plus.values())
        .map(|((x, m), mp)| vec![cell(x), cell(*m), cell(*mp)]);
    stage.write("equilibrium.csv", &csv_text(&["x", "M", "M_plus"], rows))?;
    stage.write_json(
        "equilibrium.json",
        &json!({
            "config": config,
            "positive_everywhere": result.positive_everywhere,
            "residual_inf": result.residual_inf,
            "residual_on_support": result.residual_on_support,
            "nonpositive_nodes": result.nonpositive_nodes,
            "m_min": result.m.min(),
            "m_max": result.m.max(),
        }),
    )?;
    if !result.positive_everywhere {
        eprintln!("M is not positive on {} interior nodes; M_plus is its positive part", result.nonpositive_nodes);
    }
    Ok(Outcome { written: stage.commit()?, violation: None })
}

pub fn validation_settings(config: &RunConfig) -> Result<ValidationSettings, CliError> {
    if config.data.has_files() {
        return Err(CliError::Config("data: validate runs on presets only; remove the CSV paths".into()));
    }
    let f = &config.functionals;
    Ok(ValidationSettings {
        x_a: config.domain.x_a,
        x_b: config.domain.x_b,
        nx: config.grid.nx,
        nt: config.grid.nt,
        horizon: config.grid.horizon,
        preset: config.preset()?,
        n_values: config.regularization.n_list.clone(),
        tolerance_scale: config.tolerances.scale,
        uniformity_factor: config.tolerances.uniformity_factor,
        sigma: f.sigma,
        alpha: f.alpha,
        theta: f.theta,
        epsilon: f.epsilon,
        nu: f.nu,
    })
}

pub fn table(outcomes: &[CriterionOutcome]) -> String {
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for o in outcomes {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:>2}  {:<width$}  {mark}  {}\n", o.id, o.name, o.detail));
    }
    out
}

pub fn validate(config: &RunConfig) -> Result<Outcome, CliError> {
    let settings = validation_settings(config)?;
    let outcomes = run_all(&settings)?;
    print!("{}", table(&outcomes));
    let mut stage = Staging::new(&config.output.dir)?;
    stage.write_json("validation.json", &json!({ "config": config, "criteria": outcomes }))?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    let violation = (!failed.is_empty()).then(|| format!("criteria failed: {}", failed.join(", ")));
    Ok(Outcome { written: stage.commit()?, violation })
}
