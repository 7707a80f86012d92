//! The three commands. Each returns the files it wrote so callers can
//! report them; failures carry their exit class in [`CliError`].

use std::path::{Path, PathBuf};

use ckbrownian::ensemble::{run_ensemble, Engine};
use ckbrownian::kernels::{compute_path_integrals, gaussian_width, tau_of_t};
use ckbrownian::noise::{make_constant_force, make_white_noise, NoisePath};
use ckbrownian::solver::{Solver, SolverConfig};
use ckbrownian::types::{validate, GaussianPacket, PhysicalParams, SpatialGrid, TimeGrid};
use ckbrownian::verify;

use crate::config::RunConfig;
use crate::output::{
    csv_string, json_string, write_artifact, CheckOut, EnsembleManifest, EnsembleRunOut, ForceOut,
    PacketOut, ParamsOut, ProbeOut, SimulateManifest, SpaceGridOut, TimeGridOut, VerifyItem,
    VerifyReport,
};
use crate::CliError;

const SIMULATE_HEADER: [&str; 9] = [
    "t",
    "tau",
    "norm",
    "mean_x",
    "var_x",
    "sigma_analytic",
    "f1",
    "I",
    "f2",
];

const ENSEMBLE_HEADER: [&str; 8] = [
    "t",
    "tau",
    "center_mean",
    "center_var",
    "dx_qu",
    "dx_cl_sample",
    "dx_cl_analytic",
    "dx_total",
];

fn config_err(e: ckbrownian::CkError) -> CliError {
    CliError::Config(e.to_string())
}

fn run_err(e: ckbrownian::CkError) -> CliError {
    CliError::Run(e.to_string())
}

struct Setup {
    params: PhysicalParams,
    packet: GaussianPacket,
    tgrid: TimeGrid,
    xgrid: Option<SpatialGrid>,
}

/// Builds the core objects from a config; every rejection here is a config
/// problem. A spatial grid is only built (and checked) when some selected
/// engine needs one.
fn build_setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    let params = PhysicalParams::new(cfg.mass, cfg.damping, cfg.noise).map_err(config_err)?;
    let packet = GaussianPacket::new(cfg.sigma0, cfg.x0).map_err(config_err)?;
    let tgrid = TimeGrid::new(cfg.t_end, cfg.n_steps).map_err(config_err)?;
    let xgrid = if cfg.engine.selected().contains(&"solver") {
        Some(SpatialGrid::new(cfg.x_min, cfg.x_max, cfg.n_points).map_err(config_err)?)
    } else {
        None
    };
    let report = validate(&params, &packet, &tgrid, xgrid.as_ref()).map_err(config_err)?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(Setup {
        params,
        packet,
        tgrid,
        xgrid,
    })
}

fn force_path(cfg: &RunConfig, params: &PhysicalParams, tgrid: &TimeGrid) -> NoisePath {
    if cfg.noise > 0.0 {
        make_white_noise(params, tgrid, cfg.seed)
    } else {
        make_constant_force(0.0, tgrid)
    }
}

fn params_out(params: &PhysicalParams) -> ParamsOut {
    ParamsOut {
        m: params.mass(),
        eta: params.damping(),
        noise: params.noise_strength(),
        gamma: params.damping_rate(),
    }
}

fn time_grid_out(tgrid: &TimeGrid) -> TimeGridOut {
    TimeGridOut {
        t_end: tgrid.t_end(),
        n_steps: tgrid.n_steps(),
        dt: tgrid.dt(),
    }
}

fn space_grid_out(xgrid: &SpatialGrid) -> SpaceGridOut {
    SpaceGridOut {
        x_min: xgrid.node(0),
        x_max: xgrid.node(0) + xgrid.width(),
        n_points: xgrid.n_points(),
        dx: xgrid.dx(),
    }
}

/// Aborts before a solver run whose packet tail would reach the domain
/// edge. The center follows the drift integral exactly, so this check sees
/// the actual force realization, not a worst case.
fn excursion_guard(
    tgrid: &TimeGrid,
    xgrid: &SpatialGrid,
    centers: &[f64],
    sigmas: &[f64],
) -> Result<(), CliError> {
    let x_min = xgrid.node(0);
    let x_max = x_min + xgrid.width();
    for (j, (&c, &s)) in centers.iter().zip(sigmas).enumerate() {
        let reach = 6.0 * s;
        if c - reach < x_min || c + reach > x_max {
            return Err(CliError::Run(format!(
                "domain excursion at t = {}: packet center {c} with 6-sigma reach {reach} \
                 leaves [{x_min}, {x_max}]; widen the domain or shorten the run",
                tgrid.node(j)
            )));
        }
    }
    Ok(())
}

/// Propagates one packet under one force realization and writes a per-node
/// CSV per engine plus a JSON manifest.
pub fn cmd_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let setup = build_setup(cfg)?;
    let path = force_path(cfg, &setup.params, &setup.tgrid);
    let ints = compute_path_integrals(&path, &setup.params);

    let sigmas: Vec<f64> = ints
        .tau()
        .iter()
        .map(|&tau| gaussian_width(cfg.sigma0, cfg.mass, tau))
        .collect();
    let centers: Vec<f64> = ints.drift().iter().map(|&d| cfg.x0 + d).collect();
    if let Some(xgrid) = &setup.xgrid {
        excursion_guard(&setup.tgrid, xgrid, &centers, &sigmas)?;
    }

    let mut outputs = Vec::new();
    let mut written = Vec::new();
    let mut checks = Vec::new();
    for engine in cfg.engine.selected() {
        let rows: Vec<Vec<f64>> = match engine {
            "analytic" => (0..setup.tgrid.n_nodes())
                .map(|j| {
                    vec![
                        setup.tgrid.node(j),
                        ints.tau()[j],
                        1.0,
                        centers[j],
                        sigmas[j] * sigmas[j],
                        sigmas[j],
                        ints.drift()[j],
                        ints.impulse()[j],
                        ints.phase()[j],
                    ]
                })
                .collect(),
            "solver" => {
                let xgrid = setup.xgrid.as_ref().expect("solver engine has a grid");
                let mut solver = Solver::new(SolverConfig::new(*xgrid, setup.tgrid));
                let run = solver
                    .run(&setup.packet, &path, &setup.params)
                    .map_err(run_err)?;
                let norm_drift = run
                    .observables
                    .iter()
                    .map(|o| (o.norm - 1.0).abs())
                    .fold(0.0f64, f64::max);
                let center_gap = run
                    .observables
                    .iter()
                    .zip(&centers)
                    .map(|(o, &c)| (o.mean_x - c).abs())
                    .fold(0.0f64, f64::max);
                let width_gap = run
                    .observables
                    .iter()
                    .zip(&sigmas)
                    .map(|(o, &s)| (o.width() - s).abs() / s)
                    .fold(0.0f64, f64::max);
                checks.push(CheckOut::new("solver_norm_drift", norm_drift, 1e-8));
                checks.push(CheckOut::new("solver_center_vs_drift", center_gap, 1e-3));
                checks.push(CheckOut::new("solver_width_vs_law", width_gap, 1e-4));
                run.observables
                    .iter()
                    .enumerate()
                    .map(|(j, o)| {
                        vec![
                            setup.tgrid.node(j),
                            ints.tau()[j],
                            o.norm,
                            o.mean_x,
                            o.var_x,
                            sigmas[j],
                            ints.drift()[j],
                            ints.impulse()[j],
                            ints.phase()[j],
                        ]
                    })
                    .collect()
            }
            other => unreachable!("engine {other}"),
        };
        let name = format!("simulate_{engine}.csv");
        written.push(write_artifact(
            out_dir,
            &name,
            &csv_string(&SIMULATE_HEADER, &rows),
        )?);
        outputs.push(name);
    }

    let manifest = SimulateManifest {
        command: "simulate",
        params: params_out(&setup.params),
        packet: PacketOut {
            sigma0: cfg.sigma0,
            x0: cfg.x0,
        },
        time_grid: time_grid_out(&setup.tgrid),
        space_grid: setup.xgrid.as_ref().map(space_grid_out),
        force: if cfg.noise > 0.0 {
            ForceOut {
                kind: "white",
                seed: Some(cfg.seed),
            }
        } else {
            ForceOut {
                kind: "zero",
                seed: None,
            }
        },
        engines: cfg.engine.selected(),
        outputs,
        checks,
    };
    written.push(write_artifact(
        out_dir,
        "simulate_manifest.json",
        &json_string(&manifest),
    )?);
    Ok(written)
}

/// Runs a seeded noise ensemble per selected engine and writes the spread
/// statistics plus a manifest with the diffusion-law probes.
pub fn cmd_ensemble(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    for &t in &cfg.probe_times {
        if !(0.0..=cfg.t_end).contains(&t) {
            return Err(CliError::Config(format!(
                "probe time {t} outside the simulated span [0, {}]",
                cfg.t_end
            )));
        }
    }
    let setup = build_setup(cfg)?;
    let gamma = setup.params.damping_rate();

    let mut written = Vec::new();
    let mut runs = Vec::new();
    for engine_name in cfg.engine.selected() {
        let engine = match engine_name {
            "analytic" => Engine::Analytic,
            "solver" => {
                let xgrid = setup.xgrid.as_ref().expect("solver engine has a grid");
                Engine::Solver(SolverConfig::new(*xgrid, setup.tgrid))
            }
            other => unreachable!("engine {other}"),
        };
        let report = run_ensemble(
            &setup.params,
            &setup.packet,
            &setup.tgrid,
            cfg.n_paths,
            cfg.seed,
            &engine,
        )
        .map_err(run_err)?;

        let rows: Vec<Vec<f64>> = report
            .times()
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                vec![
                    t,
                    tau_of_t(gamma, t),
                    report.center_mean()[j],
                    report.center_var()[j],
                    report.width_qu()[j],
                    report.center_var()[j].sqrt(),
                    report.dx_cl_analytic()[j],
                    report.dx_total()[j],
                ]
            })
            .collect();
        let name = format!("ensemble_{engine_name}.csv");
        written.push(write_artifact(
            out_dir,
            &name,
            &csv_string(&ENSEMBLE_HEADER, &rows),
        )?);

        // Worst normalized violation of total^2 = quantum^2 + sample^2.
        let residual = (0..report.times().len())
            .map(|j| {
                let total = report.dx_total()[j];
                let qu = report.width_qu()[j];
                let cl = report.center_var()[j];
                ((total * total - qu * qu - cl) / (total * total)).abs()
            })
            .fold(0.0f64, f64::max);

        let allowed = 3.0 * (2.0 / (cfg.n_paths as f64 - 1.0)).sqrt();
        let probes: Vec<ProbeOut> = if cfg.noise > 0.0 {
            cfg.probe_times
                .iter()
                .map(|&t| {
                    let node = setup.tgrid.nearest_node(t);
                    let t_node = setup.tgrid.node(node);
                    let eta = setup.params.damping();
                    let law = cfg.noise / (eta * eta) * (t_node - tau_of_t(gamma, t_node));
                    let measured = report.center_var()[node];
                    let relative = if law > 0.0 {
                        (measured - law) / law
                    } else if measured == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    };
                    ProbeOut {
                        t: t_node,
                        node,
                        measured_var: measured,
                        law_var: law,
                        relative_deviation: relative,
                        allowed,
                        passed: relative.abs() <= allowed,
                    }
                })
                .collect()
        } else {
            Vec::new()
        };

        runs.push(EnsembleRunOut {
            engine: engine_name,
            output: name,
            decomposition: CheckOut::new("decomposition_identity", residual, 1e-12),
            probes,
        });
    }

    let manifest = EnsembleManifest {
        command: "ensemble",
        params: params_out(&setup.params),
        packet: PacketOut {
            sigma0: cfg.sigma0,
            x0: cfg.x0,
        },
        time_grid: time_grid_out(&setup.tgrid),
        space_grid: setup.xgrid.as_ref().map(space_grid_out),
        n_paths: cfg.n_paths,
        base_seed: cfg.seed,
        runs,
    };
    written.push(write_artifact(
        out_dir,
        "ensemble_manifest.json",
        &json_string(&manifest),
    )?);
    Ok(written)
}

/// Runs the built-in correctness suite, prints one line per check, and
/// fails (exit 1) when any check fails.
pub fn cmd_verify(out_dir: Option<&Path>) -> Result<(), CliError> {
    let checks = verify::all_checks();
    let mut failed = 0usize;
    for check in &checks {
        let tag = if check.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", check.name, check.detail);
        if !check.passed {
            failed += 1;
        }
    }
    println!("{}/{} checks passed", checks.len() - failed, checks.len());

    if let Some(dir) = out_dir {
        let report = VerifyReport {
            command: "verify",
            passed: checks.len() - failed,
            failed,
            checks: checks
                .into_iter()
                .map(|c| VerifyItem {
                    name: c.name,
                    passed: c.passed,
                    detail: c.detail,
                })
                .collect(),
        };
        write_artifact(dir, "verify_report.json", &json_string(&report))?;
    }

    if failed > 0 {
        Err(CliError::Run(format!(
            "{failed} verification check(s) failed"
        )))
    } else {
        Ok(())
    }
}
