//! Self-contained verification checks covering the toolkit's headline
//! claims: frozen parameters, stated tolerances, one pass/fail report each.
//!
//! Every check builds its own inputs, so the functions can run in any order
//! and from any caller (the acceptance test suite and the command-line
//! `verify` command both use them).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::ensemble::{decompose_uncertainty, run_ensemble, Engine};
use crate::error::CkError;
use crate::kernels::{
    compute_path_integrals, evolve_gaussian, gaussian_width, plane_wave, tau_of_t, PropagatorKernel,
};
use crate::langevin::integrate;
use crate::noise::{make_constant_force, make_white_noise, path_seed};
use crate::solver::{Solver, SolverConfig};
use crate::types::{GaussianPacket, PhysicalParams, SpatialGrid, TimeGrid};

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Runs every check in its fixed order.
pub fn all_checks() -> Vec<CheckReport> {
    vec![
        width_saturation(),
        free_spreading(),
        constant_force_center(),
        diffusion_law(),
        uncertainty_decomposition(),
        ehrenfest_order(),
        unitarity_and_convergence(),
        propagator_composition(),
        mode_orthonormality(),
    ]
}

fn guarded(name: &'static str, body: impl FnOnce() -> Result<CheckReport, CkError>) -> CheckReport {
    body().unwrap_or_else(|e| CheckReport {
        name,
        passed: false,
        detail: format!("aborted: {e}"),
    })
}

/// Damped width saturation: with m = sigma0 = 1 and damping rate 1 the
/// solver width at t = 20 matches sqrt(1 + tau^2/4), tau = 1 - exp(-20),
/// within 1e-6 relative, and the analytic width has stopped moving between
/// t = 20 and t = 40 (gap below 1e-8).
pub fn width_saturation() -> CheckReport {
    const NAME: &str = "width_saturation";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 1.0, 0.0)?;
        let packet = GaussianPacket::new(1.0, 0.0)?;
        let xgrid = SpatialGrid::new(-32.0, 32.0, 1024)?;
        let tgrid = TimeGrid::new(20.0, 4096)?;
        let run = Solver::new(SolverConfig::new(xgrid, tgrid)).run(
            &packet,
            &make_constant_force(0.0, &tgrid),
            &p,
        )?;
        let expected = gaussian_width(1.0, 1.0, tau_of_t(1.0, 20.0));
        let rel = (run.final_observables().width() / expected - 1.0).abs();
        let plateau = (gaussian_width(1.0, 1.0, tau_of_t(1.0, 40.0)) - expected).abs();
        Ok(CheckReport {
            name: NAME,
            passed: rel <= 1e-6 && plateau < 1e-8,
            detail: format!(
                "solver width at t=20 off by {rel:.2e} relative (allowed 1e-6); \
                 analytic width moves {plateau:.2e} between t=20 and t=40 (allowed 1e-8)"
            ),
        })
    })
}

/// Undamped limit: with gamma = 0 the width at t = 5 follows the free
/// spreading law sqrt(sigma0^2 + t^2 / (4 m^2 sigma0^2)) within 1e-6
/// relative.
pub fn free_spreading() -> CheckReport {
    const NAME: &str = "free_spreading";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 0.0, 0.0)?;
        let packet = GaussianPacket::new(1.0, 0.0)?;
        let xgrid = SpatialGrid::new(-32.0, 32.0, 512)?;
        let tgrid = TimeGrid::new(5.0, 512)?;
        let run = Solver::new(SolverConfig::new(xgrid, tgrid)).run(
            &packet,
            &make_constant_force(0.0, &tgrid),
            &p,
        )?;
        let expected = gaussian_width(1.0, 1.0, 5.0);
        let rel = (run.final_observables().width() / expected - 1.0).abs();
        Ok(CheckReport {
            name: NAME,
            passed: rel <= 1e-6,
            detail: format!(
                "free width at t=5 off by {rel:.2e} relative of {expected:.6} (allowed 1e-6)"
            ),
        })
    })
}

/// Constant-force center: with F0 = gamma = m = 1 the solver mean position
/// at t = 10, the cumulative drift integral, and the closed form
/// t - (1 - exp(-10)) agree pairwise within 1e-5 absolute. The impulse
/// reaches exp(10) - 1, so the solver needs the fine wavenumber grid.
pub fn constant_force_center() -> CheckReport {
    const NAME: &str = "constant_force_center";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 1.0, 0.0)?;
        let packet = GaussianPacket::new(1.0, 0.0)?;

        let kgrid = TimeGrid::new(10.0, 32768)?;
        let ints = compute_path_integrals(&make_constant_force(1.0, &kgrid), &p);
        let f1 = *ints.drift().last().expect("nonempty grid");

        let exact = 10.0 - (1.0 - (-10.0f64).exp());

        let xgrid = SpatialGrid::new(-9.0, 19.0, 1 << 18)?;
        let tgrid = TimeGrid::new(10.0, 4096)?;
        let run = Solver::new(SolverConfig::new(xgrid, tgrid)).run(
            &packet,
            &make_constant_force(1.0, &tgrid),
            &p,
        )?;
        let solver_x = run.final_observables().mean_x;

        let worst = (solver_x - exact)
            .abs()
            .max((f1 - exact).abs())
            .max((solver_x - f1).abs());
        Ok(CheckReport {
            name: NAME,
            passed: worst <= 1e-5,
            detail: format!(
                "centers at t=10: solver {solver_x:.8}, drift integral {f1:.8}, \
                 closed form {exact:.8}; worst pairwise gap {worst:.2e} (allowed 1e-5)"
            ),
        })
    })
}

const DIFFUSION_SEED: u64 = 0xD1FF_0001;

/// Classical diffusion law: a 2000-path analytic ensemble at
/// gamma = D = eta = 1 reproduces the displacement variance
/// (D/eta^2)(t - (1 - exp(-t))) at t in {0.5, 1, 2, 5, 10} within the
/// 3-sigma band of the sample-variance estimator, 3 sqrt(2/1999).
pub fn diffusion_law() -> CheckReport {
    const NAME: &str = "diffusion_law";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 1.0, 1.0)?;
        let packet = GaussianPacket::new(1.0, 0.0)?;
        let tgrid = TimeGrid::new(10.0, 2000)?;
        let report = run_ensemble(&p, &packet, &tgrid, 2000, DIFFUSION_SEED, &Engine::Analytic)?;
        let allowed = 3.0 * (2.0f64 / 1999.0).sqrt();

        let mut passed = true;
        let mut parts = Vec::new();
        for &t in &[0.5, 1.0, 2.0, 5.0, 10.0] {
            let node = tgrid.nearest_node(t);
            let target = t - (1.0 - (-t).exp());
            let rel = (report.center_var()[node] / target - 1.0).abs();
            passed &= rel <= allowed;
            parts.push(format!("t={t}: {rel:.4}"));
        }
        Ok(CheckReport {
            name: NAME,
            passed,
            detail: format!(
                "relative variance deviations [{}] against allowance {allowed:.4}",
                parts.join(", ")
            ),
        })
    })
}

const SUBSAMPLE_SEED: u64 = 0x50B5_0002;

/// Spread decomposition: in the diffusion ensemble the total spread obeys
/// dx_total^2 = dx_qu^2 + dx_cl^2 exactly at every node, the quantum width
/// being common to all paths; a 50-path solver-engine subsample reproduces
/// the same width within the per-path width guard and the same centers
/// within discretization error.
pub fn uncertainty_decomposition() -> CheckReport {
    const NAME: &str = "uncertainty_decomposition";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 1.0, 1.0)?;
        let packet = GaussianPacket::new(1.0, 0.0)?;
        let tgrid = TimeGrid::new(10.0, 2000)?;
        let report = run_ensemble(&p, &packet, &tgrid, 2000, DIFFUSION_SEED, &Engine::Analytic)?;
        let mut identity_worst = 0.0f64;
        for node in 0..report.times().len() {
            let d = decompose_uncertainty(&report, node)?;
            let gap =
                (d.dx_total * d.dx_total - d.dx_qu * d.dx_qu - d.dx_cl_sample * d.dx_cl_sample)
                    .abs()
                    / (d.dx_total * d.dx_total).max(1.0);
            identity_worst = identity_worst.max(gap);
        }

        let sub_grid = TimeGrid::new(2.0, 2048)?;
        let config = SolverConfig::new(SpatialGrid::new(-16.0, 16.0, 512)?, sub_grid);
        let solver_report = run_ensemble(
            &p,
            &packet,
            &sub_grid,
            50,
            SUBSAMPLE_SEED,
            &Engine::Solver(config),
        )?;
        let analytic_report = run_ensemble(
            &p,
            &packet,
            &sub_grid,
            50,
            SUBSAMPLE_SEED,
            &Engine::Analytic,
        )?;
        let center_gap = solver_report
            .center_mean()
            .iter()
            .zip(analytic_report.center_mean())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);

        Ok(CheckReport {
            name: NAME,
            passed: identity_worst <= 1e-12 && center_gap <= 1e-3,
            detail: format!(
                "quadrature identity residual {identity_worst:.2e} (allowed 1e-12); \
                 50-path solver subsample kept every width inside the per-path guard \
                 and matches analytic centers within {center_gap:.2e} (allowed 1e-3)"
            ),
        })
    })
}

const EHRENFEST_SEED: u64 = 0xE11E_0003;

/// Per-path center equivalence: over ten white-noise paths the gap between
/// the solver mean position and the classical trajectory shrinks at second
/// order under step halving (measured order at least 1.9), and the zero-path
/// field matches the closed-form packet pointwise within 1e-5 at the default
/// resolution after aligning the global phase at the packet center.
pub fn ehrenfest_order() -> CheckReport {
    const NAME: &str = "ehrenfest_order";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 1.0, 1.0)?;
        let packet = GaussianPacket::new(1.0, 0.0)?;
        let base = TimeGrid::new(2.0, 256)?;
        let xgrid = SpatialGrid::new(-32.0, 32.0, 1024)?;

        let mut errs = [0.0f64; 3];
        for i in 0..10 {
            let path = make_white_noise(&p, &base, path_seed(EHRENFEST_SEED, i));
            for (slot, factor) in [1usize, 2, 4].into_iter().enumerate() {
                let fine = path.refine(factor);
                let run =
                    Solver::new(SolverConfig::new(xgrid, fine.grid())).run(&packet, &fine, &p)?;
                let traj = integrate(&fine, &p, 0.0, 0.0);
                let gap = (0..=base.n_steps())
                    .map(|j| {
                        (run.observables[j * factor].mean_x - traj.positions()[j * factor]).abs()
                    })
                    .fold(0.0f64, f64::max);
                errs[slot] = errs[slot].max(gap);
            }
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();

        let quiet = PhysicalParams::new(1.0, 1.0, 0.0)?;
        let tgrid = TimeGrid::new(5.0, 4096)?;
        let zero = make_constant_force(0.0, &tgrid);
        let mut config = SolverConfig::new(xgrid, tgrid);
        config.snapshot_indices = vec![tgrid.n_steps()];
        let run = Solver::new(config).run(&packet, &zero, &quiet)?;
        let ints = compute_path_integrals(&zero, &quiet);
        let exact = evolve_gaussian(&packet, &ints, tgrid.n_steps(), &xgrid)?;
        // The analytic center stays at x = 0 on the zero path; align both
        // global phases at the node there.
        let anchor = ((0.0 - xgrid.x_min()) / xgrid.dx()).round() as usize;
        let solver_field = &run.snapshots[0].1;
        let sa = solver_field.values()[anchor];
        let ea = exact.values()[anchor];
        let field_gap = solver_field
            .values()
            .iter()
            .zip(exact.values())
            .map(|(s, e)| (s / sa - e / ea).norm())
            .fold(0.0f64, f64::max);

        Ok(CheckReport {
            name: NAME,
            passed: order1 >= 1.9 && order2 >= 1.9 && field_gap <= 1e-5,
            detail: format!(
                "center gap vs classical trajectory {:.2e} at dt=2/256, halving orders \
                 {order1:.3} and {order2:.3} (at least 1.9 required); phase-aligned \
                 zero-path field error {field_gap:.2e} (allowed 1e-5)",
                errs[0]
            ),
        })
    })
}

/// Unitarity and convergence: the discrete norm drifts less than 1e-9 over
/// ten thousand steps, and the width error against the analytic law shrinks
/// at second order under step halving.
pub fn unitarity_and_convergence() -> CheckReport {
    const NAME: &str = "unitarity_and_convergence";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 1.0, 0.0)?;
        let packet = GaussianPacket::new(1.0, 0.0)?;
        let xgrid = SpatialGrid::new(-32.0, 32.0, 1024)?;

        let long = TimeGrid::new(5.0, 10_000)?;
        let run = Solver::new(SolverConfig::new(xgrid, long)).run(
            &packet,
            &make_constant_force(0.0, &long),
            &p,
        )?;
        let drift = run
            .observables
            .iter()
            .map(|o| (o.norm - 1.0).abs())
            .fold(0.0f64, f64::max);

        let expected = gaussian_width(1.0, 1.0, tau_of_t(1.0, 5.0));
        let width_err = |n_steps: usize| -> Result<f64, CkError> {
            let tgrid = TimeGrid::new(5.0, n_steps)?;
            let run = Solver::new(SolverConfig::new(xgrid, tgrid)).run(
                &packet,
                &make_constant_force(0.0, &tgrid),
                &p,
            )?;
            Ok((run.final_observables().width() - expected).abs())
        };
        let e1 = width_err(1024)?;
        let e2 = width_err(2048)?;
        let e3 = width_err(4096)?;
        let order1 = (e1 / e2).log2();
        let order2 = (e2 / e3).log2();
        let orders_ok = (1.8..=2.2).contains(&order1) && (1.8..=2.2).contains(&order2);

        Ok(CheckReport {
            name: NAME,
            passed: drift <= 1e-9 && orders_ok,
            detail: format!(
                "norm drift {drift:.2e} over 10000 steps (allowed 1e-9); width errors \
                 {e1:.2e}/{e2:.2e}/{e3:.2e} halve at orders {order1:.3} and {order2:.3} \
                 (2.0 within 0.2 required)"
            ),
        })
    })
}

/// Propagator quadrature: evolving the packet to an intermediate time and
/// pushing it through the two-time kernel by quadrature reproduces the
/// directly evolved packet within 1e-4, and applying the from-release kernel
/// to the initial packet reproduces it within 1e-6.
pub fn propagator_composition() -> CheckReport {
    const NAME: &str = "propagator_composition";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 0.7, 0.0)?;
        let packet = GaussianPacket::new(1.0, 0.0)?;
        let tgrid = TimeGrid::new(1.2, 1200)?;
        let path = make_constant_force(0.6, &tgrid);
        let ints = compute_path_integrals(&path, &p);
        let xgrid = SpatialGrid::new(-14.0, 14.0, 14_000)?;
        let dx = xgrid.dx();

        let psi0 = evolve_gaussian(&packet, &ints, 0, &xgrid)?;
        let psi_mid = evolve_gaussian(&packet, &ints, 600, &xgrid)?;
        let psi_end = evolve_gaussian(&packet, &ints, 1200, &xgrid)?;

        let center = ints.drift()[1200];
        let sigma = gaussian_width(1.0, 1.0, ints.tau()[1200]);
        let anchor = ((center - xgrid.x_min()) / dx).round() as i64;
        let reach = (5.0 * sigma / dx) as i64;
        let targets: Vec<usize> = (-48..=48)
            .map(|s| (anchor + s * reach / 48) as usize)
            .collect();

        let through_mid = PropagatorKernel::new(&ints, 1200, 600)?;
        let from_start = PropagatorKernel::new(&ints, 1200, 0)?;
        let mut err_mid = 0.0f64;
        let mut err_start = 0.0f64;
        for &k in &targets {
            let x = xgrid.node(k);
            let mut acc_mid = Complex64::new(0.0, 0.0);
            let mut acc_start = Complex64::new(0.0, 0.0);
            for (j, (vm, v0)) in psi_mid.values().iter().zip(psi0.values()).enumerate() {
                let xp = xgrid.node(j);
                acc_mid += through_mid.eval(x, xp) * vm;
                acc_start += from_start.eval(x, xp) * v0;
            }
            err_mid = err_mid.max((acc_mid * dx - psi_end.values()[k]).norm());
            err_start = err_start.max((acc_start * dx - psi_end.values()[k]).norm());
        }

        Ok(CheckReport {
            name: NAME,
            passed: err_mid <= 1e-4 && err_start <= 1e-6,
            detail: format!(
                "kernel quadrature through the intermediate time off by {err_mid:.2e} \
                 (allowed 1e-4); applied to the initial packet off by {err_start:.2e} \
                 (allowed 1e-6)"
            ),
        })
    })
}

/// Plane-wave grid algebra: on a 128-point grid, with a force switched on,
/// the mode set is orthonormal under the grid inner product and complete,
/// both within 1e-12.
pub fn mode_orthonormality() -> CheckReport {
    const NAME: &str = "mode_orthonormality";
    guarded(NAME, || {
        let p = PhysicalParams::new(1.0, 0.6, 0.0)?;
        let xgrid = SpatialGrid::new(-16.0, 16.0, 128)?;
        let tgrid = TimeGrid::new(1.0, 200)?;
        let ints = compute_path_integrals(&make_constant_force(0.8, &tgrid), &p);
        let t_index = tgrid.n_steps();

        let n = xgrid.n_points();
        let dk = 2.0 * PI / xgrid.width();
        let half = (n / 2) as i64;
        let mut modes = Vec::with_capacity(n);
        for m in -half..half {
            let k = m as f64 * dk;
            let row: Result<Vec<Complex64>, CkError> = (0..n)
                .map(|j| plane_wave(k, xgrid.node(j), &ints, t_index))
                .collect();
            modes.push(row?);
        }

        let mut ortho_worst = 0.0f64;
        for (a, ma) in modes.iter().enumerate() {
            for (b, mb) in modes.iter().enumerate() {
                let inner: Complex64 = ma.iter().zip(mb).map(|(va, vb)| va.conj() * vb).sum();
                let scaled = inner * xgrid.dx() * dk;
                let expected = if a == b { 1.0 } else { 0.0 };
                ortho_worst = ortho_worst.max((scaled - expected).norm());
            }
        }

        let mut complete_worst = 0.0f64;
        for j in 0..n {
            for jp in 0..n {
                let sum: Complex64 = modes.iter().map(|m| m[j] * m[jp].conj()).sum();
                let scaled = sum * dk * xgrid.dx();
                let expected = if j == jp { 1.0 } else { 0.0 };
                complete_worst = complete_worst.max((scaled - expected).norm());
            }
        }

        Ok(CheckReport {
            name: NAME,
            passed: ortho_worst <= 1e-12 && complete_worst <= 1e-12,
            detail: format!(
                "orthonormality defect {ortho_worst:.2e}, completeness defect \
                 {complete_worst:.2e} (both allowed 1e-12)"
            ),
        })
    })
}
