//! Oracles for the closed-form machinery that do not reuse its own algebra:
//! a finite-difference residual of the governing equation, a short-time
//! delta-sequence check that pins the propagator branch, and the classical
//! trajectory as an independent check on the drift integral.

use num_complex::Complex64;
use std::f64::consts::PI;

use ckbrownian::kernels::{compute_path_integrals, plane_wave, PropagatorKernel};
use ckbrownian::langevin::integrate;
use ckbrownian::noise::{make_custom, make_white_noise};
use ckbrownian::types::{PhysicalParams, TimeGrid};

/// Max residual of i d/dt psi + e^{-gamma t}/(2m) psi'' + e^{gamma t} F x psi
/// over interior nodes and a few positions, using centered differences in t
/// and x. The force in the potential term is the average of the two
/// piecewise-constant values meeting at the node, which is what the centered
/// time stencil sees.
fn plane_wave_residual(n_steps: usize) -> f64 {
    let gamma = 0.4;
    let m = 1.3;
    let k = 0.9;
    let h = 1e-3;
    let params = PhysicalParams::new(m, gamma * m, 0.0).unwrap();
    let grid = TimeGrid::new(1.0, n_steps).unwrap();
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| 0.8 * (1.3 * t + 0.4).sin() + 0.3)
        .collect();
    let path = make_custom(samples.clone(), &grid).unwrap();
    let ints = compute_path_integrals(&path, &params);
    let dt = grid.dt();

    let mut worst = 0.0f64;
    for &x in &[-1.7, -0.2, 0.9, 2.3] {
        for j in 1..n_steps {
            let t = grid.node(j);
            let psi = |jj: usize, xx: f64| plane_wave(k, xx, &ints, jj).unwrap();
            let dpsi_dt = (psi(j + 1, x) - psi(j - 1, x)) / (2.0 * dt);
            let d2psi_dx2 = (psi(j, x + h) - 2.0 * psi(j, x) + psi(j, x - h)) / (h * h);
            let force = 0.5 * (samples[j - 1] + samples[j]);
            let residual = Complex64::i() * dpsi_dt
                + (-gamma * t).exp() / (2.0 * m) * d2psi_dx2
                + (gamma * t).exp() * force * x * psi(j, x);
            worst = worst.max(residual.norm());
        }
    }
    worst
}

#[test]
fn plane_waves_satisfy_the_equation_at_second_order() {
    let coarse = plane_wave_residual(400);
    let fine = plane_wave_residual(800);
    assert!(coarse < 1e-3, "residual {coarse}");
    let order = (coarse / fine).log2();
    assert!(
        (1.8..2.2).contains(&order),
        "residual halving order {order} (coarse {coarse}, fine {fine})"
    );
}

#[test]
fn short_time_kernel_acts_as_a_delta_sequence_with_the_right_branch() {
    // Zero force: the two-time kernel over a short interval is the free
    // kernel in the rescaled time dtau, so applying it to a plain Gaussian
    // has the closed form
    //   sqrt(w^2 / (w^2 + i dtau / m)) exp(-(x-a)^2 / (2 (w^2 + i dtau/m))).
    // The conjugate branch (exp(+i pi/4) prefactor) would instead produce
    // the complex-conjugate width; the quadrature decides between them.
    let m = 1.25;
    let gamma = 0.3;
    let (w, a) = (1.0, 0.3);
    let params = PhysicalParams::new(m, gamma * m, 0.0).unwrap();
    let grid = TimeGrid::new(0.02, 16).unwrap();
    let zero = make_custom(vec![0.0; grid.n_nodes()], &grid).unwrap();
    let ints = compute_path_integrals(&zero, &params);
    let dtau = ints.tau()[16];
    let kernel = PropagatorKernel::new(&ints, 16, 0).unwrap();

    let n = 100_001usize;
    let dx = 20.0 / (n - 1) as f64;
    let gauss: Vec<f64> = (0..n)
        .map(|j| {
            let xp = -10.0 + j as f64 * dx;
            (-(xp - a) * (xp - a) / (2.0 * w * w)).exp()
        })
        .collect();

    let width_sq = Complex64::new(w * w, dtau / m);
    let conj_width_sq = width_sq.conj();
    for &x in &[-0.5, 0.1, 0.3, 0.9, 1.4] {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &g) in gauss.iter().enumerate() {
            let xp = -10.0 + j as f64 * dx;
            acc += kernel.eval(x, xp) * g;
        }
        acc *= dx;
        let exact = (Complex64::new(w * w, 0.0) / width_sq).sqrt()
            * (-(x - a) * (x - a) / (2.0 * width_sq)).exp();
        let wrong = (Complex64::new(w * w, 0.0) / conj_width_sq).sqrt()
            * (-(x - a) * (x - a) / (2.0 * conj_width_sq)).exp();
        assert!(
            (acc - exact).norm() < 1e-8,
            "quadrature {acc} vs closed form {exact} at x = {x}"
        );
        assert!(
            (acc - wrong).norm() > 1e-3,
            "quadrature indistinguishable from the conjugate branch at x = {x}"
        );
    }
}

#[test]
fn drift_integral_matches_the_classical_trajectory_on_white_noise() {
    // Same rough path, two independent routes to the center displacement:
    // the cumulative drift quadrature and the exact-flow trajectory released
    // from rest. Both are second-order in dt, so their gap must shrink
    // fourfold per refinement of the same piecewise-constant path.
    let params = PhysicalParams::new(1.0, 1.0, 1.0).unwrap();
    let base = TimeGrid::new(2.0, 250).unwrap();
    let path = make_white_noise(&params, &base, 0x0DD5);

    let gap = |factor: usize| -> f64 {
        let fine = path.refine(factor);
        let ints = compute_path_integrals(&fine, &params);
        let traj = integrate(&fine, &params, 0.0, 0.0);
        ints.drift()
            .iter()
            .zip(traj.positions())
            .map(|(d, x)| (d - x).abs())
            .fold(0.0f64, f64::max)
    };

    let e1 = gap(1);
    let e2 = gap(2);
    let e4 = gap(4);
    assert!(e1 < 1e-4, "coarse gap {e1}");
    let o1 = (e1 / e2).log2();
    let o2 = (e2 / e4).log2();
    assert!(
        (1.8..2.2).contains(&o1) && (1.8..2.2).contains(&o2),
        "orders {o1} {o2} (gaps {e1} {e2} {e4})"
    );
}

#[test]
fn impulse_grows_like_the_windup_integral_for_slow_forces() {
    // Slowly varying force: the impulse approaches the product of the force
    // scale and the exponential window, here checked loosely as a magnitude
    // sanity bound rather than a formula.
    let params = PhysicalParams::new(1.0, 0.5, 0.0).unwrap();
    let grid = TimeGrid::new(4.0, 2000).unwrap();
    let samples: Vec<f64> = grid.nodes().iter().map(|&t| 0.2 + 0.05 * t).collect();
    let path = make_custom(samples, &grid).unwrap();
    let ints = compute_path_integrals(&path, &params);
    let total = *ints.impulse().last().unwrap();
    let window = ((0.5f64 * 4.0).exp() - 1.0) / 0.5;
    assert!(
        total > 0.2 * window && total < 0.4 * window,
        "impulse {total}"
    );
    let mut prev = -1.0;
    for &v in ints.impulse() {
        assert!(v >= prev, "positive force must wind the impulse up");
        prev = v;
    }
}

#[test]
fn plane_wave_normalization_matches_the_continuum_inner_product() {
    // Two modes integrated over a full period of their beat give the
    // delta-normalized overlap: (2 pi)^{-1} integral e^{i(k2-k1)x} dx over
    // [0, 2 pi / (k2-k1)) vanishes; equal modes integrate to L / 2 pi.
    let params = PhysicalParams::new(1.0, 0.7, 0.0).unwrap();
    let grid = TimeGrid::new(1.0, 100).unwrap();
    let samples: Vec<f64> = grid.nodes().iter().map(|&t| (2.0 * t).cos()).collect();
    let path = make_custom(samples, &grid).unwrap();
    let ints = compute_path_integrals(&path, &params);
    let (k1, k2) = (1.0, 1.5);
    let period = 2.0 * PI / (k2 - k1);
    let n = 40_000usize;
    let dx = period / n as f64;
    let mut cross = Complex64::new(0.0, 0.0);
    let mut diag = 0.0;
    for j in 0..n {
        let x = j as f64 * dx;
        let w1 = plane_wave(k1, x, &ints, 100).unwrap();
        let w2 = plane_wave(k2, x, &ints, 100).unwrap();
        cross += w1.conj() * w2;
        diag += w1.norm_sqr();
    }
    let off = (cross * dx).norm();
    let on = (diag * dx - period / (2.0 * PI)).abs();
    // 1e-11 absorbs rounding growth of the 40000-term running sums.
    assert!(off < 1e-11, "cross overlap {off:e}");
    assert!(on < 1e-11, "diagonal overlap off by {on:e}");
}
