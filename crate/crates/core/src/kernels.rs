//! Closed-form machinery: rescaled time, cumulative force integrals, plane
//! waves, the two-time propagator and the evolved Gaussian packet.
//!
//! With damping rate gamma, the substitution tau(t) = (1 - exp(-gamma t)) / gamma
//! maps the damped free equation onto an undamped one driven by a rescaled
//! force. All quadratures nevertheless run in laboratory time t: tau saturates
//! at 1/gamma, so a tau-grid would crowd every late-time feature into a
//! vanishing interval and meet the rescaled force's exp(2 gamma t) growth
//! head-on. On the t grid the integrands stay bounded by exp(gamma t).
//!
//! Force paths are piecewise-constant (left node value). The cumulative
//! integrals treat them that way exactly and apply the trapezoid rule only to
//! the smooth exponential weights, which keeps the composite error at
//! O(dt^2) even for rough noise paths.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::CkError;
use crate::noise::NoisePath;
use crate::types::{GaussianPacket, PhysicalParams, SpatialGrid, TimeGrid, WaveField};

/// Rescaled time tau = (1 - exp(-gamma t)) / gamma, the effective spreading
/// time of the damped packet; tau -> t as gamma -> 0 and tau -> 1/gamma as
/// t -> infinity. Evaluated through expm1 so small gamma t never cancels.
pub fn tau_of_t(gamma: f64, t: f64) -> f64 {
    if gamma == 0.0 {
        t
    } else {
        -(-gamma * t).exp_m1() / gamma
    }
}

/// Cumulative integrals of one force path, sampled at every time node.
///
/// - `tau`: rescaled time (closed form, not quadrature),
/// - `impulse`: integral of exp(gamma t') F(t'), the canonical momentum
///   absorbed from the force up to t,
/// - `drift`: (1/m) integral of impulse(t') exp(-gamma t'), the displacement
///   of a classical particle released at rest under the same force,
/// - `phase`: (1/2m) integral of impulse(t')^2 exp(-gamma t'), the action
///   phase shared by every mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PathIntegrals {
    grid: TimeGrid,
    gamma: f64,
    mass: f64,
    tau: Vec<f64>,
    impulse: Vec<f64>,
    drift: Vec<f64>,
    phase: Vec<f64>,
    /// exp(-gamma t_j), kept for re-basing the integrals at a later origin.
    weight: Vec<f64>,
}

/// Runs the three cumulative quadratures over a path.
///
/// The force is constant on each interval, so only the exponential weights
/// are averaged between the endpoints; `drift` and `phase` integrate the
/// continuous, piecewise-smooth `impulse` with the plain trapezoid rule.
pub fn compute_path_integrals(path: &NoisePath, params: &PhysicalParams) -> PathIntegrals {
    let grid = path.grid();
    let n = grid.n_nodes();
    let dt = grid.dt();
    let gamma = params.damping_rate();
    let mass = params.mass();
    let f = path.samples();

    let weight: Vec<f64> = (0..n).map(|j| (-gamma * grid.node(j)).exp()).collect();

    let mut tau = vec![0.0; n];
    let mut impulse = vec![0.0; n];
    let mut drift = vec![0.0; n];
    let mut phase = vec![0.0; n];

    for j in 0..n - 1 {
        tau[j + 1] = tau_of_t(gamma, grid.node(j + 1));
        // exp(+gamma t) = 1 / weight; recompute instead of dividing to keep
        // full accuracy for large gamma t.
        let wp0 = (gamma * grid.node(j)).exp();
        let wp1 = (gamma * grid.node(j + 1)).exp();
        impulse[j + 1] = impulse[j] + f[j] * 0.5 * dt * (wp0 + wp1);
        drift[j + 1] =
            drift[j] + 0.5 * dt * (impulse[j] * weight[j] + impulse[j + 1] * weight[j + 1]) / mass;
        phase[j + 1] = phase[j]
            + 0.5
                * dt
                * (impulse[j] * impulse[j] * weight[j]
                    + impulse[j + 1] * impulse[j + 1] * weight[j + 1])
                / (2.0 * mass);
    }

    PathIntegrals {
        grid,
        gamma,
        mass,
        tau,
        impulse,
        drift,
        phase,
        weight,
    }
}

impl PathIntegrals {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn impulse(&self) -> &[f64] {
        &self.impulse
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    fn check_index(&self, index: usize) -> Result<(), CkError> {
        if index >= self.grid.n_nodes() {
            Err(CkError::TimeIndexOutOfRange {
                index,
                n_nodes: self.grid.n_nodes(),
            })
        } else {
            Ok(())
        }
    }
}

/// Plane-wave mode labelled by its t = 0 wavenumber k, evaluated at node
/// `t_index`:
///
///   (2 pi)^(-1/2) exp(i (k + impulse) x - i (k^2 tau / 2m + k drift + phase)).
///
/// The force shifts every mode by the same impulse and the modulus stays
/// (2 pi)^(-1/2) forever.
pub fn plane_wave(
    k: f64,
    x: f64,
    integrals: &PathIntegrals,
    t_index: usize,
) -> Result<Complex64, CkError> {
    integrals.check_index(t_index)?;
    let tau = integrals.tau[t_index];
    let p = k + integrals.impulse[t_index];
    let alpha = k * k * tau / (2.0 * integrals.mass)
        + k * integrals.drift[t_index]
        + integrals.phase[t_index];
    Ok(Complex64::from_polar(
        1.0 / (2.0 * PI).sqrt(),
        p * x - alpha,
    ))
}

/// Two-time propagator G(x, t | x', t'), assembled once per time pair:
///
///   sqrt(m / (2 pi dtau)) exp(-i pi/4)
///     * exp{ i [ m (x - x' - drift')^2 / (2 dtau) + impulse' x - phase' ] }
///
/// where dtau = tau(t) - tau(t') and the primed integrals are re-based at t':
/// the impulse is measured relative to t' and the drift/phase quadratures are
/// re-accumulated over [t', t] with that shifted impulse. Re-basing this way
/// reproduces exactly the composition of the one-sided kernels, so
/// G(t|t') G(t'|0) integrates to G(t|0).
///
/// The square root of 1/i is fixed to exp(-i pi/4); the short-time
/// delta-sequence test in the suite pins that branch.
#[derive(Debug, Clone, Copy)]
pub struct PropagatorKernel {
    prefactor: Complex64,
    half_m_over_dtau: f64,
    impulse: f64,
    drift: f64,
    phase: f64,
    dtau: f64,
}

impl PropagatorKernel {
    pub fn new(
        integrals: &PathIntegrals,
        t_index: usize,
        t_prime_index: usize,
    ) -> Result<Self, CkError> {
        integrals.check_index(t_index)?;
        integrals.check_index(t_prime_index)?;
        if t_index <= t_prime_index {
            // tau is strictly increasing, so equal indices mean dtau = 0 and
            // the kernel degenerates to a delta distribution.
            return Err(CkError::CoincidentTimes);
        }

        let a = t_index;
        let b = t_prime_index;
        let dt = integrals.grid.dt();
        let m = integrals.mass;
        let dtau = integrals.tau[a] - integrals.tau[b];

        let i_base = integrals.impulse[b];
        let mut drift = 0.0;
        let mut phase = 0.0;
        for j in b..a {
            let i0 = integrals.impulse[j] - i_base;
            let i1 = integrals.impulse[j + 1] - i_base;
            drift += 0.5 * dt * (i0 * integrals.weight[j] + i1 * integrals.weight[j + 1]) / m;
            phase += 0.5 * dt * (i0 * i0 * integrals.weight[j] + i1 * i1 * integrals.weight[j + 1])
                / (2.0 * m);
        }

        let amplitude = (m / (2.0 * PI * dtau)).sqrt();
        Ok(Self {
            prefactor: Complex64::from_polar(amplitude, -PI / 4.0),
            half_m_over_dtau: 0.5 * m / dtau,
            impulse: integrals.impulse[a] - i_base,
            drift,
            phase,
            dtau,
        })
    }

    /// Interval of rescaled time the kernel spans.
    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn eval(&self, x: f64, x_prime: f64) -> Complex64 {
        let sep = x - x_prime - self.drift;
        self.prefactor
            * Complex64::cis(self.half_m_over_dtau * sep * sep + self.impulse * x - self.phase)
    }
}

/// One point of the two-time propagator; build a [`PropagatorKernel`] instead
/// when evaluating many (x, x') pairs for the same time pair.
pub fn propagator(
    x: f64,
    t_index: usize,
    x_prime: f64,
    t_prime_index: usize,
    integrals: &PathIntegrals,
) -> Result<Complex64, CkError> {
    Ok(PropagatorKernel::new(integrals, t_index, t_prime_index)?.eval(x, x_prime))
}

/// The evolved Gaussian packet at node `t_index`, sampled on `xgrid`:
///
///   (2 pi)^(-1/4) (sigma + i tau / (2 m sigma))^(-1/2)
///     * exp{ -m (x - x0 - drift)^2 / (4 m sigma^2 + 2 i tau)
///            + i (impulse x - phase) }
///
/// A packet released at x0 is the translate of the x0 = 0 solution: the
/// equation is covariant under translations up to a spatially uniform phase,
/// which is exactly absorbed by keeping the impulse term proportional to x
/// while only the envelope is shifted. The packet stays Gaussian for every
/// path; the force moves only its center.
pub fn evolve_gaussian(
    packet: &GaussianPacket,
    integrals: &PathIntegrals,
    t_index: usize,
    xgrid: &SpatialGrid,
) -> Result<WaveField, CkError> {
    integrals.check_index(t_index)?;
    let m = integrals.mass;
    let s = packet.width();
    let tau = integrals.tau[t_index];
    let impulse = integrals.impulse[t_index];
    let center = packet.center() + integrals.drift[t_index];
    let phase = integrals.phase[t_index];

    let amp = (2.0 * PI).powf(-0.25) / Complex64::new(s, tau / (2.0 * m * s)).sqrt();
    // Complex inverse variance; its real part equals 1 / (2 sigma(t))^2, which
    // is what makes the density test below close.
    let coeff = Complex64::new(4.0 * m * s * s, 2.0 * tau).finv() * m;

    let values = xgrid
        .nodes()
        .iter()
        .map(|&x| {
            let z = x - center;
            amp * (Complex64::new(0.0, impulse * x - phase) - coeff * z * z).exp()
        })
        .collect();
    WaveField::new(*xgrid, integrals.grid.node(t_index), values)
}

/// Analytic packet width sqrt(sigma0^2 + tau^2 / (4 m^2 sigma0^2)). Depends
/// on the force path not at all; with damping it saturates because tau does.
pub fn gaussian_width(sigma0: f64, mass: f64, tau: f64) -> f64 {
    sigma0.hypot(tau / (2.0 * mass * sigma0))
}

/// Root-mean-square displacement of the classical damped particle under
/// white noise of strength D, sqrt((D / eta^2) (t - tau(t))): ballistic at
/// short times, diffusive sqrt(D t) / eta once gamma t >> 1. The undamped
/// limit is rejected; without damping the spread follows no such law.
pub fn classical_uncertainty_analytic(params: &PhysicalParams, t: f64) -> Result<f64, CkError> {
    if params.damping() <= 0.0 {
        return Err(CkError::UndampedDiffusion);
    }
    let bracket = (t - tau_of_t(params.damping_rate(), t)).max(0.0);
    Ok((params.noise_strength() * bracket).sqrt() / params.damping())
}
