//! Classical damped trajectories under the same force paths the quantum
//! solver consumes. Used to cross-check the packet center and to measure the
//! diffusive spread of an ensemble.

use crate::error::CkError;
use crate::noise::NoisePath;
use crate::stats::{reduce_pairwise, SeriesStats};
use crate::types::{PhysicalParams, TimeGrid};

/// Position and velocity sampled at every node of the time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    x: Vec<f64>,
    v: Vec<f64>,
}

impl Trajectory {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn positions(&self) -> &[f64] {
        &self.x
    }

    pub fn velocities(&self) -> &[f64] {
        &self.v
    }
}

/// (1 - exp(-z)) / z, the decay-averaged weight of the interval; 1 at z = 0.
fn g1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// (z - 1 + exp(-z)) / z^2, the position response to a constant force over
/// one interval; 1/2 at z = 0. The direct form loses all significant digits
/// as z -> 0, so small arguments switch to the alternating series.
fn g2(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        0.5 + z * (-1.0 / 6.0 + z * (1.0 / 24.0 + z * (-1.0 / 120.0 + z / 720.0)))
    } else {
        (z - 1.0 + (-z).exp()) / (z * z)
    }
}

/// Integrates m dv/dt = -eta v + F(t), dx/dt = v over the path's grid.
///
/// The force is constant on each interval, and the update is the exact flow
/// of the damped linear equation for such a force:
///
///   v_{j+1} = exp(-z) v_j + (F_j dt / m) g1(z)
///   x_{j+1} = x_j + v_j dt g1(z) + (F_j dt^2 / m) g2(z),   z = gamma dt.
///
/// No step-size stability bound exists; errors come only from how the path
/// itself was sampled.
pub fn integrate(path: &NoisePath, params: &PhysicalParams, x0: f64, v0: f64) -> Trajectory {
    let grid = path.grid();
    let dt = grid.dt();
    let z = params.damping_rate() * dt;
    let decay = (-z).exp();
    let w1 = dt * g1(z);
    let w2 = dt * dt * g2(z) / params.mass();
    let kick = dt * g1(z) / params.mass();

    let n = grid.n_nodes();
    let mut x = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    x.push(x0);
    v.push(v0);
    for &force in &path.samples()[..n - 1] {
        let (xj, vj) = (*x.last().unwrap(), *v.last().unwrap());
        x.push(xj + vj * w1 + force * w2);
        v.push(decay * vj + force * kick);
    }

    Trajectory { grid, x, v }
}

/// Per-node unbiased sample variance of the positions of an ensemble of
/// trajectories started from the same (x0, v0). All paths must share one
/// grid and there must be at least two of them.
pub fn ensemble_center_variance(
    paths: &[NoisePath],
    params: &PhysicalParams,
    x0: f64,
    v0: f64,
) -> Result<Vec<f64>, CkError> {
    if paths.len() < 2 {
        return Err(CkError::TooFewPaths(paths.len()));
    }
    let grid = paths[0].grid();
    if paths.iter().any(|p| p.grid() != grid) {
        return Err(CkError::GridMismatch);
    }
    let leaves = paths
        .iter()
        .map(|p| SeriesStats::leaf(integrate(p, params, x0, v0).positions()))
        .collect();
    Ok(reduce_pairwise(leaves)
        .expect("at least two leaves")
        .sample_variance())
}
