//! White-noise ensembles: many force realizations, one packet each, reduced
//! to the mean and spread of the packet centers plus the path-independent
//! quantum width.
//!
//! Each path starts with its own initial velocity drawn from the stationary
//! thermal distribution, variance D / (2 m eta). A particle released with
//! exactly zero velocity equilibrates only after a damping time, and its
//! displacement variance stays measurably below the diffusion law at any
//! finite time; thermal starts make the ensemble follow that law from t = 0,
//! which is the regime the toolkit verifies. The quantum width needs no
//! ensemble at all: it is the same for every path.

use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::CkError;
use crate::kernels::{
    classical_uncertainty_analytic, compute_path_integrals, gaussian_width, tau_of_t,
};
use crate::noise::{make_white_noise, path_seed, splitmix64};
use crate::solver::{Solver, SolverConfig};
use crate::stats::{reduce_pairwise, SeriesStats};
use crate::types::{GaussianPacket, PhysicalParams, TimeGrid};

/// How each path's packet center is obtained.
#[derive(Debug, Clone)]
pub enum Engine {
    /// Closed-form center from the cumulative path integrals.
    Analytic,
    /// Full spectral propagation per path; slower, and cross-checks the
    /// closed form. The config's time grid must match the ensemble's.
    Solver(SolverConfig),
}

/// Relative tolerance for the per-path solver width against the analytic
/// width law. The width is path-independent, so any excess deviation means
/// the grid is too coarse for the force realization, not statistics.
pub const WIDTH_REL_TOL: f64 = 1e-8;

/// Salt mixed into each path seed to decorrelate the initial-velocity draw
/// from the noise samples ("v0_salt" in ASCII).
const V0_SALT: u64 = 0x0076_305f_7361_6c74;

/// Ensemble moments at every time node.
#[derive(Debug, Clone)]
pub struct EnsembleReport {
    times: Vec<f64>,
    n_paths: usize,
    base_seed: u64,
    center_mean: Vec<f64>,
    center_var: Vec<f64>,
    width_qu: Vec<f64>,
    dx_cl_analytic: Vec<f64>,
    dx_total: Vec<f64>,
}

impl EnsembleReport {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn center_mean(&self) -> &[f64] {
        &self.center_mean
    }

    /// Unbiased sample variance of the centers across paths.
    pub fn center_var(&self) -> &[f64] {
        &self.center_var
    }

    /// Analytic quantum width, identical for every path.
    pub fn width_qu(&self) -> &[f64] {
        &self.width_qu
    }

    /// Reference root-mean-square displacement of the classical thermal
    /// ensemble; all zeros when D = 0.
    pub fn dx_cl_analytic(&self) -> &[f64] {
        &self.dx_cl_analytic
    }

    /// Total spread: quantum width and sampled center scatter in quadrature.
    pub fn dx_total(&self) -> &[f64] {
        &self.dx_total
    }
}

/// The two contributions to the spread at one node, separately and combined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub dx_qu: f64,
    pub dx_cl_sample: f64,
    pub dx_cl_analytic: f64,
    pub dx_total: f64,
}

pub fn decompose_uncertainty(
    report: &EnsembleReport,
    node: usize,
) -> Result<Decomposition, CkError> {
    if node >= report.times.len() {
        return Err(CkError::TimeIndexOutOfRange {
            index: node,
            n_nodes: report.times.len(),
        });
    }
    Ok(Decomposition {
        dx_qu: report.width_qu[node],
        dx_cl_sample: report.center_var[node].sqrt(),
        dx_cl_analytic: report.dx_cl_analytic[node],
        dx_total: report.dx_total[node],
    })
}

fn draw_initial_velocity(seed: u64, sigma_v: f64) -> f64 {
    if sigma_v == 0.0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ V0_SALT));
    sigma_v * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
}

/// Runs `n_paths` independent realizations and reduces their centers.
///
/// Path i is fully determined by `path_seed(base_seed, i)`: the same seed
/// produces the same report bit for bit, for any rayon thread count, because
/// the per-path series are reduced in a fixed tree order after collection.
pub fn run_ensemble(
    params: &PhysicalParams,
    packet: &GaussianPacket,
    tgrid: &TimeGrid,
    n_paths: usize,
    base_seed: u64,
    engine: &Engine,
) -> Result<EnsembleReport, CkError> {
    if n_paths < 2 {
        return Err(CkError::TooFewPaths(n_paths));
    }
    if params.noise_strength() > 0.0 && params.damping() == 0.0 {
        return Err(CkError::UndampedDiffusion);
    }
    if let Engine::Solver(config) = engine {
        if config.tgrid != *tgrid {
            return Err(CkError::GridMismatch);
        }
    }

    let gamma = params.damping_rate();
    let times = tgrid.nodes();
    let tau: Vec<f64> = times.iter().map(|&t| tau_of_t(gamma, t)).collect();
    let width_qu: Vec<f64> = tau
        .iter()
        .map(|&tau| gaussian_width(packet.width(), params.mass(), tau))
        .collect();
    let sigma_v = if params.noise_strength() == 0.0 {
        0.0
    } else {
        (params.noise_strength() / (2.0 * params.mass() * params.damping())).sqrt()
    };

    let centers: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>, CkError> {
            let seed = path_seed(base_seed, i as u64);
            let path = make_white_noise(params, tgrid, seed);
            let v0 = draw_initial_velocity(seed, sigma_v);
            match engine {
                Engine::Analytic => {
                    let ints = compute_path_integrals(&path, params);
                    Ok(tau
                        .iter()
                        .zip(ints.drift())
                        .map(|(&tau_j, &drift_j)| packet.center() + v0 * tau_j + drift_j)
                        .collect())
                }
                Engine::Solver(config) => {
                    let mut solver = Solver::new(config.clone());
                    let run = solver.run(packet, &path, params)?;
                    for (j, obs) in run.observables.iter().enumerate() {
                        let relative = (obs.width() / width_qu[j] - 1.0).abs();
                        if relative > WIDTH_REL_TOL {
                            return Err(CkError::WidthDeviation { node: j, relative });
                        }
                    }
                    // The initial velocity adds the exact homogeneous
                    // solution v0 tau to the center; the field itself never
                    // needs to be re-propagated.
                    Ok(run
                        .observables
                        .iter()
                        .zip(&tau)
                        .map(|(obs, &tau_j)| obs.mean_x + v0 * tau_j)
                        .collect())
                }
            }
        })
        .collect::<Result<_, _>>()?;

    let stats = reduce_pairwise(centers.iter().map(|c| SeriesStats::leaf(c)).collect())
        .expect("n_paths >= 2");
    let center_mean = stats.mean().to_vec();
    let center_var = stats.sample_variance();

    let dx_cl_analytic: Vec<f64> = if params.noise_strength() == 0.0 {
        vec![0.0; times.len()]
    } else {
        times
            .iter()
            .map(|&t| classical_uncertainty_analytic(params, t).expect("damping checked above"))
            .collect()
    };
    let dx_total: Vec<f64> = width_qu
        .iter()
        .zip(&center_var)
        .map(|(&w, &v)| w.hypot(v.sqrt()))
        .collect();

    Ok(EnsembleReport {
        times,
        n_paths,
        base_seed,
        center_mean,
        center_var,
        width_qu,
        dx_cl_analytic,
        dx_total,
    })
}
