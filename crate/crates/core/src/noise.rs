//! Driving-force paths: white noise, constant pulls, caller-supplied samples.
//!
//! A path stores one force sample per time node and is read as
//! piecewise-constant on each interval, taking the left node's value. That
//! convention makes the discrete white noise exact for the classical
//! integrator and leaves no ambiguity in the quadratures downstream; the
//! sample at the final node is carried along but drives no interval.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::CkError;
use crate::types::{PhysicalParams, TimeGrid};

/// How a path was produced. White noise keeps its strength and seed so a run
/// can be reproduced from its manifest alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Zero,
    Constant { value: f64 },
    White { strength: f64, seed: u64 },
    Custom,
}

/// Force samples on the nodes of a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    grid: TimeGrid,
    samples: Vec<f64>,
    kind: NoiseKind,
}

impl NoisePath {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    /// The same piecewise-constant force on a grid `factor` times finer:
    /// every interval value is repeated, the final node sample is kept.
    /// Refining changes no physics, only the resolution seen by integrators,
    /// which is what step-halving convergence measurements need.
    pub fn refine(&self, factor: usize) -> NoisePath {
        assert!(factor >= 1, "refinement factor must be at least 1");
        if factor == 1 {
            return self.clone();
        }
        let n = self.grid.n_steps();
        let grid = TimeGrid::new(self.grid.t_end(), n * factor)
            .expect("refining a valid grid stays valid");
        let mut samples = Vec::with_capacity(grid.n_nodes());
        for j in 0..n {
            samples.extend(std::iter::repeat(self.samples[j]).take(factor));
        }
        samples.push(self.samples[n]);
        let kind = match self.kind {
            NoiseKind::Zero => NoiseKind::Zero,
            NoiseKind::Constant { value } => NoiseKind::Constant { value },
            // Refined white noise is no longer i.i.d. at the new step size.
            NoiseKind::White { .. } | NoiseKind::Custom => NoiseKind::Custom,
        };
        NoisePath {
            grid,
            samples,
            kind,
        }
    }
}

/// Discrete white noise: i.i.d. N(0, D / dt) node samples.
///
/// The 1/dt variance scaling is what makes the piecewise-constant path
/// converge to delta-correlated forcing: the interval impulse F_j dt has
/// variance D dt, independent of the step size.
pub fn make_white_noise(params: &PhysicalParams, grid: &TimeGrid, seed: u64) -> NoisePath {
    let sigma = (params.noise_strength() / grid.dt()).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..grid.n_nodes())
        .map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
        .collect();
    NoisePath {
        grid: *grid,
        samples,
        kind: NoiseKind::White {
            strength: params.noise_strength(),
            seed,
        },
    }
}

/// Constant force f0 at every node; f0 = 0 degrades to the zero path.
pub fn make_constant_force(f0: f64, grid: &TimeGrid) -> NoisePath {
    let kind = if f0 == 0.0 {
        NoiseKind::Zero
    } else {
        NoiseKind::Constant { value: f0 }
    };
    NoisePath {
        grid: *grid,
        samples: vec![f0; grid.n_nodes()],
        kind,
    }
}

/// Caller-supplied samples, one per node.
pub fn make_custom(samples: Vec<f64>, grid: &TimeGrid) -> Result<NoisePath, CkError> {
    if samples.len() != grid.n_nodes() {
        return Err(CkError::SampleCountMismatch {
            expected: grid.n_nodes(),
            got: samples.len(),
        });
    }
    Ok(NoisePath {
        grid: *grid,
        samples,
        kind: NoiseKind::Custom,
    })
}

/// SplitMix64 finalizer: a full-avalanche 64-bit mix.
pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state;
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed for ensemble path `path_index`: the SplitMix64 stream member at that
/// index. Neighbouring indices map to statistically independent generator
/// seeds, and the mapping depends on nothing but (base_seed, path_index), so
/// any worker may draw any path.
pub fn path_seed(base_seed: u64, path_index: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(path_index.wrapping_add(1))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: f64) -> PhysicalParams {
        PhysicalParams::new(1.0, 1.0, d).unwrap()
    }

    #[test]
    fn zero_strength_noise_is_exactly_zero() {
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let path = make_white_noise(&params(0.0), &grid, 42);
        assert!(path.samples().iter().all(|&f| f == 0.0));
    }

    #[test]
    fn same_seed_reproduces_the_path_bit_for_bit() {
        let grid = TimeGrid::new(2.0, 256).unwrap();
        let a = make_white_noise(&params(0.7), &grid, 9001);
        let b = make_white_noise(&params(0.7), &grid, 9001);
        assert_eq!(a, b);
        let c = make_white_noise(&params(0.7), &grid, 9002);
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn white_noise_sample_variance_matches_d_over_dt() {
        // D = 1, dt = 0.01: per-sample variance 100. The unbiased sample
        // variance of n draws concentrates within a few sqrt(2/n) relative.
        let grid = TimeGrid::new(1000.0, 100_000).unwrap();
        let path = make_white_noise(&params(1.0), &grid, 1234);
        let n = path.samples().len();
        let mean = path.samples().iter().sum::<f64>() / n as f64;
        let var = path
            .samples()
            .iter()
            .map(|f| (f - mean) * (f - mean))
            .sum::<f64>()
            / (n - 1) as f64;
        let expected = 100.0;
        let tol = 5.0 * (2.0f64 / n as f64).sqrt();
        assert!(
            (var / expected - 1.0).abs() < tol,
            "sample variance {var} strays from {expected} by more than {tol:.4} relative"
        );
    }

    #[test]
    fn pooled_mean_is_consistent_with_zero() {
        // 20 paths of 50001 samples pooled: the standard error of the mean is
        // sigma / sqrt(n_total); stay within five of those.
        let grid = TimeGrid::new(500.0, 50_000).unwrap();
        let p = params(1.0);
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..20u64 {
            let path = make_white_noise(&p, &grid, path_seed(77, i));
            sum += path.samples().iter().sum::<f64>();
            count += path.samples().len();
        }
        let sigma = (1.0f64 / grid.dt()).sqrt();
        let bound = 5.0 * sigma / (count as f64).sqrt();
        let mean = sum / count as f64;
        assert!(
            mean.abs() < bound,
            "pooled mean {mean} exceeds the {bound} consistency bound"
        );
    }

    #[test]
    fn distinct_seeds_are_uncorrelated_at_lag_zero() {
        let grid = TimeGrid::new(100.0, 20_000).unwrap();
        let p = params(1.0);
        let a = make_white_noise(&p, &grid, path_seed(5, 0));
        let b = make_white_noise(&p, &grid, path_seed(5, 1));
        let n = a.samples().len() as f64;
        let dot: f64 = a
            .samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| x * y)
            .sum();
        let var = 1.0 / grid.dt();
        let r = dot / (n * var);
        assert!(
            r.abs() < 5.0 / n.sqrt(),
            "cross-correlation {r} is inconsistent with independence"
        );
    }

    #[test]
    fn constant_force_holds_its_value_and_zero_collapses_kind() {
        let grid = TimeGrid::new(1.0, 32).unwrap();
        let path = make_constant_force(2.5, &grid);
        assert_eq!(path.kind(), NoiseKind::Constant { value: 2.5 });
        assert!(path.samples().iter().all(|&f| f == 2.5));
        assert_eq!(make_constant_force(0.0, &grid).kind(), NoiseKind::Zero);
    }

    #[test]
    fn custom_path_length_must_match_grid() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let err = make_custom(vec![0.0; 10], &grid).unwrap_err();
        assert_eq!(
            err,
            CkError::SampleCountMismatch {
                expected: 11,
                got: 10
            }
        );
        assert!(make_custom(vec![0.0; 11], &grid).is_ok());
    }

    #[test]
    fn refine_repeats_interval_values() {
        let grid = TimeGrid::new(1.0, 2).unwrap();
        let path = make_custom(vec![1.0, 2.0, 3.0], &grid).unwrap();
        let fine = path.refine(3);
        assert_eq!(fine.grid().n_steps(), 6);
        assert_eq!(fine.samples(), &[1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 3.0]);
        assert_eq!(fine.kind(), NoiseKind::Custom);
        // Zero and constant paths keep their kind.
        assert_eq!(
            make_constant_force(0.0, &grid).refine(2).kind(),
            NoiseKind::Zero
        );
    }

    #[test]
    fn path_seed_spreads_neighbouring_indices() {
        let s0 = path_seed(0, 0);
        let s1 = path_seed(0, 1);
        assert_ne!(s0, s1);
        // A weak avalanche would leave most bits equal.
        assert!((s0 ^ s1).count_ones() >= 16);
        assert_ne!(path_seed(1, 0), path_seed(2, 0));
    }
}
