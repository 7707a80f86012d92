//! Shared value types: physical parameters, grids, packets, sampled fields.

use num_complex::Complex64;

use crate::error::CkError;
use crate::kernels;

/// Mass, linear damping constant and white-noise strength of the particle.
///
/// The damping rate gamma = damping / mass is derived on demand; the two
/// stored quantities stay the single source of truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    mass: f64,
    damping: f64,
    noise_strength: f64,
}

impl PhysicalParams {
    /// `noise_strength` is the delta-correlation weight of the white force,
    /// in units of force^2 * time.
    pub fn new(mass: f64, damping: f64, noise_strength: f64) -> Result<Self, CkError> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(CkError::NonPositiveMass(mass));
        }
        if !damping.is_finite() || damping < 0.0 {
            return Err(CkError::NegativeDamping(damping));
        }
        if !noise_strength.is_finite() || noise_strength < 0.0 {
            return Err(CkError::NegativeNoiseStrength(noise_strength));
        }
        Ok(Self {
            mass,
            damping,
            noise_strength,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn noise_strength(&self) -> f64 {
        self.noise_strength
    }

    /// Damping rate gamma = damping / mass, dimension 1/time.
    pub fn damping_rate(&self) -> f64 {
        self.damping / self.mass
    }
}

/// Uniform grid on [0, t_end] with `n_steps` intervals, so `n_steps + 1`
/// nodes at t_j = j * dt. The step size is always derived from the stored
/// pair, never stored itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self, CkError> {
        if !t_end.is_finite() || t_end <= 0.0 || n_steps == 0 {
            return Err(CkError::BadTimeGrid { t_end, n_steps });
        }
        Ok(Self { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// Node j at exactly j * dt; bit-stable across calls.
    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dt()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|j| self.node(j)).collect()
    }

    /// Index of the node nearest to `t`, clamped to the grid.
    pub fn nearest_node(&self, t: f64) -> usize {
        let j = (t / self.dt()).round();
        if j <= 0.0 {
            0
        } else {
            (j as usize).min(self.n_steps)
        }
    }
}

/// Periodic spatial grid on [x_min, x_max): node k at x_min + k * dx, the
/// right endpoint being the wrap-around image of the left one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self, CkError> {
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min || n_points < 8 {
            return Err(CkError::BadSpatialGrid {
                x_min,
                x_max,
                n_points,
            });
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.width() / self.n_points as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.node(k)).collect()
    }
}

/// Initial Gaussian wave packet, (2 pi sigma^2)^(-1/4) exp(-(x - x0)^2 / (4 sigma^2)):
/// unit norm, position spread `width`, zero mean momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    width: f64,
    center: f64,
}

impl GaussianPacket {
    pub fn new(width: f64, center: f64) -> Result<Self, CkError> {
        if !width.is_finite() || width <= 0.0 {
            return Err(CkError::NonPositiveWidth(width));
        }
        if !center.is_finite() {
            return Err(CkError::NonFiniteCenter(center));
        }
        Ok(Self { width, center })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center(&self) -> f64 {
        self.center
    }
}

/// Complex field sampled on a spatial grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: SpatialGrid,
    time: f64,
    values: Vec<Complex64>,
}

impl WaveField {
    pub fn new(grid: SpatialGrid, time: f64, values: Vec<Complex64>) -> Result<Self, CkError> {
        if values.len() != grid.n_points() {
            return Err(CkError::SampleCountMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        Ok(Self { grid, time, values })
    }

    pub fn grid(&self) -> SpatialGrid {
        self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Discrete L2 norm, sqrt(sum |psi|^2 dx).
    pub fn norm(&self) -> f64 {
        let dx = self.grid.dx();
        self.values
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .mul_add(dx, 0.0)
            .sqrt()
    }
}

/// Soft diagnostics produced by [`validate`]; hard errors surface as
/// [`CkError`] from the constructors instead.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Cross-checks one run configuration.
///
/// The constructors already reject malformed individual values; this pass
/// looks at their combination. Currently it estimates the late-time packet
/// excursion (saturated quantum width plus five classical spreads at t_end)
/// and warns when that exceeds a quarter of the periodic domain, the point
/// where wrap-around contamination starts to matter.
pub fn validate(
    params: &PhysicalParams,
    packet: &GaussianPacket,
    tgrid: &TimeGrid,
    xgrid: Option<&SpatialGrid>,
) -> Result<ValidationReport, CkError> {
    let mut report = ValidationReport::default();

    let Some(xgrid) = xgrid else {
        return Ok(report);
    };

    let gamma = params.damping_rate();
    let t_end = tgrid.t_end();
    // Saturated width for damped motion; width at t_end in the undamped limit.
    let tau_late = if gamma > 0.0 {
        1.0 / gamma
    } else {
        kernels::tau_of_t(gamma, t_end)
    };
    let width_late = kernels::gaussian_width(packet.width(), params.mass(), tau_late);
    // No closed-form classical spread without damping; fall back to the width
    // alone in that case.
    let classical = if params.damping() > 0.0 {
        kernels::classical_uncertainty_analytic(params, t_end)?
    } else {
        0.0
    };

    let excursion = width_late + 5.0 * classical;
    let quarter = xgrid.width() / 4.0;
    if excursion > quarter {
        report.warnings.push(format!(
            "expected packet excursion {excursion:.3} exceeds a quarter of the domain width ({quarter:.3}); widen the domain or shorten the run"
        ));
    }

    Ok(report)
}
