use thiserror::Error;

/// Errors shared across the crate. Each failure mode gets its own variant so
/// callers can match on the cause instead of parsing messages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CkError {
    #[error("mass must be positive (got {0})")]
    NonPositiveMass(f64),

    #[error("damping must be finite and non-negative (got {0})")]
    NegativeDamping(f64),

    #[error("noise strength must be finite and non-negative (got {0})")]
    NegativeNoiseStrength(f64),

    #[error("packet width must be positive (got {0})")]
    NonPositiveWidth(f64),

    #[error("packet center must be finite (got {0})")]
    NonFiniteCenter(f64),

    #[error("time grid needs finite t_end > 0 and at least one step (t_end = {t_end}, n_steps = {n_steps})")]
    BadTimeGrid { t_end: f64, n_steps: usize },

    #[error("spatial grid needs finite x_max > x_min and at least 8 points (x_min = {x_min}, x_max = {x_max}, n_points = {n_points})")]
    BadSpatialGrid {
        x_min: f64,
        x_max: f64,
        n_points: usize,
    },

    #[error("sample count {got} does not match the grid ({expected} nodes)")]
    SampleCountMismatch { expected: usize, got: usize },

    #[error("time index {index} out of range ({n_nodes} nodes)")]
    TimeIndexOutOfRange { index: usize, n_nodes: usize },

    #[error(
        "the propagator needs t strictly later than t' (coincident or reversed times rejected)"
    )]
    CoincidentTimes,

    #[error("the undamped limit has no finite classical spread law; damping must be positive")]
    UndampedDiffusion,

    #[error("domain holds less than {required} packet widths on each side of the initial center")]
    PacketDomainTooNarrow { required: f64 },

    #[error("norm drift {drift:e} at step {step} exceeds the allowed {allowed:e}")]
    NormDrift {
        step: usize,
        drift: f64,
        allowed: f64,
    },

    #[error("non-finite amplitude detected at step {step}")]
    NonFiniteField { step: usize },

    #[error("predicted wavenumber content {required:.1} exceeds the usable grid limit {usable:.1}; refine dx or shorten the run")]
    WavenumberOverflow { required: f64, usable: f64 },

    #[error("solver width deviates from the analytic law by {relative:e} at node {node} (path-independence guard)")]
    WidthDeviation { node: usize, relative: f64 },

    #[error("ensemble needs at least two paths (got {0})")]
    TooFewPaths(usize),

    #[error("inputs must share one time grid")]
    GridMismatch,
}
