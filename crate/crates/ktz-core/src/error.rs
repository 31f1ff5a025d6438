use thiserror::Error;

/// Errors surfaced by the solver and its diagnostics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Grid specification violates an invariant (n ≥ 16 and even, sizes > 0).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Parameter set violates an invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Run configuration violates an invariant.
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    /// A single step produced a non-finite cell. Either the timestep is too
    /// large or the run is genuinely blowing up; `run` disambiguates by
    /// shrinking the step.
    #[error("step produced a non-finite value at t = {t}")]
    StepUnstable { t: f64 },

    /// Requested timestep exceeds the stability guard (1.5 × the auto step).
    #[error("timestep {dt} exceeds stability guard {max}")]
    TimestepTooLarge { dt: f64, max: f64 },

    /// Operation requires a periodic grid.
    #[error("operation requires a periodic grid")]
    NonPeriodicGrid,

    /// Winding-number loop leaves the domain.
    #[error("loop of radius {radius} m does not fit inside the domain")]
    LoopOutsideDomain { radius: f64 },

    /// Winding-number loop passes through an amplitude zero; the caller
    /// should retry with a different radius.
    #[error("loop passes through an amplitude zero (sample {sample})")]
    SingularLoop { sample: usize },

    /// Phase increments around the loop do not sum to a clean multiple of 2π.
    #[error("winding residual {residual} exceeds 0.05; measurement unreliable")]
    WindingUnresolved { residual: f64 },

    /// No cell has Ṡ < 0. A valid outcome for decayed runs.
    #[error("no self-organization zone: Ṡ ≥ 0 everywhere")]
    EmptyZone,

    /// More than one phase singularity inside the zone; all candidate
    /// centers are reported.
    #[error("ambiguous core: {} singularity candidates", candidates.len())]
    AmbiguousCore { candidates: Vec<(f64, f64)> },

    /// Plateau amplitude is below the noise floor; core radii are undefined.
    #[error("no plateau: reference amplitude below noise floor")]
    NoPlateau,

    /// Iterative Poisson solve did not reach the residual target.
    #[error("pressure solve failed: residual {residual} after {iterations} iterations")]
    SolverFail { residual: f64, iterations: usize },

    /// Pressure field has no measurable depression.
    #[error("no pressure depression (max |p| below 1e-12)")]
    NoDepression,
}
