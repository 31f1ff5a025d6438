//! Numerical core for a layered tornado model built on the two-dimensional
//! Kuramoto–Tsuzuki (complex Ginzburg–Landau) equation
//!
//! ```text
//!   ∂Φ/∂t = ν₁(1 + i c₁) ∇²Φ + q Φ − α₁(1 + i c₂) |Φ|² Φ,
//! ```
//!
//! where `Φ = ϑx + i ϑy` is the complex horizontal velocity of a thin
//! atmospheric layer. The crate provides:
//!
//! * [`rhs`]/[`step`]/[`run`] — a deterministic, row-parallel RK4
//!   method-of-lines integrator with blow-up ("regime with peaking")
//!   detection,
//! * [`make_spiral`]/[`measure_charge`] — spiral initial conditions with a
//!   prescribed topological charge and winding-number measurement,
//! * [`entropy_fields`]/[`zone_boundary`] — per-cell entropy production σⁱ,
//!   external entropy flow σᵉ and total rate Ṡ, with marching-squares
//!   extraction of the Ṡ = 0 self-organization boundary,
//! * [`core_geometry`]/[`pressure_np`]/[`pressure_p`] — vortex core and
//!   pressure morphology measurements,
//! * [`stability_criterion`]/[`classify`] — analytic regime classification,
//! * [`run_stack`] — the layered (independent-layer) column model.
//!
//! All simulation entry points are bit-deterministic for a fixed seed,
//! independent of the rayon worker count: the stencil kernel parallelizes
//! over grid rows with a fixed per-cell summation order and no reductions.

mod error;
mod field;
mod grid;
mod initcond;
mod integrator;
mod morphology;
mod params;
mod regime;
mod rhs;
mod stack;
mod thermo;

pub use error::Error;
pub use field::VelocityField;
pub use grid::{Boundary, GridSpec};
pub use initcond::{make_plane_wave, make_spiral, measure_charge, winding_number, SpiralSpec};
pub use integrator::{auto_dt, run, step, RunConfig, RunOutcome, RunStatus, SeriesPoint};
pub use morphology::{
    core_geometry, detect_singularities, morphology_report, pressure_np, pressure_p,
    pressure_ring_width, CoreGeometry, MorphologyReport, PressureField, PressureMode,
};
pub use params::{BasinProfile, Params};
pub use regime::{classify, stability_criterion, velocity_bound, ChargeClass, Prediction, RegimeReport};
pub use rhs::{laplacian, rhs};
pub use stack::{run_stack, ColumnReport, LayerProfile, LayerRun, StackOutcome};
pub use thermo::{entropy_fields, zone_boundary, EntropyFields, ZoneBoundary};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
