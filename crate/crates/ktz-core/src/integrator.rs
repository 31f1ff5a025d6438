//! Explicit RK4 method-of-lines integration of the model equation.
//!
//! Blow-up ("regime with peaking") is a reported outcome, not an error: a
//! run whose amplitude crosses the configured cap terminates with
//! [`RunStatus::BlowUp`] carrying the blow-up time and amplitude. Non-finite
//! values never escape: a step that produces NaN/Inf is retried with a
//! halved step, and a run whose step falls below the floor (auto/64) ends
//! as [`RunStatus::Diverged`].

use crate::field::VelocityField;
use crate::grid::GridSpec;
use crate::params::Params;
use crate::rhs::RhsContext;
use crate::thermo;
use crate::{Error, Result};

/// Conservative stability step for the diffusive term:
/// `0.2 · dx² / (4 ν₁ √(1 + c₁²))`.
pub fn auto_dt(grid: &GridSpec, params: &Params) -> f64 {
    let dx = grid.dx();
    0.2 * dx * dx / (4.0 * params.nu1 * (1.0 + params.c1 * params.c1).sqrt())
}

/// Integration schedule and guards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Timestep; `None` resolves to [`auto_dt`].
    pub dt: Option<f64>,
    /// Dimensionless end time.
    pub t_end: f64,
    /// Snapshot/diagnostics cadence. Must be ≥ the resolved dt.
    pub snapshot_every: f64,
    /// Amplitude cap; `None` resolves to `10³·√(q/α₁)` when that plateau is
    /// defined, else `10³`.
    pub blowup_threshold: Option<f64>,
    /// Seed for reproducible initial noise. Carried here so a run is fully
    /// described by (initial, params, config); the integrator itself adds no
    /// randomness.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { dt: None, t_end: 10.0, snapshot_every: 1.0, blowup_threshold: None, seed: 0 }
    }
}

impl RunConfig {
    pub fn resolved_dt(&self, grid: &GridSpec, params: &Params) -> f64 {
        self.dt.unwrap_or_else(|| auto_dt(grid, params))
    }

    pub fn resolved_threshold(&self, params: &Params) -> f64 {
        self.blowup_threshold
            .unwrap_or_else(|| params.plateau_amplitude().map_or(1e3, |r| 1e3 * r))
    }

    pub fn validate(&self, grid: &GridSpec, params: &Params) -> Result<()> {
        let dt = self.resolved_dt(grid, params);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt = {dt} must be > 0")));
        }
        let max_dt = 1.5 * auto_dt(grid, params);
        if dt > max_dt {
            return Err(Error::InvalidConfig(format!(
                "dt = {dt} exceeds stability guard {max_dt}"
            )));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!("t_end = {} must be >= 0", self.t_end)));
        }
        if self.snapshot_every < dt {
            return Err(Error::InvalidConfig(format!(
                "snapshot_every = {} is below dt = {dt}",
                self.snapshot_every
            )));
        }
        let thr = self.resolved_threshold(params);
        if !(thr > 0.0) {
            return Err(Error::InvalidConfig(format!("blowup_threshold = {thr} must be > 0")));
        }
        Ok(())
    }
}

/// Terminal state of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Completed,
    /// Amplitude crossed the cap at `t_blow`.
    BlowUp { t_blow: f64, max_amp: f64 },
    /// Non-finite values persisted with the step already at its floor.
    Diverged,
}

/// One row of the scalar diagnostics series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub t: f64,
    pub max_amp: f64,
    pub zone_area_m2: f64,
    pub zone_diameter_m: f64,
    pub s_dot_total: f64,
}

/// Result of [`run`]: terminal status plus snapshots and diagnostics at the
/// configured cadence. Snapshots are strictly increasing in time.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub snapshots: Vec<VelocityField>,
    pub series: Vec<SeriesPoint>,
}

impl RunOutcome {
    /// Last recorded field.
    pub fn final_snapshot(&self) -> &VelocityField {
        self.snapshots.last().expect("run records at least the initial snapshot")
    }
}

/// RK4 stepper with preallocated stage buffers.
struct Stepper {
    ctx: RhsContext,
    k1: (Vec<f64>, Vec<f64>),
    k2: (Vec<f64>, Vec<f64>),
    k3: (Vec<f64>, Vec<f64>),
    k4: (Vec<f64>, Vec<f64>),
    tmp: (Vec<f64>, Vec<f64>),
}

impl Stepper {
    fn new(grid: &GridSpec, params: &Params) -> Self {
        let z = || (vec![0.0; grid.cells()], vec![0.0; grid.cells()]);
        Self { ctx: RhsContext::new(grid, params), k1: z(), k2: z(), k3: z(), k4: z(), tmp: z() }
    }

    /// Advance `field` by `dt` in place. Returns false when any output cell
    /// is non-finite; in that case `field` is left unchanged.
    fn advance(&mut self, field: &mut VelocityField, dt: f64) -> bool {
        let cells = field.grid.cells();
        let half = 0.5 * dt;

        self.ctx.eval_into(&field.re, &field.im, &mut self.k1.0, &mut self.k1.1);
        for i in 0..cells {
            self.tmp.0[i] = field.re[i] + half * self.k1.0[i];
            self.tmp.1[i] = field.im[i] + half * self.k1.1[i];
        }
        self.ctx.eval_into(&self.tmp.0, &self.tmp.1, &mut self.k2.0, &mut self.k2.1);
        for i in 0..cells {
            self.tmp.0[i] = field.re[i] + half * self.k2.0[i];
            self.tmp.1[i] = field.im[i] + half * self.k2.1[i];
        }
        self.ctx.eval_into(&self.tmp.0, &self.tmp.1, &mut self.k3.0, &mut self.k3.1);
        for i in 0..cells {
            self.tmp.0[i] = field.re[i] + dt * self.k3.0[i];
            self.tmp.1[i] = field.im[i] + dt * self.k3.1[i];
        }
        self.ctx.eval_into(&self.tmp.0, &self.tmp.1, &mut self.k4.0, &mut self.k4.1);

        let sixth = dt / 6.0;
        let mut finite = true;
        for i in 0..cells {
            let re = field.re[i]
                + sixth * (self.k1.0[i] + 2.0 * self.k2.0[i] + 2.0 * self.k3.0[i] + self.k4.0[i]);
            let im = field.im[i]
                + sixth * (self.k1.1[i] + 2.0 * self.k2.1[i] + 2.0 * self.k3.1[i] + self.k4.1[i]);
            finite &= re.is_finite() && im.is_finite();
            self.tmp.0[i] = re;
            self.tmp.1[i] = im;
        }
        if !finite {
            return false;
        }
        std::mem::swap(&mut field.re, &mut self.tmp.0);
        std::mem::swap(&mut field.im, &mut self.tmp.1);
        true
    }
}

/// Single RK4 step of size `dt`.
///
/// The step must satisfy `0 < dt ≤ 1.5 × auto_dt` (instability guard).
/// A non-finite result surfaces as [`Error::StepUnstable`]; `run`
/// disambiguates timestep trouble from genuine blow-up.
pub fn step(field: &VelocityField, params: &Params, dt: f64) -> Result<VelocityField> {
    params.validate(&field.grid)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidConfig(format!("dt = {dt} must be > 0")));
    }
    let max_dt = 1.5 * auto_dt(&field.grid, params);
    if dt > max_dt {
        return Err(Error::TimestepTooLarge { dt, max: max_dt });
    }
    let mut stepper = Stepper::new(&field.grid, params);
    let mut out = field.clone();
    if !stepper.advance(&mut out, dt) {
        return Err(Error::StepUnstable { t: field.time });
    }
    out.time = field.time + dt;
    Ok(out)
}

/// Integrate to `cfg.t_end`, or until the amplitude cap (→ `BlowUp`), or
/// until non-finite values persist at the minimum step (→ `Diverged`).
///
/// Snapshots and series diagnostics are recorded at t = 0, every
/// `snapshot_every`, at `t_end`, and at the terminal event of an early stop.
pub fn run(initial: VelocityField, params: &Params, cfg: &RunConfig) -> Result<RunOutcome> {
    let grid = initial.grid;
    params.validate(&grid)?;
    cfg.validate(&grid, params)?;

    let dt_nominal = cfg.resolved_dt(&grid, params);
    let dt_floor = auto_dt(&grid, params) / 64.0;
    let threshold = cfg.resolved_threshold(params);

    let mut stepper = Stepper::new(&grid, params);
    let mut field = initial;
    field.time = 0.0;

    let mut snapshots = Vec::new();
    let mut series = Vec::new();
    let record = |field: &VelocityField, snapshots: &mut Vec<VelocityField>, series: &mut Vec<SeriesPoint>| {
        series.push(diagnostics(field, params));
        snapshots.push(field.clone());
    };
    record(&field, &mut snapshots, &mut series);

    if cfg.t_end == 0.0 {
        return Ok(RunOutcome { status: RunStatus::Completed, snapshots, series });
    }

    let mut t = 0.0f64;
    let mut dt_cur = dt_nominal;
    let mut snap_k: u64 = 1;

    loop {
        let next_snap = cfg.snapshot_every * snap_k as f64;
        let target = next_snap.min(cfg.t_end);

        while t < target {
            let remaining = target - t;
            // Absorb float dust instead of taking a microscopic final step.
            let dt_step = if remaining <= dt_cur * (1.0 + 1e-12) { remaining } else { dt_cur };
            if !stepper.advance(&mut field, dt_step) {
                dt_cur *= 0.5;
                if dt_cur < dt_floor {
                    record(&field, &mut snapshots, &mut series);
                    return Ok(RunOutcome { status: RunStatus::Diverged, snapshots, series });
                }
                continue;
            }
            t = if dt_step == remaining { target } else { t + dt_step };
            field.time = t;

            let max_amp = field.max_amp();
            if max_amp >= threshold {
                record(&field, &mut snapshots, &mut series);
                let status = RunStatus::BlowUp { t_blow: t, max_amp };
                return Ok(RunOutcome { status, snapshots, series });
            }
        }

        record(&field, &mut snapshots, &mut series);
        if target >= cfg.t_end {
            return Ok(RunOutcome { status: RunStatus::Completed, snapshots, series });
        }
        snap_k += 1;
    }
}

/// Scalar diagnostics for one snapshot: max |Φ|, self-organization zone area
/// and equivalent diameter, and the domain integral of Ṡ.
fn diagnostics(field: &VelocityField, params: &Params) -> SeriesPoint {
    let ef = thermo::entropy_fields(field, params);
    let (zone_area_m2, zone_diameter_m) = match thermo::zone_boundary(&ef) {
        Ok(zone) => (zone.zone_area_m2, zone.equivalent_diameter_m),
        Err(_) => (0.0, 0.0),
    };
    let dx2 = field.grid.dx() * field.grid.dx();
    let s_dot_total: f64 = ef.s_dot.iter().sum::<f64>() * dx2;
    SeriesPoint { t: field.time, max_amp: field.max_amp(), zone_area_m2, zone_diameter_m, s_dot_total }
}
