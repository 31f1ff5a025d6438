//! Core geometry, pressure reconstruction and Table-style morphology
//! measurements of a field snapshot.
//!
//! Radial measurements use azimuthal means over annular bins of width dx
//! centered on the vortex core; a threshold crossing between two adjacent
//! bins is reported at their midpoint, so every reported radius is
//! quantized to half a cell and diameters are dx-accurate.

use crate::field::VelocityField;
use crate::grid::{Boundary, GridSpec};
use crate::initcond::winding_number;
use crate::params::Params;
use crate::thermo;
use crate::{Error, Result};

/// Which field the zone diameter and pressure columns are measured from.
///
/// The nonpotential (NP) closure ties the pressure gradient to the source
/// and sink function of the velocity; the potential (P) closure is a
/// Bernoulli depression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureMode {
    /// Zone from the Ṡ field of the velocity snapshot; pressure from the
    /// NP closure.
    NpVelocity,
    /// Zone thresholded on |∇p| of the NP closure.
    NpPressure,
    /// Zone thresholded on |∇p| of the Bernoulli closure.
    PPressure,
}

impl PressureMode {
    pub fn label(&self) -> &'static str {
        match self {
            PressureMode::NpVelocity => "NP (v*)",
            PressureMode::NpPressure => "NP (grad p*)",
            PressureMode::PPressure => "P (grad p*)",
        }
    }
}

/// Location and radial extent of the vortex core.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreGeometry {
    /// Phase-singularity location refined by a quadratic fit, in meters.
    pub center: (f64, f64),
    /// 2 × the smallest radius where the azimuthal-mean |Φ| reaches 10% of
    /// the plateau.
    pub inner_diameter_m: f64,
    /// 2 × the smallest radius where it reaches 90% of the plateau.
    pub outer_diameter_m: f64,
    /// Plateau amplitude A∞: median |Φ| over the annulus r ∈ [0.3, 0.4]·l₀.
    pub plateau_amplitude: f64,
}

/// Dimensionless pressure deviation from atmospheric and its gradient.
#[derive(Debug, Clone)]
pub struct PressureField {
    pub grid: GridSpec,
    pub p: Vec<f64>,
    pub grad_x: Vec<f64>,
    pub grad_y: Vec<f64>,
}

impl PressureField {
    /// |∇p| per cell.
    pub fn grad_magnitude(&self) -> Vec<f64> {
        self.grad_x
            .iter()
            .zip(&self.grad_y)
            .map(|(&gx, &gy)| (gx * gx + gy * gy).sqrt())
            .collect()
    }
}

/// One row set of the morphology table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorphologyReport {
    pub mode: PressureMode,
    pub zone_diameter_m: f64,
    pub inner_core_diameter_m: f64,
    pub outer_core_diameter_m: f64,
    pub pressure_ring_width_m: f64,
    /// Winding measured on a loop of radius `outer_core_diameter_m`.
    pub charge: i32,
    pub core_center: (f64, f64),
}

/// Phase singularities located by per-plaquette winding: a 2×2 cell square
/// whose wrapped phase increments sum to a nonzero multiple of 2π contains
/// a singularity. Returns plaquette centers in meters.
pub fn detect_singularities(field: &VelocityField) -> Vec<(f64, f64)> {
    let grid = field.grid;
    let n = grid.n;
    let mut max_amp2 = 0.0f64;
    for idx in 0..grid.cells() {
        max_amp2 = max_amp2.max(field.amp2(idx));
    }
    if max_amp2 == 0.0 {
        return Vec::new();
    }
    let amp_floor2 = 1e-24 * max_amp2;
    let phase = |idx: usize| field.im[idx].atan2(field.re[idx]);
    let mut out = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let corners = [
                grid.idx(i, j),
                grid.idx(i + 1, j),
                grid.idx(i + 1, j + 1),
                grid.idx(i, j + 1),
            ];
            if corners.iter().any(|&c| field.amp2(c) < amp_floor2) {
                continue;
            }
            let mut total = 0.0;
            for c in 0..4 {
                let mut d = phase(corners[(c + 1) % 4]) - phase(corners[c]);
                while d > std::f64::consts::PI {
                    d -= std::f64::consts::TAU;
                }
                while d <= -std::f64::consts::PI {
                    d += std::f64::consts::TAU;
                }
                total += d;
            }
            if total.abs() > std::f64::consts::PI {
                out.push((grid.x(i) + 0.5 * grid.dx(), grid.y(j) + 0.5 * grid.dx()));
            }
        }
    }
    // A core pinned exactly on a cell center has an undefined phase there
    // and the surrounding plaquettes are skipped; the zero cell itself marks
    // the singularity.
    for j in 0..n {
        for i in 0..n {
            if field.amp2(grid.idx(i, j)) < amp_floor2 {
                out.push((grid.x(i), grid.y(j)));
            }
        }
    }
    merge_close(out, 2.0 * grid.dx())
}

/// Greedy cluster merge: candidates within `radius` of an earlier survivor
/// collapse into it.
fn merge_close(candidates: Vec<(f64, f64)>, radius: f64) -> Vec<(f64, f64)> {
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let r2 = radius * radius;
    for c in candidates {
        if !merged
            .iter()
            .any(|m| (m.0 - c.0).powi(2) + (m.1 - c.1).powi(2) <= r2)
        {
            merged.push(c);
        }
    }
    merged
}

/// Azimuthal mean of `values` over annular bins of width dx around
/// `center`. Bin b collects cells with round(r/dx) = b; entries are `None`
/// for empty bins. Only radii whose full circle fits inside the domain are
/// returned.
fn radial_mean(grid: &GridSpec, center: (f64, f64), values: &[f64]) -> Vec<Option<f64>> {
    let dx = grid.dx();
    let r_fit = center
        .0
        .min(center.1)
        .min(grid.physical_size - center.0)
        .min(grid.physical_size - center.1)
        - dx;
    let n_bins = ((r_fit / dx).floor() as usize).max(1);
    let mut sum = vec![0.0f64; n_bins];
    let mut count = vec![0usize; n_bins];
    for j in 0..grid.n {
        for i in 0..grid.n {
            let r = ((grid.x(i) - center.0).powi(2) + (grid.y(j) - center.1).powi(2)).sqrt();
            let b = (r / dx).round() as usize;
            if b < n_bins {
                sum[b] += values[grid.idx(i, j)];
                count[b] += 1;
            }
        }
    }
    sum.iter()
        .zip(&count)
        .map(|(&s, &c)| if c > 0 { Some(s / c as f64) } else { None })
        .collect()
}

/// Smallest radius at which the profile rises to `threshold`: the midpoint
/// of the two adjacent bins straddling the crossing.
fn rising_crossing(profile: &[Option<f64>], dx: f64, threshold: f64) -> Option<f64> {
    let mut prev: Option<usize> = None;
    for (b, entry) in profile.iter().enumerate() {
        let Some(mean) = entry else { continue };
        if *mean >= threshold {
            return Some(match prev {
                Some(pb) => 0.5 * (pb + b) as f64 * dx,
                None => b as f64 * dx,
            });
        }
        prev = Some(b);
    }
    None
}

/// Smallest radius past `start_bin` at which the profile falls to
/// `threshold` (midpoint convention).
fn falling_crossing(
    profile: &[Option<f64>],
    dx: f64,
    start_bin: usize,
    threshold: f64,
) -> Option<f64> {
    let mut prev: Option<usize> = None;
    for (b, entry) in profile.iter().enumerate().skip(start_bin) {
        let Some(mean) = entry else { continue };
        if *mean <= threshold {
            return Some(match prev {
                Some(pb) => 0.5 * (pb + b) as f64 * dx,
                None => b as f64 * dx,
            });
        }
        prev = Some(b);
    }
    None
}

/// Quadratic sub-cell refinement of an amplitude minimum along one axis.
fn parabolic_offset(a_minus: f64, a_center: f64, a_plus: f64) -> f64 {
    let denom = a_minus - 2.0 * a_center + a_plus;
    if denom <= 0.0 {
        return 0.0;
    }
    (0.5 * (a_minus - a_plus) / denom).clamp(-0.5, 0.5)
}

/// Locate the vortex core and measure its inner/outer diameters.
///
/// The core center is the phase singularity (unique, else
/// [`Error::AmbiguousCore`] reporting all candidates), refined by a
/// quadratic fit of |Φ| around the minimum cell. The plateau A∞ is the
/// median |Φ| over the annulus r ∈ [0.3, 0.4]·l₀; if it is below the noise
/// floor the core radii are undefined ([`Error::NoPlateau`]).
pub fn core_geometry(field: &VelocityField, params: &Params) -> Result<CoreGeometry> {
    let grid = field.grid;
    let n = grid.n;
    let singularities = detect_singularities(field);
    if singularities.len() > 1 {
        return Err(Error::AmbiguousCore { candidates: singularities });
    }

    // Minimum-|Φ| cell: near the singularity when one exists, else global.
    let (mut i0, mut j0) = (0usize, 0usize);
    let mut best = f64::INFINITY;
    match singularities.first() {
        Some(&(sx, sy)) => {
            let ci = (sx / grid.dx() - 0.5).round() as isize;
            let cj = (sy / grid.dx() - 0.5).round() as isize;
            for dj in -1..=1isize {
                for di in -1..=1isize {
                    let i = (ci + di).clamp(0, n as isize - 1) as usize;
                    let j = (cj + dj).clamp(0, n as isize - 1) as usize;
                    let a = field.amp(grid.idx(i, j));
                    if a < best {
                        best = a;
                        i0 = i;
                        j0 = j;
                    }
                }
            }
        }
        None => {
            for j in 0..n {
                for i in 0..n {
                    let a = field.amp(grid.idx(i, j));
                    if a < best {
                        best = a;
                        i0 = i;
                        j0 = j;
                    }
                }
            }
        }
    }

    let mut center = (grid.x(i0), grid.y(j0));
    if i0 > 0 && i0 < n - 1 && j0 > 0 && j0 < n - 1 {
        let a = |i: usize, j: usize| field.amp(grid.idx(i, j));
        let ox = parabolic_offset(a(i0 - 1, j0), a(i0, j0), a(i0 + 1, j0));
        let oy = parabolic_offset(a(i0, j0 - 1), a(i0, j0), a(i0, j0 + 1));
        center.0 += ox * grid.dx();
        center.1 += oy * grid.dx();
    }

    // Plateau from the annulus r ∈ [0.3, 0.4]·l0.
    let mut annulus: Vec<f64> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let r = ((grid.x(i) - center.0).powi(2) + (grid.y(j) - center.1).powi(2)).sqrt();
            if r >= 0.3 * params.l0 && r <= 0.4 * params.l0 {
                annulus.push(field.amp(grid.idx(i, j)));
            }
        }
    }
    if annulus.is_empty() {
        return Err(Error::NoPlateau);
    }
    let plateau = median(&mut annulus);
    if plateau < 1e-12 {
        return Err(Error::NoPlateau);
    }

    let amps: Vec<f64> = (0..grid.cells()).map(|idx| field.amp(idx)).collect();
    let profile = radial_mean(&grid, center, &amps);
    let search_bins = ((0.55 * params.l0 / grid.dx()) as usize).min(profile.len());
    let profile = &profile[..search_bins.max(1)];
    let inner_r = rising_crossing(profile, grid.dx(), 0.1 * plateau).ok_or(Error::NoPlateau)?;
    let outer_r = rising_crossing(profile, grid.dx(), 0.9 * plateau).ok_or(Error::NoPlateau)?;

    Ok(CoreGeometry {
        center,
        inner_diameter_m: 2.0 * inner_r,
        outer_diameter_m: 2.0 * outer_r,
        plateau_amplitude: plateau,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Nonpotential pressure: the gradient opposes the net source force,
/// `∇p = −(q_local Φ − α₁(1 + i c₂)|Φ|²Φ)` read as a 2-vector, and p solves
/// the Poisson problem ∇²p = ∇·(∇p) with p = 0 anchored at the walls
/// (conjugate-gradient solve to relative residual < 1e-8).
pub fn pressure_np(field: &VelocityField, params: &Params) -> Result<PressureField> {
    let grid = field.grid;
    let n = grid.n;
    let mut gx = vec![0.0; grid.cells()];
    let mut gy = vec![0.0; grid.cells()];
    for j in 0..n {
        for i in 0..n {
            let idx = grid.idx(i, j);
            let q_local = params.source_coefficient(&grid, grid.x(i), grid.y(j));
            let re = field.re[idx];
            let im = field.im[idx];
            let amp2 = re * re + im * im;
            let sink = params.alpha1 * amp2;
            gx[idx] = -(q_local * re - sink * (re - params.c2 * im));
            gy[idx] = -(q_local * im - sink * (im + params.c2 * re));
        }
    }

    let div = divergence(&grid, &gx, &gy);
    let p = solve_poisson_dirichlet(&grid, &div)?;
    Ok(PressureField { grid, p, grad_x: gx, grad_y: gy })
}

/// Potential (Bernoulli) pressure `p = −|Φ|²/2`, renormalized so the median
/// over the boundary ring is zero; gradient by centered differences.
pub fn pressure_p(field: &VelocityField) -> PressureField {
    let grid = field.grid;
    let n = grid.n;
    let mut boundary_amp2: Vec<f64> = Vec::with_capacity(4 * n);
    for i in 0..n {
        boundary_amp2.push(field.amp2(grid.idx(i, 0)));
        boundary_amp2.push(field.amp2(grid.idx(i, n - 1)));
    }
    for j in 1..n - 1 {
        boundary_amp2.push(field.amp2(grid.idx(0, j)));
        boundary_amp2.push(field.amp2(grid.idx(n - 1, j)));
    }
    let offset = median(&mut boundary_amp2);
    let p: Vec<f64> = (0..grid.cells()).map(|idx| -0.5 * (field.amp2(idx) - offset)).collect();
    let (grad_x, grad_y) = gradient(&grid, &p);
    PressureField { grid, p, grad_x, grad_y }
}

/// Width of the pressure-equalization ring: the radial band beyond the
/// depression maximum where the azimuthal-mean |p| falls from 10% to 1% of
/// max |p|. When the 1% level is not reached inside the domain the band is
/// truncated at the largest sampled radius.
pub fn pressure_ring_width(pf: &PressureField, core_center: (f64, f64)) -> Result<f64> {
    let abs_p: Vec<f64> = pf.p.iter().map(|v| v.abs()).collect();
    let dp_max = abs_p.iter().cloned().fold(0.0f64, f64::max);
    if dp_max < 1e-12 {
        return Err(Error::NoDepression);
    }
    let profile = radial_mean(&pf.grid, core_center, &abs_p);
    let peak_bin = profile
        .iter()
        .enumerate()
        .filter_map(|(b, m)| m.map(|v| (b, v)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .map(|(b, _)| b)
        .unwrap_or(0);
    let dx = pf.grid.dx();
    let r10 = falling_crossing(&profile, dx, peak_bin + 1, 0.10 * dp_max)
        .ok_or(Error::NoDepression)?;
    let r01 = match falling_crossing(&profile, dx, peak_bin + 1, 0.01 * dp_max) {
        Some(r) => r,
        None => (profile.len() - 1) as f64 * dx,
    };
    Ok((r01 - r10).max(0.0))
}

/// Assemble the morphology table entries for one snapshot under the given
/// measurement mode.
pub fn morphology_report(
    field: &VelocityField,
    params: &Params,
    mode: PressureMode,
) -> Result<MorphologyReport> {
    let geometry = core_geometry(field, params)?;
    let (zone_diameter_m, pressure) = match mode {
        PressureMode::NpVelocity => {
            let ef = thermo::entropy_fields(field, params);
            let d = match thermo::zone_boundary(&ef) {
                Ok(zone) => zone.equivalent_diameter_m,
                Err(_) => 0.0,
            };
            (d, pressure_np(field, params)?)
        }
        PressureMode::NpPressure => {
            let pf = pressure_np(field, params)?;
            (gradient_zone_diameter(&pf), pf)
        }
        PressureMode::PPressure => {
            let pf = pressure_p(field);
            (gradient_zone_diameter(&pf), pf)
        }
    };
    let pressure_ring_width_m = match pressure_ring_width(&pressure, geometry.center) {
        Ok(w) => w,
        Err(Error::NoDepression) => 0.0,
        Err(e) => return Err(e),
    };
    let charge = winding_number(field, geometry.center, geometry.outer_diameter_m)?;
    Ok(MorphologyReport {
        mode,
        zone_diameter_m,
        inner_core_diameter_m: geometry.inner_diameter_m,
        outer_core_diameter_m: geometry.outer_diameter_m,
        pressure_ring_width_m,
        charge,
        core_center: geometry.center,
    })
}

/// Equivalent-circle diameter of the region where |∇p| exceeds 1% of its
/// maximum.
fn gradient_zone_diameter(pf: &PressureField) -> f64 {
    let mag = pf.grad_magnitude();
    let max = mag.iter().cloned().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return 0.0;
    }
    let cells = mag.iter().filter(|&&v| v >= 0.01 * max).count();
    let area = cells as f64 * pf.grid.dx() * pf.grid.dx();
    2.0 * (area / std::f64::consts::PI).sqrt()
}

fn divergence(grid: &GridSpec, gx: &[f64], gy: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let inv_2dx = 1.0 / (2.0 * grid.dx());
    let mut div = vec![0.0; grid.cells()];
    for j in 0..n {
        let (js, jn) = match grid.boundary {
            Boundary::NoFlux => (j.saturating_sub(1), if j + 1 < n { j + 1 } else { j }),
            Boundary::Periodic => ((j + n - 1) % n, (j + 1) % n),
        };
        for i in 0..n {
            let (iw, ie) = match grid.boundary {
                Boundary::NoFlux => (i.saturating_sub(1), if i + 1 < n { i + 1 } else { i }),
                Boundary::Periodic => ((i + n - 1) % n, (i + 1) % n),
            };
            div[grid.idx(i, j)] = (gx[grid.idx(ie, j)] - gx[grid.idx(iw, j)]) * inv_2dx
                + (gy[grid.idx(i, jn)] - gy[grid.idx(i, js)]) * inv_2dx;
        }
    }
    div
}

fn gradient(grid: &GridSpec, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n;
    let inv_2dx = 1.0 / (2.0 * grid.dx());
    let mut gx = vec![0.0; grid.cells()];
    let mut gy = vec![0.0; grid.cells()];
    for j in 0..n {
        let (js, jn) = match grid.boundary {
            Boundary::NoFlux => (j.saturating_sub(1), if j + 1 < n { j + 1 } else { j }),
            Boundary::Periodic => ((j + n - 1) % n, (j + 1) % n),
        };
        for i in 0..n {
            let (iw, ie) = match grid.boundary {
                Boundary::NoFlux => (i.saturating_sub(1), if i + 1 < n { i + 1 } else { i }),
                Boundary::Periodic => ((i + n - 1) % n, (i + 1) % n),
            };
            gx[grid.idx(i, j)] = (p[grid.idx(ie, j)] - p[grid.idx(iw, j)]) * inv_2dx;
            gy[grid.idx(i, j)] = (p[grid.idx(i, jn)] - p[grid.idx(i, js)]) * inv_2dx;
        }
    }
    (gx, gy)
}

/// Conjugate-gradient solve of ∇²p = b with p = 0 at the walls (ghost values
/// are odd reflections, placing the Dirichlet condition on the cell faces).
/// Sequential by construction so results are thread-count independent.
fn solve_poisson_dirichlet(grid: &GridSpec, b: &[f64]) -> Result<Vec<f64>> {
    let n = grid.n;
    let cells = grid.cells();
    let inv_dx2 = 1.0 / (grid.dx() * grid.dx());

    // A = -∇² with odd-reflection ghosts is symmetric positive definite.
    let apply = |p: &[f64], out: &mut [f64]| {
        for j in 0..n {
            for i in 0..n {
                let idx = j * n + i;
                let c = p[idx];
                let w = if i > 0 { p[idx - 1] } else { -c };
                let e = if i + 1 < n { p[idx + 1] } else { -c };
                let s = if j > 0 { p[idx - n] } else { -c };
                let nn = if j + 1 < n { p[idx + n] } else { -c };
                out[idx] = (4.0 * c - w - e - s - nn) * inv_dx2;
            }
        }
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let rhs: Vec<f64> = b.iter().map(|v| -v).collect();
    let rhs_norm = dot(&rhs, &rhs).sqrt();
    if rhs_norm == 0.0 {
        return Ok(vec![0.0; cells]);
    }

    let tol = 1e-10;
    let max_iters = 40 * n;
    let mut x = vec![0.0; cells];
    let mut r = rhs.clone();
    let mut dir = r.clone();
    let mut ap = vec![0.0; cells];
    let mut rs_old = dot(&r, &r);

    for iter in 0..max_iters {
        apply(&dir, &mut ap);
        let denom = dot(&dir, &ap);
        if denom <= 0.0 {
            return Err(Error::SolverFail { residual: rs_old.sqrt() / rhs_norm, iterations: iter });
        }
        let alpha = rs_old / denom;
        for idx in 0..cells {
            x[idx] += alpha * dir[idx];
            r[idx] -= alpha * ap[idx];
        }
        let rs_new = dot(&r, &r);
        if rs_new.sqrt() / rhs_norm < tol {
            return Ok(x);
        }
        let beta = rs_new / rs_old;
        for idx in 0..cells {
            dir[idx] = r[idx] + beta * dir[idx];
        }
        rs_old = rs_new;
    }
    Err(Error::SolverFail { residual: rs_old.sqrt() / rhs_norm, iterations: max_iters })
}
