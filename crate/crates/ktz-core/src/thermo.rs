//! Entropy diagnostics of a field snapshot.
//!
//! The σ fields are a model closure derived from the amplitude-equation
//! energy budget
//!
//! ```text
//!   d(|Φ|²/2)/dt = q|Φ|² − ν₁|∇Φ|² − α₁|Φ|⁴ + (flux divergence):
//! ```
//!
//! the dissipative terms form the entropy production
//! `σⁱ = ν₁|∇Φ|² + α₁|Φ|⁴ ≥ 0` and the source term the external entropy
//! flow `σᵉ = −q_local|Φ|²` (negative where sources act — ordering inflow).
//! `Ṡ = σᵉ + σⁱ` changes sign on the vortex-formation boundary, is negative
//! in the self-organization zone, and positive outside the basin. These are
//! not formulas with an independent reference; they are the minimal closure
//! reproducing that sign structure for the isothermal layer.
//!
//! Cells whose amplitude is below a relative measurement floor
//! (`1e-6 · √(q/α₁)`, when that plateau is defined) are treated as
//! thermodynamically quiescent and carry exactly zero σ fields; without a
//! floor a decaying mode keeps an (exponentially small) negative-Ṡ pocket
//! forever and a decayed run could never report an empty zone.

use crate::field::VelocityField;
use crate::grid::{Boundary, GridSpec};
use crate::params::Params;
use crate::{Error, Result};

/// Relative amplitude below which a cell is thermodynamically quiescent.
pub(crate) const AMPLITUDE_FLOOR_REL: f64 = 1e-6;

/// Per-cell entropy rates of one snapshot.
#[derive(Debug, Clone)]
pub struct EntropyFields {
    pub grid: GridSpec,
    /// Snapshot time.
    pub time: f64,
    /// Entropy production per unit volume, ≥ 0 by construction.
    pub sigma_i: Vec<f64>,
    /// External entropy flow; negative where sources act.
    pub sigma_e: Vec<f64>,
    /// Total rate Ṡ = σᵉ + σⁱ, cell-wise exact.
    pub s_dot: Vec<f64>,
}

/// Compute σⁱ, σᵉ and Ṡ for a snapshot. ∇Φ uses centered differences with
/// the grid's boundary mode.
pub fn entropy_fields(field: &VelocityField, params: &Params) -> EntropyFields {
    let grid = field.grid;
    let n = grid.n;
    let inv_2dx = 1.0 / (2.0 * grid.dx());
    let floor2 = params
        .plateau_amplitude()
        .map_or(0.0, |r| (AMPLITUDE_FLOOR_REL * r) * (AMPLITUDE_FLOOR_REL * r));

    let mut sigma_i = vec![0.0; grid.cells()];
    let mut sigma_e = vec![0.0; grid.cells()];
    let mut s_dot = vec![0.0; grid.cells()];

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
            let idx = grid.idx(i, j);
            let amp2 = field.amp2(idx);
            if amp2 < floor2 {
                continue;
            }
            let dre_dx = (field.re[grid.idx(ie, j)] - field.re[grid.idx(iw, j)]) * inv_2dx;
            let dim_dx = (field.im[grid.idx(ie, j)] - field.im[grid.idx(iw, j)]) * inv_2dx;
            let dre_dy = (field.re[grid.idx(i, jn)] - field.re[grid.idx(i, js)]) * inv_2dx;
            let dim_dy = (field.im[grid.idx(i, jn)] - field.im[grid.idx(i, js)]) * inv_2dx;
            let grad2 = dre_dx * dre_dx + dim_dx * dim_dx + dre_dy * dre_dy + dim_dy * dim_dy;

            let q_local = params.source_coefficient(&grid, grid.x(i), grid.y(j));
            let si = params.nu1 * grad2 + params.alpha1 * amp2 * amp2;
            let se = -q_local * amp2;
            sigma_i[idx] = si;
            sigma_e[idx] = se;
            s_dot[idx] = se + si;
        }
    }

    EntropyFields { grid, time: field.time, sigma_i, sigma_e, s_dot }
}

/// One straight segment of the Ṡ = 0 contour, in physical coordinates.
pub type Segment = [(f64, f64); 2];

/// Zero contour of Ṡ plus the area of the Ṡ < 0 zone.
#[derive(Debug, Clone)]
pub struct ZoneBoundary {
    /// Marching-squares segments of the Ṡ = 0 contour.
    pub segments: Vec<Segment>,
    /// Total area of cells with Ṡ < 0, in m².
    pub zone_area_m2: f64,
    /// Equivalent-circle diameter `2·√(area/π)`.
    pub equivalent_diameter_m: f64,
}

/// Extract the Ṡ = 0 boundary and the self-organization zone.
///
/// Classification is purely by sign, so the boundary is identical for
/// `Ṡ` and `c·Ṡ` for any c > 0. Returns [`Error::EmptyZone`] when no cell
/// has Ṡ < 0 — a valid outcome for decayed runs.
pub fn zone_boundary(ef: &EntropyFields) -> Result<ZoneBoundary> {
    let grid = ef.grid;
    let n = grid.n;
    let dx = grid.dx();

    let in_zone = |idx: usize| ef.s_dot[idx] < 0.0;
    let zone_cells = (0..grid.cells()).filter(|&idx| in_zone(idx)).count();
    if zone_cells == 0 {
        return Err(Error::EmptyZone);
    }
    let zone_area_m2 = zone_cells as f64 * dx * dx;
    let equivalent_diameter_m = 2.0 * (zone_area_m2 / std::f64::consts::PI).sqrt();

    // Marching squares on the lattice of cell centers.
    let mut segments = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let v = [
                ef.s_dot[grid.idx(i, j)],
                ef.s_dot[grid.idx(i + 1, j)],
                ef.s_dot[grid.idx(i + 1, j + 1)],
                ef.s_dot[grid.idx(i, j + 1)],
            ];
            let x0 = grid.x(i);
            let y0 = grid.y(j);
            march_square(v, x0, y0, dx, &mut segments);
        }
    }
    Ok(ZoneBoundary { segments, zone_area_m2, equivalent_diameter_m })
}

/// Zero-crossing parameter along an edge from value `a` to `b`. Only valid
/// when the corner classifications differ; ratio form keeps it invariant
/// under positive scaling of the field.
#[inline]
fn crossing(a: f64, b: f64) -> f64 {
    if a == b {
        0.5
    } else {
        (a / (a - b)).clamp(0.0, 1.0)
    }
}

/// Emit contour segments for one 2×2 square of values
/// `[v00, v10, v11, v01]` whose lower-left node is at (x0, y0).
fn march_square(v: [f64; 4], x0: f64, y0: f64, dx: f64, out: &mut Vec<Segment>) {
    let inside = [v[0] < 0.0, v[1] < 0.0, v[2] < 0.0, v[3] < 0.0];
    let case = inside[0] as usize
        | (inside[1] as usize) << 1
        | (inside[2] as usize) << 2
        | (inside[3] as usize) << 3;
    if case == 0 || case == 15 {
        return;
    }

    // Edge midpoints by linear interpolation: 0 bottom, 1 right, 2 top, 3 left.
    let pt = |edge: usize| -> (f64, f64) {
        match edge {
            0 => (x0 + dx * crossing(v[0], v[1]), y0),
            1 => (x0 + dx, y0 + dx * crossing(v[1], v[2])),
            2 => (x0 + dx * crossing(v[3], v[2]), y0 + dx),
            _ => (x0, y0 + dx * crossing(v[0], v[3])),
        }
    };
    let mut seg = |a: usize, b: usize| out.push([pt(a), pt(b)]);

    match case {
        1 => seg(3, 0),
        2 => seg(0, 1),
        3 => seg(3, 1),
        4 => seg(1, 2),
        6 => seg(0, 2),
        7 => seg(3, 2),
        8 => seg(2, 3),
        9 => seg(2, 0),
        11 => seg(2, 1),
        12 => seg(1, 3),
        13 => seg(1, 0),
        14 => seg(0, 3),
        5 | 10 => {
            // Saddle: resolve by the (scale-invariant) sign of the center mean.
            let center_inside = (v[0] + v[1] + v[2] + v[3]) * 0.25 < 0.0;
            if (case == 5) == center_inside {
                seg(3, 2);
                seg(1, 0);
            } else {
                seg(3, 0);
                seg(1, 2);
            }
        }
        _ => unreachable!(),
    }
}
