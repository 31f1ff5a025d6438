//! Right-hand side of the model equation and the 5-point Laplacian.
//!
//! The kernel is parallel over grid rows. Each output row is written by
//! exactly one worker from read-only input planes and every cell uses a
//! fixed summation order, so results are bit-identical for any worker
//! count.

use rayon::prelude::*;

use crate::field::VelocityField;
use crate::grid::{Boundary, GridSpec};
use crate::params::Params;

/// Per-run evaluation context: the cached source map and coefficient copies.
/// Building it once per run keeps the tanh basin profile out of the hot loop.
pub(crate) struct RhsContext {
    q_map: Vec<f64>,
    nu1: f64,
    c1: f64,
    alpha1: f64,
    c2: f64,
    inv_dx2: f64,
    boundary: Boundary,
    n: usize,
}

impl RhsContext {
    pub(crate) fn new(grid: &GridSpec, params: &Params) -> Self {
        let n = grid.n;
        let mut q_map = vec![0.0; grid.cells()];
        for j in 0..n {
            for i in 0..n {
                q_map[grid.idx(i, j)] = params.source_coefficient(grid, grid.x(i), grid.y(j));
            }
        }
        Self {
            q_map,
            nu1: params.nu1,
            c1: params.c1,
            alpha1: params.alpha1,
            c2: params.c2,
            inv_dx2: 1.0 / (grid.dx() * grid.dx()),
            boundary: grid.boundary,
            n,
        }
    }

    /// Evaluate dΦ/dt into the provided planes.
    pub(crate) fn eval_into(
        &self,
        re: &[f64],
        im: &[f64],
        out_re: &mut [f64],
        out_im: &mut [f64],
    ) {
        let n = self.n;
        out_re
            .par_chunks_mut(n)
            .zip(out_im.par_chunks_mut(n))
            .enumerate()
            .for_each(|(j, (row_re, row_im))| {
                self.eval_row(j, re, im, row_re, row_im);
            });
    }

    fn eval_row(&self, j: usize, re: &[f64], im: &[f64], row_re: &mut [f64], row_im: &mut [f64]) {
        let n = self.n;
        let (js, jn) = neighbor_rows(j, n, self.boundary);
        let rc = &re[j * n..j * n + n];
        let ic = &im[j * n..j * n + n];
        let rs = &re[js * n..js * n + n];
        let is = &im[js * n..js * n + n];
        let rn = &re[jn * n..jn * n + n];
        let inn = &im[jn * n..jn * n + n];
        let q = &self.q_map[j * n..j * n + n];

        for i in 0..n {
            let (iw, ie) = neighbor_cols(i, n, self.boundary);
            let cr = rc[i];
            let ci = ic[i];
            let lap_re = (rc[iw] + rc[ie] + rs[i] + rn[i] - 4.0 * cr) * self.inv_dx2;
            let lap_im = (ic[iw] + ic[ie] + is[i] + inn[i] - 4.0 * ci) * self.inv_dx2;
            let amp2 = cr * cr + ci * ci;
            let sink = self.alpha1 * amp2;
            row_re[i] = self.nu1 * (lap_re - self.c1 * lap_im) + q[i] * cr - sink * (cr - self.c2 * ci);
            row_im[i] = self.nu1 * (lap_im + self.c1 * lap_re) + q[i] * ci - sink * (ci + self.c2 * cr);
        }
    }
}

#[inline]
fn neighbor_rows(j: usize, n: usize, boundary: Boundary) -> (usize, usize) {
    match boundary {
        Boundary::NoFlux => (j.saturating_sub(1), if j + 1 < n { j + 1 } else { j }),
        Boundary::Periodic => ((j + n - 1) % n, (j + 1) % n),
    }
}

#[inline]
fn neighbor_cols(i: usize, n: usize, boundary: Boundary) -> (usize, usize) {
    match boundary {
        Boundary::NoFlux => (i.saturating_sub(1), if i + 1 < n { i + 1 } else { i }),
        Boundary::Periodic => ((i + n - 1) % n, (i + 1) % n),
    }
}

/// dΦ/dt per cell: ν₁(1+ic₁)∇²Φ + q_local·Φ − α₁(1+ic₂)|Φ|²Φ.
///
/// Returns (re, im) planes of the derivative. `step`/`run` reuse an internal
/// context instead of calling this per stage.
pub fn rhs(field: &VelocityField, params: &Params) -> (Vec<f64>, Vec<f64>) {
    let ctx = RhsContext::new(&field.grid, params);
    let mut out_re = vec![0.0; field.grid.cells()];
    let mut out_im = vec![0.0; field.grid.cells()];
    ctx.eval_into(&field.re, &field.im, &mut out_re, &mut out_im);
    (out_re, out_im)
}

/// 5-point Laplacian of both planes under the grid's boundary mode.
pub fn laplacian(field: &VelocityField) -> (Vec<f64>, Vec<f64>) {
    let n = field.grid.n;
    let inv_dx2 = 1.0 / (field.grid.dx() * field.grid.dx());
    let boundary = field.grid.boundary;
    let mut out_re = vec![0.0; field.grid.cells()];
    let mut out_im = vec![0.0; field.grid.cells()];
    for j in 0..n {
        let (js, jn) = neighbor_rows(j, n, boundary);
        for i in 0..n {
            let (iw, ie) = neighbor_cols(i, n, boundary);
            let idx = j * n + i;
            out_re[idx] = (field.re[j * n + iw]
                + field.re[j * n + ie]
                + field.re[js * n + i]
                + field.re[jn * n + i]
                - 4.0 * field.re[idx])
                * inv_dx2;
            out_im[idx] = (field.im[j * n + iw]
                + field.im[j * n + ie]
                + field.im[js * n + i]
                + field.im[jn * n + i]
                - 4.0 * field.im[idx])
                * inv_dx2;
        }
    }
    (out_re, out_im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Boundary, GridSpec};
    use crate::params::BasinProfile;
    use approx::assert_abs_diff_eq;

    fn params() -> Params {
        Params {
            nu1: 1.0,
            c1: 0.5,
            q: 1.0,
            alpha1: 1.0,
            c2: 0.0,
            l0: 0.5,
            basin_profile: BasinProfile::Uniform,
        }
    }

    #[test]
    fn zero_field_is_fixed_point() {
        for boundary in [Boundary::NoFlux, Boundary::Periodic] {
            let grid = GridSpec::new(32, 1.0, boundary).unwrap();
            let field = VelocityField::zeros(grid);
            let (dre, dim) = rhs(&field, &params());
            assert!(dre.iter().all(|&v| v == 0.0));
            assert!(dim.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        for boundary in [Boundary::NoFlux, Boundary::Periodic] {
            let grid = GridSpec::new(24, 3.0, boundary).unwrap();
            let field = VelocityField::uniform(grid, 1.75, -0.3);
            let (lre, lim) = laplacian(&field);
            assert!(lre.iter().all(|&v| v == 0.0), "boundary {boundary:?}");
            assert!(lim.iter().all(|&v| v == 0.0), "boundary {boundary:?}");
        }
    }

    #[test]
    fn homogeneous_plateau_real_equation_is_steady() {
        let grid = GridSpec::new(32, 1.0, Boundary::Periodic).unwrap();
        let p = params(); // c2 = 0, plateau R = sqrt(q/alpha1) = 1
        let field = VelocityField::uniform(grid, 1.0, 0.0);
        let (dre, dim) = rhs(&field, &p);
        for idx in 0..grid.cells() {
            assert_abs_diff_eq!(dre[idx], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(dim[idx], 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn homogeneous_plateau_rotates_at_c2_q() {
        // Substituting Φ = R e^{-iωt} with R² = q/α₁ gives ω = c₂ q: the
        // derivative at t = 0 is exactly -i c₂ q R.
        let grid = GridSpec::new(32, 1.0, Boundary::Periodic).unwrap();
        let mut p = params();
        p.c2 = 0.7;
        p.q = 2.0;
        p.alpha1 = 0.5;
        let r = p.plateau_amplitude().unwrap();
        let field = VelocityField::uniform(grid, r, 0.0);
        let (dre, dim) = rhs(&field, &p);
        for idx in 0..grid.cells() {
            assert_abs_diff_eq!(dre[idx], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(dim[idx], -p.c2 * p.q * r, epsilon = 1e-12);
        }
    }

    #[test]
    fn laplacian_sin_mode_second_order() {
        // Φ(x, y) = sin(2πx/L): discrete Laplacian approaches -(2π/L)²Φ with
        // O(dx²) error; halving dx shrinks the max error by ~4.
        let err_for = |n: usize| -> f64 {
            let grid = GridSpec::new(n, 1.0, Boundary::Periodic).unwrap();
            let k = 2.0 * std::f64::consts::PI / grid.physical_size;
            let mut field = VelocityField::zeros(grid);
            for j in 0..n {
                for i in 0..n {
                    field.re[grid.idx(i, j)] = (k * grid.x(i)).sin();
                }
            }
            let (lre, _) = laplacian(&field);
            let mut max_err = 0.0f64;
            for idx in 0..grid.cells() {
                let expect = -k * k * field.re[idx];
                max_err = max_err.max((lre[idx] - expect).abs());
            }
            max_err
        };
        let ratio = err_for(32) / err_for(64);
        assert!((3.2..=4.8).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn disk_basin_uses_local_source() {
        let grid = GridSpec::new(64, 1000.0, Boundary::NoFlux).unwrap();
        let mut p = params();
        p.l0 = 500.0;
        p.basin_profile = BasinProfile::Disk;
        p.alpha1 = 0.0;
        // Uniform Φ: Laplacian vanishes, so dΦ/dt = q_local Φ cell-wise.
        let field = VelocityField::uniform(grid, 2.0, 0.0);
        let (dre, _) = rhs(&field, &p);
        let center = grid.idx(32, 32);
        let corner = grid.idx(1, 1);
        assert!(dre[center] > 1.9, "supercritical interior, got {}", dre[center]);
        assert!(dre[corner] < -1.9, "subcritical exterior, got {}", dre[corner]);
    }
}
