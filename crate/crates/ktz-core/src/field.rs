use crate::grid::GridSpec;

/// Snapshot of the complex horizontal velocity `Φ = ϑx + i ϑy` on the grid.
///
/// Real and imaginary parts are stored as separate row-major planes so the
/// stencil kernel stays vectorizable; interleaving only happens in the
/// external snapshot format.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub grid: GridSpec,
    /// ϑx plane, `grid.n²` entries, row-major.
    pub re: Vec<f64>,
    /// ϑy plane, `grid.n²` entries, row-major.
    pub im: Vec<f64>,
    /// Dimensionless simulation time.
    pub time: f64,
}

impl VelocityField {
    /// Zero field at t = 0.
    pub fn zeros(grid: GridSpec) -> Self {
        let cells = grid.cells();
        Self { grid, re: vec![0.0; cells], im: vec![0.0; cells], time: 0.0 }
    }

    /// Spatially uniform field at t = 0.
    pub fn uniform(grid: GridSpec, re: f64, im: f64) -> Self {
        let cells = grid.cells();
        Self { grid, re: vec![re; cells], im: vec![im; cells], time: 0.0 }
    }

    /// |Φ|² at a cell index.
    #[inline]
    pub fn amp2(&self, idx: usize) -> f64 {
        self.re[idx] * self.re[idx] + self.im[idx] * self.im[idx]
    }

    /// |Φ| at a cell index.
    #[inline]
    pub fn amp(&self, idx: usize) -> f64 {
        self.amp2(idx).sqrt()
    }

    /// Maximum |Φ| over the grid (sequential scan; deterministic).
    pub fn max_amp(&self) -> f64 {
        let mut max2 = 0.0f64;
        for idx in 0..self.grid.cells() {
            let a2 = self.amp2(idx);
            if a2 > max2 {
                max2 = a2;
            }
        }
        max2.sqrt()
    }

    /// True when every entry of both planes is finite.
    pub fn is_finite(&self) -> bool {
        self.re.iter().all(|v| v.is_finite()) && self.im.iter().all(|v| v.is_finite())
    }

    /// Bilinear interpolation of (re, im) at a physical point. Points beyond
    /// the outermost cell centers clamp to the edge value.
    pub fn sample(&self, x: f64, y: f64) -> (f64, f64) {
        let n = self.grid.n;
        let dx = self.grid.dx();
        let u = (x / dx - 0.5).clamp(0.0, (n - 1) as f64);
        let v = (y / dx - 0.5).clamp(0.0, (n - 1) as f64);
        let i0 = (u.floor() as usize).min(n - 2);
        let j0 = (v.floor() as usize).min(n - 2);
        let fu = u - i0 as f64;
        let fv = v - j0 as f64;
        let idx = |i: usize, j: usize| self.grid.idx(i, j);
        let lerp2 = |plane: &[f64]| -> f64 {
            let a = plane[idx(i0, j0)] * (1.0 - fu) + plane[idx(i0 + 1, j0)] * fu;
            let b = plane[idx(i0, j0 + 1)] * (1.0 - fu) + plane[idx(i0 + 1, j0 + 1)] * fu;
            a * (1.0 - fv) + b * fv
        };
        (lerp2(&self.re), lerp2(&self.im))
    }
}
