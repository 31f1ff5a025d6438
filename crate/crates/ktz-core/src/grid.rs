use crate::{Error, Result};

/// Lateral boundary handling for the square domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Mirrored ghost cells: zero normal derivative at the walls. The
    /// default; avoids spurious momentum injection at the domain edge.
    NoFlux,
    /// Wrap-around. Exists for validation oracles (Fourier modes, plane
    /// waves), not for tornado-basin runs.
    Periodic,
}

/// Discretization of the square domain: `n × n` cells of spacing
/// `dx = physical_size / n`, cell centers at `(i + ½)·dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Cells per side. Must be ≥ 16 and even (raster and Fourier test paths
    /// rely on both).
    pub n: usize,
    /// Domain side length in meters.
    pub physical_size: f64,
    pub boundary: Boundary,
}

impl GridSpec {
    pub fn new(n: usize, physical_size: f64, boundary: Boundary) -> Result<Self> {
        let grid = Self { n, physical_size, boundary };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 16 {
            return Err(Error::InvalidGrid(format!("n = {} < 16", self.n)));
        }
        if self.n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n = {} is odd", self.n)));
        }
        if !(self.physical_size > 0.0) || !self.physical_size.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "physical_size = {} must be positive and finite",
                self.physical_size
            )));
        }
        Ok(())
    }

    /// Derived cell spacing in meters.
    #[inline]
    pub fn dx(&self) -> f64 {
        self.physical_size / self.n as f64
    }

    /// Number of cells.
    #[inline]
    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    /// Row-major cell index.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// Physical x-coordinate of the cell center in column `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    /// Physical y-coordinate of the cell center in row `j`.
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx()
    }

    /// Domain center.
    #[inline]
    pub fn center(&self) -> (f64, f64) {
        (0.5 * self.physical_size, 0.5 * self.physical_size)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_odd_or_degenerate() {
        assert!(GridSpec::new(8, 1.0, Boundary::NoFlux).is_err());
        assert!(GridSpec::new(17, 1.0, Boundary::NoFlux).is_err());
        assert!(GridSpec::new(16, 0.0, Boundary::NoFlux).is_err());
        assert!(GridSpec::new(16, f64::NAN, Boundary::NoFlux).is_err());
        assert!(GridSpec::new(16, 1.0, Boundary::Periodic).is_ok());
    }

    #[test]
    fn spacing_is_derived() {
        let g = GridSpec::new(64, 1000.0, Boundary::NoFlux).unwrap();
        assert_eq!(g.dx(), 1000.0 / 64.0);
        assert_eq!(g.cells(), 4096);
    }
}
