use crate::grid::GridSpec;
use crate::{Error, Result};

/// Spatial profile of the linear source rate q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasinProfile {
    /// q everywhere.
    Uniform,
    /// Supercritical (+q) inside the basin of diameter `l0`, subcritical
    /// (−|q|) outside, with a smooth tanh crossover of width 4·dx centered
    /// at r = l0/2. The minimal mechanism producing a bounded
    /// self-organization zone.
    Disk,
}

/// Dimensionless coefficients of the model equation plus the basin scale.
///
/// The dispersion ratios are stored directly: `c1 = ν₂/ν₁` and
/// `c2 = α₂/α₁`; ν₂ and α₂ are never stored separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Linear diffusion coefficient ν₁ (> 0).
    pub nu1: f64,
    /// Linear dispersion ratio c₁.
    pub c1: f64,
    /// Linear source rate q.
    pub q: f64,
    /// Cubic sink coefficient α₁ (≥ 0; zero is permitted for linear
    /// validation runs).
    pub alpha1: f64,
    /// Nonlinear dispersion ratio c₂.
    pub c2: f64,
    /// Basin diameter in meters.
    pub l0: f64,
    pub basin_profile: BasinProfile,
}

impl Params {
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if !(self.nu1 > 0.0) || !self.nu1.is_finite() {
            return Err(Error::InvalidParams(format!("nu1 = {} must be > 0", self.nu1)));
        }
        if !(self.alpha1 >= 0.0) || !self.alpha1.is_finite() {
            return Err(Error::InvalidParams(format!("alpha1 = {} must be >= 0", self.alpha1)));
        }
        if !(self.l0 > 0.0) || !self.l0.is_finite() {
            return Err(Error::InvalidParams(format!("l0 = {} must be > 0", self.l0)));
        }
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("q", self.q)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        if self.basin_profile == BasinProfile::Disk && self.l0 > grid.physical_size {
            return Err(Error::InvalidParams(format!(
                "disk basin l0 = {} exceeds domain size {}",
                self.l0, grid.physical_size
            )));
        }
        Ok(())
    }

    /// Homogeneous plateau amplitude √(q/α₁), defined for q > 0, α₁ > 0.
    pub fn plateau_amplitude(&self) -> Option<f64> {
        if self.q > 0.0 && self.alpha1 > 0.0 {
            Some((self.q / self.alpha1).sqrt())
        } else {
            None
        }
    }

    /// Local source rate at a physical point.
    ///
    /// Uniform → q. Disk → +q inside r = l0/2 and −|q| outside, joined by a
    /// tanh crossover whose length scale is 4·dx. The crossover is exactly
    /// zero at r = l0/2 (for q > 0).
    pub fn source_coefficient(&self, grid: &GridSpec, x: f64, y: f64) -> f64 {
        match self.basin_profile {
            BasinProfile::Uniform => self.q,
            BasinProfile::Disk => {
                let (cx, cy) = grid.center();
                let r = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
                let w = 4.0 * grid.dx();
                let s = 0.5 * (1.0 + ((0.5 * self.l0 - r) / w).tanh());
                -self.q.abs() + (self.q + self.q.abs()) * s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;
    use approx::assert_abs_diff_eq;

    fn grid() -> GridSpec {
        GridSpec::new(128, 1000.0, Boundary::NoFlux).unwrap()
    }

    fn params(profile: BasinProfile) -> Params {
        Params {
            nu1: 1.0,
            c1: 0.0,
            q: 1.0,
            alpha1: 1.0,
            c2: 0.0,
            l0: 500.0,
            basin_profile: profile,
        }
    }

    #[test]
    fn uniform_profile_is_flat() {
        let g = grid();
        let p = params(BasinProfile::Uniform);
        assert_eq!(p.source_coefficient(&g, 12.0, 987.0), 1.0);
        assert_eq!(p.source_coefficient(&g, 500.0, 500.0), 1.0);
    }

    #[test]
    fn disk_profile_deep_interior_and_midpoint() {
        let g = grid();
        let p = params(BasinProfile::Disk);
        let (cx, cy) = g.center();
        // Deep interior: within 1e-6 of q for l0 >> dx.
        assert_abs_diff_eq!(p.source_coefficient(&g, cx, cy), 1.0, epsilon = 1e-6);
        // Crossover midpoint r = l0/2 is exactly the tanh zero.
        assert_abs_diff_eq!(p.source_coefficient(&g, cx + 250.0, cy), 0.0, epsilon = 1e-12);
        // Far exterior approaches -|q|.
        assert_abs_diff_eq!(p.source_coefficient(&g, cx + 480.0, cy), -1.0, epsilon = 1e-6);
    }

    #[test]
    fn disk_profile_negative_q_is_uniformly_subcritical() {
        let g = grid();
        let mut p = params(BasinProfile::Disk);
        p.q = -0.5;
        let (cx, cy) = g.center();
        assert_abs_diff_eq!(p.source_coefficient(&g, cx, cy), -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.source_coefficient(&g, cx + 400.0, cy), -0.5, epsilon = 1e-12);
    }

    #[test]
    fn disk_basin_must_fit() {
        let g = grid();
        let mut p = params(BasinProfile::Disk);
        p.l0 = 1500.0;
        assert!(p.validate(&g).is_err());
        p.l0 = 1000.0;
        assert!(p.validate(&g).is_ok());
    }

    #[test]
    fn alpha_zero_is_permitted() {
        let g = grid();
        let mut p = params(BasinProfile::Uniform);
        p.alpha1 = 0.0;
        assert!(p.validate(&g).is_ok());
        assert_eq!(p.plateau_amplitude(), None);
    }
}
