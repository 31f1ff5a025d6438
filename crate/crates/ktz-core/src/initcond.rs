//! Initial fields: spirals with a prescribed topological charge,
//! humidity-modulated amplitude, plane waves and seeded noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::VelocityField;
use crate::grid::{Boundary, GridSpec};
use crate::params::Params;
use crate::{Error, Result};

/// Number of loop samples used by the winding measurement.
const LOOP_SAMPLES: usize = 256;

/// Maximum acceptable distance of the summed phase increments from an
/// integer multiple of 2π, in turns. Distinguishes genuine integer winding
/// from discretization noise.
const WINDING_RESIDUAL_MAX: f64 = 0.05;

/// Specification of a seeded spiral field.
///
/// The radial profile is `humidity · amplitude · tanh(r / core_width)` with
/// phase `m·θ`; humidity enters as a multiplicative amplitude factor, so a
/// drier layer seeds a weaker vortex. On top of the spiral every cell gets
/// a noise term of fixed magnitude `noise_eps · amplitude` and uniformly
/// random phase from the seeded generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralSpec {
    /// Topological charge (signed). m = −1 is left twisting, m = +1 right.
    pub m: i32,
    /// Target plateau amplitude.
    pub amplitude: f64,
    /// Core width in meters.
    pub core_width: f64,
    /// Humidity factor in [0, 1].
    pub humidity: f64,
    /// Relative noise amplitude (≥ 0).
    pub noise_eps: f64,
    /// Noise seed.
    pub seed: u64,
}

impl SpiralSpec {
    /// Defaults tied to a parameter set: amplitude √(q/α₁) (1.0 when that
    /// plateau is undefined) and core width 4·dx.
    pub fn for_params(m: i32, grid: &GridSpec, params: &Params) -> Self {
        Self {
            m,
            amplitude: params.plateau_amplitude().unwrap_or(1.0),
            core_width: 4.0 * grid.dx(),
            humidity: 1.0,
            noise_eps: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0) || !self.amplitude.is_finite() {
            return Err(Error::InvalidParams(format!(
                "spiral amplitude = {} must be >= 0",
                self.amplitude
            )));
        }
        if !(self.core_width > 0.0) || !self.core_width.is_finite() {
            return Err(Error::InvalidParams(format!(
                "spiral core_width = {} must be > 0",
                self.core_width
            )));
        }
        if !(0.0..=1.0).contains(&self.humidity) {
            return Err(Error::InvalidParams(format!(
                "humidity = {} must lie in [0, 1]",
                self.humidity
            )));
        }
        if !(self.noise_eps >= 0.0) || !self.noise_eps.is_finite() {
            return Err(Error::InvalidParams(format!(
                "noise_eps = {} must be >= 0",
                self.noise_eps
            )));
        }
        Ok(())
    }
}

/// Cell center nearest the domain center. On an even grid the exact center
/// falls on a cell corner; anchoring the phase singularity on a sample
/// point keeps the core amplitude pinned at zero there.
pub(crate) fn spiral_center(grid: &GridSpec) -> (f64, f64) {
    let i = grid.n / 2;
    (grid.x(i), grid.y(i))
}

/// Build a spiral field with winding `spec.m` around the domain center.
pub fn make_spiral(grid: &GridSpec, spec: &SpiralSpec) -> Result<VelocityField> {
    grid.validate()?;
    spec.validate()?;
    let (cx, cy) = spiral_center(grid);
    let mut field = VelocityField::zeros(*grid);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise_amp = spec.noise_eps * spec.amplitude;
    let base = spec.humidity * spec.amplitude;
    for j in 0..grid.n {
        for i in 0..grid.n {
            let x = grid.x(i) - cx;
            let y = grid.y(j) - cy;
            let r = (x * x + y * y).sqrt();
            let theta = y.atan2(x);
            let a = base * (r / spec.core_width).tanh();
            let phase = spec.m as f64 * theta;
            let idx = grid.idx(i, j);
            field.re[idx] = a * phase.cos();
            field.im[idx] = a * phase.sin();
            if noise_amp > 0.0 {
                let noise_phase = rng.gen::<f64>() * std::f64::consts::TAU;
                field.re[idx] += noise_amp * noise_phase.cos();
                field.im[idx] += noise_amp * noise_phase.sin();
            }
        }
    }
    Ok(field)
}

/// Single Fourier mode `Φ = amplitude · e^{i 2π (k₁x + k₂y)/L}` on a
/// periodic grid. Validation oracle for the linear and stability tests.
pub fn make_plane_wave(grid: &GridSpec, k_index: (i32, i32), amplitude: f64) -> Result<VelocityField> {
    grid.validate()?;
    if grid.boundary != Boundary::Periodic {
        return Err(Error::NonPeriodicGrid);
    }
    let mut field = VelocityField::zeros(*grid);
    let w = std::f64::consts::TAU / grid.physical_size;
    for j in 0..grid.n {
        for i in 0..grid.n {
            let phase = w * (k_index.0 as f64 * grid.x(i) + k_index.1 as f64 * grid.y(j));
            let idx = grid.idx(i, j);
            field.re[idx] = amplitude * phase.cos();
            field.im[idx] = amplitude * phase.sin();
        }
    }
    Ok(field)
}

/// Winding number of the phase around a circle of `radius` centered at
/// `center`, from the sum of principal-branch phase increments over
/// 256 loop samples (bilinear interpolation).
pub fn winding_number(field: &VelocityField, center: (f64, f64), radius: f64) -> Result<i32> {
    let grid = &field.grid;
    let dx = grid.dx();
    let margin = 0.5 * dx;
    let fits = |c: f64| c - radius >= margin && c + radius <= grid.physical_size - margin;
    if !(radius > 0.0) || !fits(center.0) || !fits(center.1) {
        return Err(Error::LoopOutsideDomain { radius });
    }

    let mut phases = [0.0f64; LOOP_SAMPLES];
    let mut max_amp2 = 0.0f64;
    let mut amp2s = [0.0f64; LOOP_SAMPLES];
    for (s, item) in phases.iter_mut().enumerate() {
        let angle = std::f64::consts::TAU * s as f64 / LOOP_SAMPLES as f64;
        let x = center.0 + radius * angle.cos();
        let y = center.1 + radius * angle.sin();
        let (re, im) = field.sample(x, y);
        amp2s[s] = re * re + im * im;
        max_amp2 = max_amp2.max(amp2s[s]);
        *item = im.atan2(re);
    }
    if max_amp2 == 0.0 {
        return Err(Error::SingularLoop { sample: 0 });
    }
    if let Some(s) = amp2s.iter().position(|&a2| a2 < 1e-24 * max_amp2) {
        return Err(Error::SingularLoop { sample: s });
    }

    let mut total = 0.0f64;
    for s in 0..LOOP_SAMPLES {
        let next = phases[(s + 1) % LOOP_SAMPLES];
        let mut d = next - phases[s];
        // Principal branch: wrap into (-π, π].
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d <= -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    let residual = (turns - rounded).abs();
    if residual >= WINDING_RESIDUAL_MAX {
        return Err(Error::WindingUnresolved { residual });
    }
    Ok(rounded as i32)
}

/// Winding number around the domain center.
pub fn measure_charge(field: &VelocityField, loop_radius: f64) -> Result<i32> {
    winding_number(field, spiral_center(&field.grid), loop_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BasinProfile;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn grid() -> GridSpec {
        GridSpec::new(128, 1000.0, Boundary::NoFlux).unwrap()
    }

    fn spec(m: i32) -> SpiralSpec {
        SpiralSpec { m, amplitude: 1.0, core_width: 31.25, humidity: 1.0, noise_eps: 0.0, seed: 7 }
    }

    #[test]
    fn zero_charge_spiral_is_real_and_unwound() {
        let g = grid();
        let field = make_spiral(&g, &spec(0)).unwrap();
        assert!(field.im.iter().all(|&v| v == 0.0));
        assert_eq!(measure_charge(&field, 125.0).unwrap(), 0);
    }

    #[test]
    fn charge_matches_construction_for_small_m() {
        let g = grid();
        for m in -2..=2 {
            let field = make_spiral(&g, &spec(m)).unwrap();
            for radius in [8.0 * g.dx(), 125.0, 0.4 * g.physical_size] {
                assert_eq!(measure_charge(&field, radius).unwrap(), m, "m={m} r={radius}");
            }
        }
    }

    #[test]
    fn humidity_zero_leaves_pure_noise() {
        let g = grid();
        let mut s = spec(1);
        s.humidity = 0.0;
        s.noise_eps = 1e-3;
        let field = make_spiral(&g, &s).unwrap();
        for idx in 0..g.cells() {
            assert_abs_diff_eq!(field.amp(idx), 1e-3, epsilon = 1e-15);
        }
    }

    #[test]
    fn noise_is_reproducible() {
        let g = grid();
        let mut s = spec(1);
        s.noise_eps = 0.01;
        let a = make_spiral(&g, &s).unwrap();
        let b = make_spiral(&g, &s).unwrap();
        assert_eq!(a.re, b.re);
        assert_eq!(a.im, b.im);
        s.seed = 8;
        let c = make_spiral(&g, &s).unwrap();
        assert_ne!(a.re, c.re);
    }

    #[test]
    fn plane_wave_requires_periodic_grid() {
        let g = grid();
        assert!(matches!(make_plane_wave(&g, (1, 0), 1.0), Err(Error::NonPeriodicGrid)));
    }

    #[test]
    fn plane_wave_modes() {
        let g = GridSpec::new(64, 1.0, Boundary::Periodic).unwrap();
        let uniform = make_plane_wave(&g, (0, 0), 0.7).unwrap();
        assert!(uniform.re.iter().all(|&v| v == 0.7));
        assert!(uniform.im.iter().all(|&v| v == 0.0));

        let mode = make_plane_wave(&g, (1, 0), 1.0).unwrap();
        for idx in 0..g.cells() {
            assert_abs_diff_eq!(mode.amp(idx), 1.0, epsilon = 1e-12);
        }
        assert_eq!(measure_charge(&uniform, 0.25).unwrap(), 0);
    }

    #[test]
    fn zero_field_loop_is_singular() {
        let g = grid();
        let field = VelocityField::zeros(g);
        assert!(matches!(measure_charge(&field, 125.0), Err(Error::SingularLoop { .. })));
    }

    #[test]
    fn loop_must_fit_inside_domain() {
        let g = grid();
        let field = make_spiral(&g, &spec(1)).unwrap();
        assert!(matches!(
            measure_charge(&field, 0.6 * g.physical_size),
            Err(Error::LoopOutsideDomain { .. })
        ));
    }

    #[test]
    fn default_spec_uses_plateau_and_core_width() {
        let g = grid();
        let p = Params {
            nu1: 1.0,
            c1: 0.0,
            q: 4.0,
            alpha1: 1.0,
            c2: 0.0,
            l0: 500.0,
            basin_profile: BasinProfile::Disk,
        };
        let s = SpiralSpec::for_params(1, &g, &p);
        assert_eq!(s.amplitude, 2.0);
        assert_eq!(s.core_width, 4.0 * g.dx());
    }

    proptest! {
        #[test]
        fn conjugation_negates_charge(m in -2i32..=2, radius_frac in 0.1f64..0.4) {
            let g = grid();
            let field = make_spiral(&g, &spec(m)).unwrap();
            let mut conj = field.clone();
            for v in conj.im.iter_mut() {
                *v = -*v;
            }
            let radius = radius_frac * g.physical_size;
            prop_assert_eq!(
                measure_charge(&conj, radius).unwrap(),
                -measure_charge(&field, radius).unwrap()
            );
        }
    }
}
