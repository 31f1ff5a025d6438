//! Analytic self-organization conditions: stability of turbulent structures,
//! the horizontal-velocity bound and topological-charge classification.

use crate::params::Params;

/// Topological class of the vortex: |m| ≤ 2 is tornado-like, |m| > 2 is the
/// large-cyclone regime (structures without a trunk).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeClass {
    Tornado,
    Cyclone,
}

/// Pre-simulation prediction for a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    StableVortex,
    Unstable,
    Subcritical,
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    /// c₁·c₂.
    pub cc_product: f64,
    /// Universal stability condition −1 < c₁c₂ < 1, strict on both sides
    /// (boundary cases are marginal and classify as not stable).
    pub bf_stable: bool,
    /// (c₁²+1)k⁴ + 2(1+c₁c₂)k² evaluated at k = π/l₀. Positive means the
    /// perturbation at that wavenumber is damped.
    pub criterion_value: f64,
    /// Right-hand side of the velocity bound ϑ² ≥ (4q/α₁)(1 − 4c₂²/9).
    /// Non-positive values make the bound vacuous.
    pub v_min_sq: f64,
    /// Consistency of c₂ against an independently supplied sink ratio;
    /// trivially true when none is given.
    pub a2_ok: bool,
    /// Topological charge the report was evaluated for.
    pub m: i32,
    pub charge_class: ChargeClass,
    pub predicted: Prediction,
}

impl RegimeReport {
    /// Twisting label derived from the sign of m.
    pub fn twisting(&self) -> &'static str {
        match self.m.signum() {
            -1 => "left",
            1 => "right",
            _ => "none",
        }
    }
}

/// Stability criterion at the basin scale: returns
/// `((c₁²+1)k⁴ + 2(1+c₁c₂)k², −1 < c₁c₂ < 1)` with k = π/l₀.
pub fn stability_criterion(c1: f64, c2: f64, l0: f64) -> (f64, bool) {
    let k = std::f64::consts::PI / l0;
    let k2 = k * k;
    let value = (c1 * c1 + 1.0) * k2 * k2 + 2.0 * (1.0 + c1 * c2) * k2;
    let cc = c1 * c2;
    (value, -1.0 < cc && cc < 1.0)
}

/// Velocity-bound right-hand side `(4q/α₁)(1 − 4c₂²/9)`.
///
/// A non-positive result (c₂² ≥ 9/4) means the bound places no restriction;
/// callers should treat `v_min_sq ≤ 0` as vacuous rather than an error.
pub fn velocity_bound(q: f64, alpha1: f64, c2: f64) -> f64 {
    (4.0 * q / alpha1) * (1.0 - 4.0 * c2 * c2 / 9.0)
}

/// Combine the analytic conditions into a [`RegimeReport`].
///
/// `independent_a2`, when given, is an externally determined sink ratio
/// α₂/α₁ checked against the stored c₂ (the `A₂² ≤ (α₂/α₁)²` restriction is
/// an identity under the definition c₂ = α₂/α₁, so it only carries
/// information with an independent value).
pub fn classify(params: &Params, m: i32, independent_a2: Option<f64>) -> RegimeReport {
    let (criterion_value, bf_stable) = stability_criterion(params.c1, params.c2, params.l0);
    let v_min_sq = if params.alpha1 > 0.0 {
        velocity_bound(params.q, params.alpha1, params.c2)
    } else {
        0.0
    };
    let charge_class = if m.abs() <= 2 { ChargeClass::Tornado } else { ChargeClass::Cyclone };
    let predicted = if params.q <= 0.0 {
        Prediction::Subcritical
    } else if !bf_stable {
        Prediction::Unstable
    } else {
        Prediction::StableVortex
    };
    RegimeReport {
        cc_product: params.c1 * params.c2,
        bf_stable,
        criterion_value,
        v_min_sq,
        a2_ok: independent_a2.map_or(true, |a2| params.c2 * params.c2 <= a2 * a2),
        m,
        charge_class,
        predicted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BasinProfile;
    use approx::assert_abs_diff_eq;

    fn params(c1: f64, c2: f64, q: f64, alpha1: f64) -> Params {
        Params { nu1: 1.0, c1, q, alpha1, c2, l0: std::f64::consts::PI, basin_profile: BasinProfile::Uniform }
    }

    #[test]
    fn unit_wavenumber_arithmetic() {
        // l0 = π gives k = 1: value = (0+1)·1 + 2·(1+0)·1 = 3 > 0, stable.
        let (value, stable) = stability_criterion(0.0, 0.0, std::f64::consts::PI);
        assert_abs_diff_eq!(value, 3.0, epsilon = 1e-14);
        assert!(stable);
    }

    #[test]
    fn product_outside_band_is_unstable() {
        let (_, stable) = stability_criterion(2.0, -1.0, 1.0);
        assert!(!stable);
    }

    #[test]
    fn boundary_product_is_marginal() {
        // Strict inequalities: c₁c₂ = 1 classifies as not stable.
        let (_, stable) = stability_criterion(1.0, 1.0, 1.0);
        assert!(!stable);
        let (_, stable) = stability_criterion(1.0, -1.0, 1.0);
        assert!(!stable);
    }

    #[test]
    fn velocity_bound_values() {
        assert_abs_diff_eq!(velocity_bound(1.0, 1.0, 0.0), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(velocity_bound(1.0, 4.0, 0.0), 1.0, epsilon = 1e-14);
        // c₂ = 3/2 zeroes the factor: the bound becomes vacuous.
        assert_abs_diff_eq!(velocity_bound(1.0, 1.0, 1.5), 0.0, epsilon = 1e-14);
        assert!(velocity_bound(1.0, 1.0, 2.0) < 0.0);
    }

    #[test]
    fn classify_composition() {
        let r = classify(&params(0.5, 0.0, 1.0, 1.0), 1, None);
        assert_eq!(r.predicted, Prediction::StableVortex);
        assert_eq!(r.charge_class, ChargeClass::Tornado);
        assert!(r.a2_ok);
        assert_eq!(r.twisting(), "right");

        let r = classify(&params(2.0, -1.0, 1.0, 1.0), 1, None);
        assert_eq!(r.predicted, Prediction::Unstable);

        let r = classify(&params(0.0, 0.0, -1.0, 1.0), 1, None);
        assert_eq!(r.predicted, Prediction::Subcritical);

        let r = classify(&params(0.0, 0.0, 1.0, 1.0), 3, None);
        assert_eq!(r.charge_class, ChargeClass::Cyclone);
        assert_eq!(r.predicted, Prediction::StableVortex);

        let r = classify(&params(0.0, 0.0, 1.0, 1.0), -1, None);
        assert_eq!(r.charge_class, ChargeClass::Tornado);
        assert_eq!(r.twisting(), "left");
    }

    #[test]
    fn a2_consistency_check() {
        let p = params(0.0, 0.8, 1.0, 1.0);
        assert!(classify(&p, 1, Some(0.8)).a2_ok);
        assert!(classify(&p, 1, Some(1.0)).a2_ok);
        assert!(!classify(&p, 1, Some(0.5)).a2_ok);
    }

    #[test]
    fn scaling_q_alpha_leaves_classification_unchanged() {
        for scale in [0.25, 1.0, 7.5] {
            let a = classify(&params(0.3, 0.4, 1.0, 2.0), 1, None);
            let b = classify(&params(0.3, 0.4, scale * 1.0, scale * 2.0), 1, None);
            assert_eq!(a.bf_stable, b.bf_stable);
            assert_eq!(a.charge_class, b.charge_class);
            assert_eq!(a.predicted, b.predicted);
            assert_eq!(a.criterion_value.signum(), b.criterion_value.signum());
        }
    }
}
