//! Power-rate reaching laws and the switching element.
//!
//! First order (PD branch):
//!
//! ```text
//! s_dot = -k1*s - eps1*|s|^alpha * sw(s)
//! ```
//!
//! Second order (PI branch), prescribing the surface acceleration:
//!
//! ```text
//! s_ddot = -k1*s_dot - k2*s - eps1*|s_dot|^alpha * sw(s_dot) - eps2*|s|^alpha * sw(s)
//! ```
//!
//! `sw` is either the sign function (with sign(0) = 0) or the boundary-layer
//! saturation of half-width `delta`. The proportional terms pull harder far
//! from the manifold; the power terms keep the pull strong at mid range while
//! fading near the manifold, which is what keeps the first-order law
//! finite-time convergent without infinite switching gain.

/// Switching element used inside the reaching laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwitchKind {
    #[default]
    Sign,
    /// Linear ramp `s/delta` inside `|s| <= delta`, saturated to +/-1 outside.
    Saturation,
}

/// Gains of the reaching laws. `k2`/`eps2` only act in the second-order law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachingParams {
    /// Proportional gain on the top-derivative surface term (1/s).
    pub k1: f64,
    /// Proportional gain on the surface itself, second-order law (1/s^2).
    pub k2: f64,
    /// Power-term gain paired with k1.
    pub eps1: f64,
    /// Power-term gain paired with k2.
    pub eps2: f64,
    /// Power-term exponent, 0 < alpha < 1.
    pub alpha: f64,
    pub switch: SwitchKind,
    /// Boundary-layer half-width (same units as s); used in saturation mode.
    pub delta: f64,
}

impl Default for ReachingParams {
    fn default() -> Self {
        Self {
            k1: 5.0,
            k2: 6.0,
            eps1: 2.0,
            eps2: 2.0,
            alpha: 0.5,
            switch: SwitchKind::Sign,
            delta: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReachingError {
    NonPositive(&'static str),
    /// alpha outside (0, 1).
    AlphaRange {
        alpha: f64,
    },
    /// delta must be positive in saturation mode.
    DeltaRequired,
    /// The closed-form reaching time only holds for pure sign switching.
    BoundRequiresSign,
}

impl std::fmt::Display for ReachingError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReachingError::NonPositive(field) => {
                write!(f, "reaching gain {field} violates its sign constraint")
            }
            ReachingError::AlphaRange { alpha } => {
                write!(f, "alpha = {alpha} outside the open interval (0, 1)")
            }
            ReachingError::DeltaRequired => {
                write!(f, "saturation switching requires delta > 0")
            }
            ReachingError::BoundRequiresSign => {
                write!(f, "reaching-time bound is only valid for sign switching")
            }
        }
    }
}

impl std::error::Error for ReachingError {}

impl ReachingParams {
    /// k1 > 0, k2 >= 0, eps1 > 0, eps2 >= 0, 0 < alpha < 1, and delta > 0
    /// when saturating.
    pub fn validate(&self) -> Result<(), ReachingError> {
        if !(self.k1.is_finite() && self.k1 > 0.0) {
            return Err(ReachingError::NonPositive("k1"));
        }
        if !(self.k2.is_finite() && self.k2 >= 0.0) {
            return Err(ReachingError::NonPositive("k2"));
        }
        if !(self.eps1.is_finite() && self.eps1 > 0.0) {
            return Err(ReachingError::NonPositive("eps1"));
        }
        if !(self.eps2.is_finite() && self.eps2 >= 0.0) {
            return Err(ReachingError::NonPositive("eps2"));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ReachingError::AlphaRange { alpha: self.alpha });
        }
        if self.switch == SwitchKind::Saturation && !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(ReachingError::DeltaRequired);
        }
        Ok(())
    }
}

/// Switching element, a value in [-1, 1].
///
/// Sign mode returns sign(s) with sign(0) = 0; saturation mode ramps linearly
/// with slope 1/delta inside the boundary layer.
pub fn switch_fn(params: &ReachingParams, s: f64) -> f64 {
    match params.switch {
        SwitchKind::Sign => {
            if s > 0.0 {
                1.0
            } else if s < 0.0 {
                -1.0
            } else {
                0.0
            }
        }
        SwitchKind::Saturation => {
            if s > params.delta {
                1.0
            } else if s < -params.delta {
                -1.0
            } else {
                s / params.delta
            }
        }
    }
}

/// First-order power-rate law: `-k1*s - eps1*|s|^alpha * sw(s)`.
pub fn first_order_rate(params: &ReachingParams, s: f64) -> f64 {
    -params.k1 * s - params.eps1 * s.abs().powf(params.alpha) * switch_fn(params, s)
}

/// Second-order power-rate law:
/// `-k1*s_dot - k2*s - eps1*|s_dot|^alpha * sw(s_dot) - eps2*|s|^alpha * sw(s)`.
///
/// Reduces to a damped linear second-order system when eps1 = eps2 = 0.
pub fn second_order_rate(params: &ReachingParams, s: f64, s_dot: f64) -> f64 {
    -params.k1 * s_dot
        - params.k2 * s
        - params.eps1 * s_dot.abs().powf(params.alpha) * switch_fn(params, s_dot)
        - params.eps2 * s.abs().powf(params.alpha) * switch_fn(params, s)
}

/// Exact time at which the first-order law drives |s| to zero from `s0`
/// (sign switching only):
///
/// ```text
/// t_r = ln((k1*|s0|^(1-alpha) + eps1) / eps1) / (k1 * (1 - alpha))
/// ```
pub fn reaching_time_bound(params: &ReachingParams, s0: f64) -> Result<f64, ReachingError> {
    if params.switch != SwitchKind::Sign {
        return Err(ReachingError::BoundRequiresSign);
    }
    params.validate()?;
    let one_minus_alpha = 1.0 - params.alpha;
    let w0 = s0.abs().powf(one_minus_alpha);
    Ok(((params.k1 * w0 + params.eps1) / params.eps1).ln() / (params.k1 * one_minus_alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::SplitMix64;

    fn sign_params(k1: f64, eps1: f64, alpha: f64) -> ReachingParams {
        ReachingParams {
            k1,
            eps1,
            alpha,
            switch: SwitchKind::Sign,
            ..ReachingParams::default()
        }
    }

    /// Reference integration of the first-order law, returning the first time
    /// |s| < tol. Explicit Euler: near the annihilation instant the rate is
    /// not Lipschitz and a multi-stage method averages itself into a spurious
    /// fixed point, while the Euler step marches across zero. The exact
    /// solution never changes sign, so a sign flip also counts as reached.
    fn integrate_first_order_until(params: &ReachingParams, s0: f64, tol: f64, dt: f64) -> f64 {
        let sign0 = s0.signum();
        let mut s = s0;
        let mut t = 0.0;
        let max_t = 1e3;
        while s.abs() >= tol && s.signum() == sign0 && t < max_t {
            s += dt * first_order_rate(params, s);
            t += dt;
        }
        t
    }

    #[test]
    fn switch_fn_examples() {
        let sat = ReachingParams {
            switch: SwitchKind::Saturation,
            delta: 0.1,
            ..ReachingParams::default()
        };
        assert_eq!(switch_fn(&sat, 0.2), 1.0);
        assert!((switch_fn(&sat, 0.05) - 0.5).abs() < 1e-15);
        assert_eq!(switch_fn(&sat, -0.2), -1.0);
        // Boundary itself rides the ramp.
        assert_eq!(switch_fn(&sat, 0.1), 1.0);
        assert_eq!(switch_fn(&sat, 0.1 - 1e-12), (0.1 - 1e-12) / 0.1);

        let sgn = ReachingParams::default();
        assert_eq!(switch_fn(&sgn, 0.0), 0.0);
        assert_eq!(switch_fn(&sgn, 1e-300), 1.0);
        assert_eq!(switch_fn(&sgn, -1e-300), -1.0);
    }

    #[test]
    fn first_order_rate_examples() {
        let p = sign_params(1.0, 0.5, 0.5);
        assert!((first_order_rate(&p, 1.0) - -1.5).abs() < 1e-15);
        assert_eq!(first_order_rate(&p, 0.0), 0.0);
        assert!((first_order_rate(&p, -1.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn second_order_rate_examples() {
        let p = ReachingParams::default();
        assert_eq!(second_order_rate(&p, 0.0, 0.0), 0.0);

        let linear = ReachingParams {
            k1: 2.0,
            k2: 1.0,
            eps1: 0.0,
            eps2: 0.0,
            ..ReachingParams::default()
        };
        assert!((second_order_rate(&linear, 1.0, -1.0) - 1.0).abs() < 1e-15);

        let p = ReachingParams {
            k1: 1.0,
            k2: 1.0,
            eps1: 0.5,
            eps2: 0.5,
            alpha: 0.5,
            switch: SwitchKind::Sign,
            ..ReachingParams::default()
        };
        // sign(s_dot = 0) = 0 silences the eps1 term.
        assert!((second_order_rate(&p, 1.0, 0.0) - -1.5).abs() < 1e-15);
    }

    #[test]
    fn reaching_time_bound_examples() {
        let p = sign_params(1.0, 0.5, 0.5);
        let t = reaching_time_bound(&p, 1.0).unwrap();
        assert!((t - 2.0 * 3.0f64.ln()).abs() < 1e-12, "got {t}");
        // Even in |s0|.
        let t_neg = reaching_time_bound(&p, -1.0).unwrap();
        assert_eq!(t, t_neg);
        // Limit s0 -> 0.
        assert!(reaching_time_bound(&p, 0.0).unwrap().abs() < 1e-15);

        // Cross-check against direct integration.
        let t_num = integrate_first_order_until(&p, 1.0, 1e-9, 1e-6);
        assert!(
            (t_num - t).abs() / t < 5e-3,
            "integration {t_num} vs bound {t}"
        );
    }

    #[test]
    fn reaching_time_bound_rejects_saturation() {
        let p = ReachingParams {
            switch: SwitchKind::Saturation,
            ..ReachingParams::default()
        };
        assert_eq!(
            reaching_time_bound(&p, 1.0),
            Err(ReachingError::BoundRequiresSign)
        );
    }

    #[test]
    fn bound_matches_integration_for_random_gains() {
        let mut rng = SplitMix64::new(0xABCD);
        for _ in 0..20 {
            let p = sign_params(
                rng.in_range(0.8, 4.0),
                rng.in_range(0.8, 2.5),
                rng.in_range(0.25, 0.65),
            );
            let s0 = rng.in_range(0.5, 3.0) * if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
            let bound = reaching_time_bound(&p, s0).unwrap();
            let hit = integrate_first_order_until(&p, s0, 1e-9, 1e-6);
            assert!(
                (hit - bound).abs() / bound < 5e-3,
                "k1={} eps1={} alpha={} s0={s0}: {hit} vs {bound}",
                p.k1,
                p.eps1,
                p.alpha
            );
        }
    }

    #[test]
    fn lyapunov_decrease_first_order() {
        let p = ReachingParams::default();
        for i in 0..1000 {
            // Log-spaced |s| from 1e-6 to 1e3, both signs.
            let exponent = -6.0 + 9.0 * (i as f64) / 999.0;
            let mag = 10f64.powf(exponent);
            for s in [mag, -mag] {
                let v_dot = s * first_order_rate(&p, s);
                assert!(v_dot < 0.0, "s*rate = {v_dot} at s = {s}");
            }
        }
    }

    #[test]
    fn rates_are_odd() {
        let mut rng = SplitMix64::new(99);
        let p = ReachingParams::default();
        for _ in 0..200 {
            let s = rng.in_range(-3.0, 3.0);
            let s_dot = rng.in_range(-3.0, 3.0);
            assert_eq!(first_order_rate(&p, -s), -first_order_rate(&p, s));
            assert_eq!(
                second_order_rate(&p, -s, -s_dot),
                -second_order_rate(&p, s, s_dot)
            );
        }
    }

    #[test]
    fn switch_fn_stays_in_unit_interval() {
        let mut rng = SplitMix64::new(21);
        let sat = ReachingParams {
            switch: SwitchKind::Saturation,
            delta: 0.05,
            ..ReachingParams::default()
        };
        let sgn = ReachingParams::default();
        for _ in 0..1000 {
            let s = rng.in_range(-1e6, 1e6);
            for p in [&sat, &sgn] {
                let w = switch_fn(p, s);
                assert!((-1.0..=1.0).contains(&w), "switch({s}) = {w}");
            }
        }
    }

    #[test]
    fn saturation_agrees_with_sign_outside_layer() {
        let sat = ReachingParams {
            switch: SwitchKind::Saturation,
            delta: 0.05,
            ..ReachingParams::default()
        };
        let sgn = ReachingParams::default();
        let mut rng = SplitMix64::new(5);
        for _ in 0..1000 {
            let s = rng.in_range(-10.0, 10.0);
            if s.abs() > sat.delta {
                assert_eq!(switch_fn(&sat, s), switch_fn(&sgn, s));
            }
        }
    }

    /// The energy-rate identity of the second-order law:
    /// s_dot*(s_ddot + k2*s) = -k1*s_dot^2 - eps1*|s_dot|^(1+alpha)
    ///                         - eps2*|s|^alpha*sign(s)*s_dot
    /// which is bounded above by the same expression with the last term
    /// replaced by +eps2*|s|^alpha*|s_dot|.
    #[test]
    fn second_order_energy_rate_identity() {
        let p = ReachingParams::default();
        let mut rng = SplitMix64::new(1234);
        for _ in 0..500 {
            let s = rng.in_range(-2.0, 2.0);
            let s_dot = rng.in_range(-2.0, 2.0);
            let s_ddot = second_order_rate(&p, s, s_dot);
            let lhs = s_dot * (s_ddot + p.k2 * s);
            let sgn_s = if s > 0.0 {
                1.0
            } else if s < 0.0 {
                -1.0
            } else {
                0.0
            };
            let exact = -p.k1 * s_dot * s_dot
                - p.eps1 * s_dot.abs().powf(1.0 + p.alpha)
                - p.eps2 * s.abs().powf(p.alpha) * sgn_s * s_dot;
            let bound = -p.k1 * s_dot * s_dot - p.eps1 * s_dot.abs().powf(1.0 + p.alpha)
                + p.eps2 * s.abs().powf(p.alpha) * s_dot.abs();
            assert!(
                (lhs - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
                "identity broken at ({s}, {s_dot})"
            );
            assert!(lhs <= bound + 1e-12 * (1.0 + bound.abs()));
        }
    }

    #[test]
    fn validation_catches_out_of_range() {
        let p = ReachingParams {
            alpha: 1.5,
            ..ReachingParams::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ReachingError::AlphaRange { .. })
        ));

        let p = ReachingParams {
            k1: 0.0,
            ..ReachingParams::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ReachingError::NonPositive("k1"))
        ));

        let p = ReachingParams {
            switch: SwitchKind::Saturation,
            delta: 0.0,
            ..ReachingParams::default()
        };
        assert_eq!(p.validate(), Err(ReachingError::DeltaRequired));

        // k2 = 0 and eps2 = 0 are allowed.
        let p = ReachingParams {
            k2: 0.0,
            eps2: 0.0,
            ..ReachingParams::default()
        };
        assert!(p.validate().is_ok());
    }
}
