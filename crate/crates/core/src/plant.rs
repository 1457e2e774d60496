//! Nonlinear inverted-pendulum dynamics in control-affine form.
//!
//! The plant is the single-state-pair system
//!
//! ```text
//! theta_ddot = f(theta, theta_dot) + g(theta) * u + d(t)
//! ```
//!
//! with
//!
//! ```text
//! f = (m*g*l*sin(theta) - m^2*l^2*cos(theta)*sin(theta)*theta_dot^2) / D(theta)
//! g = m*l*cos(theta) / D(theta)
//! D = m^2*l^2*cos^2(theta) - (I + m*l^2)
//! ```
//!
//! `D(theta)` is strictly negative for every angle whenever `D(0) < 0` (its
//! maximum over theta), so `f` and `g` are total functions. The control gain
//! `g(theta)` crosses zero at `theta = +/- pi/2`; inverting controllers must
//! apply the `g_min` guard (see the controller module).

/// Physical constants of the pendulum plus the singularity guard threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams {
    /// Pendulum mass (kg).
    pub mass_m: f64,
    /// Length to center of mass (m).
    pub length_l: f64,
    /// Rotational inertia (kg m^2).
    pub inertia_i: f64,
    /// Gravitational acceleration (m/s^2).
    pub gravity_g: f64,
    /// Minimum admissible |g(theta)| for control inversion.
    pub g_min: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        let mass_m = 0.1;
        let length_l = 0.5;
        Self {
            mass_m,
            length_l,
            // Uniform rod about its end: I = (1/3) m l^2.
            inertia_i: mass_m * length_l * length_l / 3.0,
            gravity_g: 9.81,
            g_min: 0.05,
        }
    }
}

/// Why a parameter set was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    NonPositive(&'static str),
    /// `D(0) >= 0`: the denominator would change sign somewhere.
    DenominatorSign {
        d0: f64,
    },
    DisturbanceNotFinite,
}

impl std::fmt::Display for ParamError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamError::NonPositive(field) => write!(f, "{field} must be positive and finite"),
            ParamError::DenominatorSign { d0 } => write!(
                f,
                "denominator D(0) = {d0} is not negative; dynamics would be singular"
            ),
            ParamError::DisturbanceNotFinite => {
                write!(f, "disturbance parameters must be finite")
            }
        }
    }
}

impl std::error::Error for ParamError {}

impl PendulumParams {
    /// Denominator `D(theta) = m^2 l^2 cos^2(theta) - (I + m l^2)`.
    pub fn denominator(&self, theta: f64) -> f64 {
        let ml = self.mass_m * self.length_l;
        let c = theta.cos();
        ml * ml * c * c - (self.inertia_i + self.mass_m * self.length_l * self.length_l)
    }

    /// Checks positivity of every constant and that `D(0) < 0`.
    ///
    /// `D` attains its maximum at `theta = 0`, so a single check covers all
    /// angles.
    pub fn validate(&self) -> Result<(), ParamError> {
        for (value, name) in [
            (self.mass_m, "plant.mass_m"),
            (self.length_l, "plant.length_l"),
            (self.inertia_i, "plant.inertia_i"),
            (self.gravity_g, "plant.gravity_g"),
            (self.g_min, "plant.g_min"),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ParamError::NonPositive(name));
            }
        }
        let d0 = self.denominator(0.0);
        // NaN or +inf (parameter overflow) must fail too.
        if d0.is_nan() || d0 >= 0.0 {
            return Err(ParamError::DenominatorSign { d0 });
        }
        Ok(())
    }
}

/// Pendulum angle/velocity at a simulation instant.
///
/// `theta = 0` is the upright equilibrium; stabilization drives theta to the
/// reference (typically 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    /// Angle from upright (rad).
    pub theta: f64,
    /// Angular velocity (rad/s).
    pub theta_dot: f64,
    /// Simulation time (s).
    pub time: f64,
}

impl PlantState {
    pub fn new(theta: f64, theta_dot: f64, time: f64) -> Self {
        Self {
            theta,
            theta_dot,
            time,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.theta_dot.is_finite() && self.time.is_finite()
    }
}

/// Bounded external disturbance d(t), entering additively as an angular
/// acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DisturbanceModel {
    #[default]
    None,
    /// 0 before `onset_time`, `amplitude` from `onset_time` on (inclusive).
    Step { amplitude: f64, onset_time: f64 },
    /// `amplitude * sin(2 pi frequency_hz t)`.
    Sinusoid { amplitude: f64, frequency_hz: f64 },
}

impl DisturbanceModel {
    /// Largest possible |d(t)|.
    pub fn bound(&self) -> f64 {
        match *self {
            DisturbanceModel::None => 0.0,
            DisturbanceModel::Step { amplitude, .. }
            | DisturbanceModel::Sinusoid { amplitude, .. } => amplitude.abs(),
        }
    }

    /// Boundedness requires finite parameters.
    pub fn validate(&self) -> Result<(), ParamError> {
        let ok = match *self {
            DisturbanceModel::None => true,
            DisturbanceModel::Step {
                amplitude,
                onset_time,
            } => amplitude.is_finite() && onset_time.is_finite(),
            DisturbanceModel::Sinusoid {
                amplitude,
                frequency_hz,
            } => amplitude.is_finite() && frequency_hz.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(ParamError::DisturbanceNotFinite)
        }
    }
}

/// Drift term `f(theta, theta_dot)` of the affine dynamics (rad/s^2).
pub fn eval_f(params: &PendulumParams, state: &PlantState) -> f64 {
    let m = params.mass_m;
    let l = params.length_l;
    let (sin_t, cos_t) = state.theta.sin_cos();
    let numerator = m * params.gravity_g * l * sin_t
        - m * m * l * l * cos_t * sin_t * state.theta_dot * state.theta_dot;
    numerator / params.denominator(state.theta)
}

/// Control gain `g(theta)` (rad/s^2 per control unit). Zero at cos(theta) = 0.
pub fn eval_g(params: &PendulumParams, state: &PlantState) -> f64 {
    let numerator = params.mass_m * params.length_l * state.theta.cos();
    numerator / params.denominator(state.theta)
}

/// Disturbance sample at time `t` (rad/s^2).
pub fn eval_disturbance(model: &DisturbanceModel, t: f64) -> f64 {
    match *model {
        DisturbanceModel::None => 0.0,
        DisturbanceModel::Step {
            amplitude,
            onset_time,
        } => {
            if t < onset_time {
                0.0
            } else {
                amplitude
            }
        }
        DisturbanceModel::Sinusoid {
            amplitude,
            frequency_hz,
        } => amplitude * (2.0 * std::f64::consts::PI * frequency_hz * t).sin(),
    }
}

/// Angular acceleration under control `u` and disturbance `d`:
/// `f + g*u + d`, exactly the affine composition.
pub fn acceleration(params: &PendulumParams, state: &PlantState, u: f64, d: f64) -> f64 {
    eval_f(params, state) + eval_g(params, state) * u + d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::SplitMix64;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn state(theta: f64, theta_dot: f64) -> PlantState {
        PlantState::new(theta, theta_dot, 0.0)
    }

    #[test]
    fn default_params_are_valid() {
        let p = PendulumParams::default();
        p.validate().unwrap();
        assert!(p.denominator(0.0) < 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        let p = PendulumParams {
            mass_m: -1.0,
            ..PendulumParams::default()
        };
        assert!(matches!(p.validate(), Err(ParamError::NonPositive(_))));

        // Heavy point mass on a long arm flips the denominator sign.
        let p = PendulumParams {
            mass_m: 3.0,
            length_l: 1.0,
            inertia_i: 0.1,
            gravity_g: 9.81,
            g_min: 0.05,
        };
        assert!(matches!(
            p.validate(),
            Err(ParamError::DenominatorSign { .. })
        ));
    }

    #[test]
    fn eval_f_examples() {
        let p = PendulumParams::default();
        assert_eq!(eval_f(&p, &state(0.0, 0.0)), 0.0);

        // theta = pi/2: numerator reduces to m*g*l, denominator to -(I + m l^2).
        let expected = (0.1 * 9.81 * 0.5) / -(p.inertia_i + 0.1 * 0.25);
        let got = eval_f(&p, &state(FRAC_PI_2, 0.0));
        assert!((got - expected).abs() < 1e-12, "got {got}");
        assert!((got - -14.715).abs() < 1e-3);

        // sin(pi) is ~1e-16, so both numerator terms vanish to fp noise.
        assert!(eval_f(&p, &state(PI, 3.0)).abs() < 1e-13);
    }

    #[test]
    fn eval_g_examples() {
        let p = PendulumParams::default();
        let g0 = eval_g(&p, &state(0.0, 0.0));
        // 0.05 / (0.0025 - (1/120 + 0.025)) = -6/3.7
        assert!((g0 - (-6.0 / 3.7)).abs() < 1e-12, "got {g0}");
        assert!((g0 - -1.621622).abs() < 1e-6);

        // Singular angle: cos(pi/2) in f64 is ~6.1e-17.
        assert!(eval_g(&p, &state(FRAC_PI_2, 0.0)).abs() < 1e-15);

        // cos(pi) = -1 flips the sign of the theta=0 value.
        let gpi = eval_g(&p, &state(PI, 0.0));
        assert!((gpi - 6.0 / 3.7).abs() < 1e-12, "got {gpi}");
    }

    #[test]
    fn disturbance_examples() {
        assert_eq!(eval_disturbance(&DisturbanceModel::None, 3.7), 0.0);

        let step = DisturbanceModel::Step {
            amplitude: 0.5,
            onset_time: 1.0,
        };
        assert_eq!(eval_disturbance(&step, 0.999), 0.0);
        // Onset is inclusive.
        assert_eq!(eval_disturbance(&step, 1.0), 0.5);

        let sine = DisturbanceModel::Sinusoid {
            amplitude: 0.2,
            frequency_hz: 0.25,
        };
        // sin(pi/2) = 1
        assert!((eval_disturbance(&sine, 1.0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn acceleration_examples() {
        let p = PendulumParams::default();
        assert_eq!(acceleration(&p, &state(0.0, 0.0), 0.0, 0.0), 0.0);

        // f = 0 at upright rest, so acceleration(u=1) equals eval_g.
        let a = acceleration(&p, &state(0.0, 0.0), 1.0, 0.0);
        assert!((a - eval_g(&p, &state(0.0, 0.0))).abs() < 1e-15);

        // At the singular angle the control input is inert.
        let a = acceleration(&p, &state(FRAC_PI_2, 0.0), 100.0, 0.1);
        assert!((a - (-14.715 + 0.1)).abs() < 2e-3, "got {a}");
    }

    #[test]
    fn denominator_negative_and_dynamics_finite_on_grid() {
        let p = PendulumParams::default();
        let n = 10_000;
        for i in 0..=n {
            let theta = -PI + 2.0 * PI * (i as f64) / (n as f64);
            assert!(p.denominator(theta) < 0.0, "D({theta}) not negative");
            let s = state(theta, 0.7);
            assert!(eval_f(&p, &s).is_finite());
            assert!(eval_g(&p, &s).is_finite());
        }
    }

    #[test]
    fn acceleration_is_affine_in_u() {
        let p = PendulumParams::default();
        let mut rng = SplitMix64::new(0x9e3779b97f4a7c15);
        for _ in 0..100 {
            let s = state(rng.in_range(-PI, PI), rng.in_range(-5.0, 5.0));
            let u = rng.in_range(-50.0, 50.0);
            let lhs = acceleration(&p, &s, u, 0.0) - acceleration(&p, &s, 0.0, 0.0);
            let rhs = eval_g(&p, &s) * u;
            assert!(
                (lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()),
                "affinity broken at theta={}, u={u}: {lhs} vs {rhs}",
                s.theta
            );
        }
    }

    #[test]
    fn drift_is_odd_in_theta_at_rest() {
        let p = PendulumParams::default();
        let n = 1000;
        for i in 0..=n {
            let theta = PI * (i as f64) / (n as f64);
            let plus = acceleration(&p, &state(theta, 0.0), 0.0, 0.0);
            let minus = acceleration(&p, &state(-theta, 0.0), 0.0, 0.0);
            assert!(
                (plus + minus).abs() < 1e-12,
                "odd symmetry broken at theta={theta}"
            );
        }
    }

    #[test]
    fn disturbance_rejects_non_finite_parameters() {
        assert!(DisturbanceModel::None.validate().is_ok());
        let bad = DisturbanceModel::Step {
            amplitude: f64::INFINITY,
            onset_time: 1.0,
        };
        assert_eq!(bad.validate(), Err(ParamError::DisturbanceNotFinite));
        let bad = DisturbanceModel::Sinusoid {
            amplitude: 0.1,
            frequency_hz: f64::NAN,
        };
        assert_eq!(bad.validate(), Err(ParamError::DisturbanceNotFinite));
    }

    #[test]
    fn disturbance_stays_within_bound() {
        let models = [
            DisturbanceModel::None,
            DisturbanceModel::Step {
                amplitude: 0.5,
                onset_time: 2.0,
            },
            DisturbanceModel::Sinusoid {
                amplitude: 0.2,
                frequency_hz: 1.3,
            },
        ];
        let mut rng = SplitMix64::new(42);
        for _ in 0..10_000 {
            let t = rng.in_range(0.0, 100.0);
            for m in &models {
                assert!(eval_disturbance(m, t).abs() <= m.bound() + 1e-15);
            }
        }
    }
}
