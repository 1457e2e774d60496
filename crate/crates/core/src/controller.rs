//! Control-input synthesis: traditional PD SMC, PI second-order SMC, and the
//! combined (multiplexed) controller, with singularity guarding.
//!
//! Each branch law is the unique `u` that makes its surface obey its reaching
//! law, obtained by substituting the plant model into the surface rate:
//!
//! PD branch, from `s_dot = kp*e_dot + kd*(ref_ddot - f - g*u)` set equal to
//! the first-order law:
//!
//! ```text
//! u_pd = [kd*(ref_ddot - f) + kp*e_dot + k1*s + eps1*|s|^alpha*sw(s)] / (kd*g)
//! ```
//!
//! PI branch, from `s_ddot = kp*(ref_ddot - f - g*u) + ki*e_dot` set equal to
//! the second-order law:
//!
//! ```text
//! u_pi = [kp*(ref_ddot - f) + ki*e_dot + k1*s_dot + k2*s
//!         + eps1*|s_dot|^alpha*sw(s_dot) + eps2*|s|^alpha*sw(s)] / (kp*g)
//! ```
//!
//! Both laws divide by `g(theta)`, which vanishes at theta = +/- pi/2. When
//! `|g| < g_min` the affected branch holds its previous output (zero at t=0),
//! clamped to +/- u_max, and flags `guard_active` so the event is visible in
//! traces.

use crate::plant::{eval_f, eval_g, PendulumParams, PlantState};
use crate::reaching::{switch_fn, ReachingError, ReachingParams};
use crate::surface::{pd_surface, pi_surface, SurfaceGains, TrackingError};

/// Which control law drives the plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControllerKind {
    /// Traditional first-order SMC on the PD surface.
    PdSmc,
    /// Second-order SMC on the PI surface.
    Pi2Smc,
    /// Additive multiplexing: `u = pd_weight * u_pd + u_pi`.
    #[default]
    Combined,
}

impl ControllerKind {
    pub fn token(&self) -> &'static str {
        match self {
            ControllerKind::PdSmc => "pd_smc",
            ControllerKind::Pi2Smc => "pi2_smc",
            ControllerKind::Combined => "combined",
        }
    }
}

/// Reference trajectory. Only constant references are supported; the
/// derivative fields exist so the laws keep their feedforward terms explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSignal {
    pub theta_ref: f64,
    pub theta_ref_dot: f64,
    pub theta_ref_ddot: f64,
}

impl ReferenceSignal {
    pub fn constant(theta_ref: f64) -> Self {
        Self {
            theta_ref,
            theta_ref_dot: 0.0,
            theta_ref_ddot: 0.0,
        }
    }
}

impl Default for ReferenceSignal {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

/// Full controller configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub kind: ControllerKind,
    pub surface_gains: SurfaceGains,
    /// Reaching law of the PD branch (first-order).
    pub reaching_first: ReachingParams,
    /// Reaching law of the PI branch (second-order).
    pub reaching_second: ReachingParams,
    /// Mixing weight of the PD branch in combined mode, in [0, 1].
    pub pd_weight: f64,
    /// Control clamp magnitude.
    pub u_max: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kind: ControllerKind::Combined,
            surface_gains: SurfaceGains::default(),
            reaching_first: ReachingParams::default(),
            reaching_second: ReachingParams::default(),
            pd_weight: 1.0,
            u_max: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerError {
    Reaching(ReachingError),
    SurfaceGain(&'static str),
    PdWeightRange { value: f64 },
    UMaxNonPositive { value: f64 },
}

impl std::fmt::Display for ControllerError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ControllerError::Reaching(e) => write!(f, "{e}"),
            ControllerError::SurfaceGain(name) => {
                write!(
                    f,
                    "surface gain {name} must be positive for the selected controller"
                )
            }
            ControllerError::PdWeightRange { value } => {
                write!(f, "controller.pd_weight = {value} outside [0, 1]")
            }
            ControllerError::UMaxNonPositive { value } => {
                write!(f, "controller.u_max = {value} must be positive")
            }
        }
    }
}

impl std::error::Error for ControllerError {}

impl From<ReachingError> for ControllerError {
    fn from(e: ReachingError) -> Self {
        ControllerError::Reaching(e)
    }
}

impl ControllerConfig {
    /// Validates the gains needed by the selected kind.
    pub fn validate(&self) -> Result<(), ControllerError> {
        if !(self.pd_weight.is_finite() && (0.0..=1.0).contains(&self.pd_weight)) {
            return Err(ControllerError::PdWeightRange {
                value: self.pd_weight,
            });
        }
        if !(self.u_max.is_finite() && self.u_max > 0.0) {
            return Err(ControllerError::UMaxNonPositive { value: self.u_max });
        }
        let g = &self.surface_gains;
        if !(g.kp.is_finite() && g.kp > 0.0) {
            return Err(ControllerError::SurfaceGain("kp"));
        }
        let pd_active = matches!(self.kind, ControllerKind::PdSmc | ControllerKind::Combined);
        let pi_active = matches!(self.kind, ControllerKind::Pi2Smc | ControllerKind::Combined);
        if pd_active {
            if !(g.kd.is_finite() && g.kd > 0.0) {
                return Err(ControllerError::SurfaceGain("kd"));
            }
            self.reaching_first.validate()?;
        }
        if pi_active {
            if !(g.ki.is_finite() && g.ki > 0.0) {
                return Err(ControllerError::SurfaceGain("ki"));
            }
            self.reaching_second.validate()?;
        }
        Ok(())
    }
}

/// Per-step record of surfaces and control components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlDecomposition {
    /// Raw PD-branch control (0 when the branch is inactive).
    pub u_pd: f64,
    /// Raw PI-branch control (0 when the branch is inactive).
    pub u_pi: f64,
    /// Clamped control applied to the plant.
    pub u_total: f64,
    pub s_pd: f64,
    pub s_pi: f64,
    pub s_pi_dot: f64,
    /// True when any active branch hit the singularity guard this step.
    pub guard_active: bool,
}

/// Raw PD-branch law. Assumes `|g_val|` is safely away from zero; the
/// `Controller` applies the guard.
pub fn pd_control_law(
    gains: &SurfaceGains,
    reaching: &ReachingParams,
    f_val: f64,
    g_val: f64,
    reference: &ReferenceSignal,
    err: &TrackingError,
) -> f64 {
    let s = pd_surface(gains, err).s;
    let numerator = gains.kd * (reference.theta_ref_ddot - f_val)
        + gains.kp * err.e_dot
        + reaching.k1 * s
        + reaching.eps1 * s.abs().powf(reaching.alpha) * switch_fn(reaching, s);
    numerator / (gains.kd * g_val)
}

/// Raw PI-branch law. Assumes `|g_val|` is safely away from zero.
pub fn pi2_control_law(
    gains: &SurfaceGains,
    reaching: &ReachingParams,
    f_val: f64,
    g_val: f64,
    reference: &ReferenceSignal,
    err: &TrackingError,
) -> f64 {
    let surface = pi_surface(gains, err);
    let s = surface.s;
    let s_dot = surface.s_dot.expect("pi surface always carries its rate");
    let numerator = gains.kp * (reference.theta_ref_ddot - f_val)
        + gains.ki * err.e_dot
        + reaching.k1 * s_dot
        + reaching.k2 * s
        + reaching.eps1 * s_dot.abs().powf(reaching.alpha) * switch_fn(reaching, s_dot)
        + reaching.eps2 * s.abs().powf(reaching.alpha) * switch_fn(reaching, s);
    numerator / (gains.kp * g_val)
}

fn clamp(u: f64, u_max: f64) -> f64 {
    u.clamp(-u_max, u_max)
}

/// Stateful controller instance for one scenario run.
///
/// The only state is each branch's previous output, kept for the
/// hold-last-value singularity fallback. One instance per scenario; distinct
/// instances share nothing.
#[derive(Debug, Clone)]
pub struct Controller {
    config: ControllerConfig,
    /// Plant model used for the f/g inversion (nominal parameters; may differ
    /// from the simulated plant).
    model: PendulumParams,
    prev_u_pd: f64,
    prev_u_pi: f64,
}

impl Controller {
    pub fn new(config: ControllerConfig, model: PendulumParams) -> Result<Self, ControllerError> {
        config.validate()?;
        Ok(Self {
            config,
            model,
            prev_u_pd: 0.0,
            prev_u_pi: 0.0,
        })
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    /// One branch evaluation with the singularity guard: the raw law when
    /// `|g| >= g_min`, otherwise the previous output clamped to +/- u_max.
    fn branch(&self, raw: f64, prev: f64, g_val: f64) -> (f64, bool) {
        if g_val.abs() < self.model.g_min {
            (clamp(prev, self.config.u_max), true)
        } else {
            (raw, false)
        }
    }

    /// Computes the control decomposition for the current sample.
    ///
    /// Surfaces are always reported; inactive branches contribute `u = 0`.
    pub fn compute(
        &mut self,
        state: &PlantState,
        reference: &ReferenceSignal,
        err: &TrackingError,
    ) -> ControlDecomposition {
        let gains = self.config.surface_gains;
        let s_pd = pd_surface(&gains, err).s;
        let pi = pi_surface(&gains, err);
        let f_val = eval_f(&self.model, state);
        let g_val = eval_g(&self.model, state);

        let pd_active = matches!(
            self.config.kind,
            ControllerKind::PdSmc | ControllerKind::Combined
        );
        let pi_active = matches!(
            self.config.kind,
            ControllerKind::Pi2Smc | ControllerKind::Combined
        );

        let mut guard_active = false;
        let mut u_pd = 0.0;
        if pd_active {
            let raw = if g_val.abs() < self.model.g_min {
                0.0 // not evaluated; guard path below substitutes
            } else {
                pd_control_law(
                    &gains,
                    &self.config.reaching_first,
                    f_val,
                    g_val,
                    reference,
                    err,
                )
            };
            let (u, guarded) = self.branch(raw, self.prev_u_pd, g_val);
            u_pd = u;
            guard_active |= guarded;
            self.prev_u_pd = u_pd;
        }

        let mut u_pi = 0.0;
        if pi_active {
            let raw = if g_val.abs() < self.model.g_min {
                0.0
            } else {
                pi2_control_law(
                    &gains,
                    &self.config.reaching_second,
                    f_val,
                    g_val,
                    reference,
                    err,
                )
            };
            let (u, guarded) = self.branch(raw, self.prev_u_pi, g_val);
            u_pi = u;
            guard_active |= guarded;
            self.prev_u_pi = u_pi;
        }

        let u_total = match self.config.kind {
            ControllerKind::PdSmc => clamp(u_pd, self.config.u_max),
            ControllerKind::Pi2Smc => clamp(u_pi, self.config.u_max),
            ControllerKind::Combined => {
                clamp(self.config.pd_weight * u_pd + u_pi, self.config.u_max)
            }
        };

        ControlDecomposition {
            u_pd,
            u_pi,
            u_total,
            s_pd,
            s_pi: pi.s,
            s_pi_dot: pi.s_dot.unwrap_or(0.0),
            guard_active,
        }
    }
}
