//! Fixed-grid closed-loop integration.
//!
//! The loop samples the controller and the disturbance at each grid instant,
//! holds both constant over the step (zero-order hold), and advances the
//! two-state plant ODE with classical RK4. The error integral accumulates by
//! the trapezoid rule on the same grid. One `TraceRecord` is emitted per grid
//! point, including t = 0; at the final point the control is computed but no
//! step is taken.

use crate::controller::{Controller, ControllerConfig, ControllerError, ReferenceSignal};
use crate::plant::{
    acceleration, eval_disturbance, DisturbanceModel, ParamError, PendulumParams, PlantState,
};
use crate::surface::TrackingError;

/// Hard cap on the number of integration steps.
pub const MAX_STEPS: f64 = 1e8;

/// A complete closed-loop experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Simulated plant parameters.
    pub plant: PendulumParams,
    /// Plant model the controller inverts; `None` means the controller knows
    /// the true plant. Set this to the nominal parameters when studying
    /// robustness to parametric mismatch.
    pub model: Option<PendulumParams>,
    pub disturbance: DisturbanceModel,
    pub controller: ControllerConfig,
    pub reference: ReferenceSignal,
    /// Initial angle (rad).
    pub theta0: f64,
    /// Initial angular velocity (rad/s).
    pub theta_dot0: f64,
    /// Integration and control step (s).
    pub dt: f64,
    /// Horizon (s).
    pub t_final: f64,
    /// Free-text tag carried into outputs.
    pub label: String,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            plant: PendulumParams::default(),
            model: None,
            disturbance: DisturbanceModel::None,
            controller: ControllerConfig::default(),
            reference: ReferenceSignal::constant(0.0),
            theta0: 0.2,
            theta_dot0: 0.0,
            dt: 1e-3,
            t_final: 10.0,
            label: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Plant(ParamError),
    Controller(ControllerError),
    GridInvalid { dt: f64, t_final: f64 },
    TooManySteps { steps: f64 },
    InitialStateNotFinite,
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioError::Plant(e) => write!(f, "{e}"),
            ScenarioError::Controller(e) => write!(f, "{e}"),
            ScenarioError::GridInvalid { dt, t_final } => {
                write!(f, "grid invalid: need dt > 0 and t_final >= dt, got sim.dt = {dt}, sim.t_final = {t_final}")
            }
            ScenarioError::TooManySteps { steps } => {
                write!(
                    f,
                    "t_final/dt = {steps} exceeds the {MAX_STEPS:.0}-step sanity bound"
                )
            }
            ScenarioError::InitialStateNotFinite => {
                write!(f, "sim.theta0 / sim.theta_dot0 must be finite")
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<ParamError> for ScenarioError {
    fn from(e: ParamError) -> Self {
        ScenarioError::Plant(e)
    }
}

impl From<ControllerError> for ScenarioError {
    fn from(e: ControllerError) -> Self {
        ScenarioError::Controller(e)
    }
}

impl Scenario {
    /// Parameters the controller uses for its f/g inversion.
    pub fn controller_model(&self) -> &PendulumParams {
        self.model.as_ref().unwrap_or(&self.plant)
    }

    /// Number of integration steps (records = steps + 1).
    pub fn step_count(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.plant.validate()?;
        if let Some(model) = &self.model {
            model.validate()?;
        }
        self.disturbance.validate()?;
        self.controller.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0)
            || !(self.t_final.is_finite() && self.t_final >= self.dt)
        {
            return Err(ScenarioError::GridInvalid {
                dt: self.dt,
                t_final: self.t_final,
            });
        }
        let steps = self.t_final / self.dt;
        if steps > MAX_STEPS {
            return Err(ScenarioError::TooManySteps { steps });
        }
        if !(self.theta0.is_finite() && self.theta_dot0.is_finite()) {
            return Err(ScenarioError::InitialStateNotFinite);
        }
        Ok(())
    }
}

/// One grid point of a closed-loop trace: every signal needed to reproduce
/// the response plots and the metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub theta_ref: f64,
    pub e: f64,
    pub e_dot: f64,
    pub e_int: f64,
    pub s_pd: f64,
    pub s_pi: f64,
    pub s_pi_dot: f64,
    pub u_pd: f64,
    pub u_pi: f64,
    pub u_total: f64,
    pub d: f64,
    pub guard: bool,
}

impl TraceRecord {
    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.theta,
            self.theta_dot,
            self.theta_ref,
            self.e,
            self.e_dot,
            self.e_int,
            self.s_pd,
            self.s_pi,
            self.s_pi_dot,
            self.u_pd,
            self.u_pi,
            self.u_total,
            self.d,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Integration abort: a non-finite value appeared.
#[derive(Debug, Clone, PartialEq)]
pub struct NonFiniteState {
    /// Index of the step that produced the bad value.
    pub step: usize,
    pub time: f64,
    pub detail: String,
}

impl std::fmt::Display for NonFiniteState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "non-finite state at step {} (t = {}): {}",
            self.step, self.time, self.detail
        )
    }
}

impl std::error::Error for NonFiniteState {}

/// A completed (or aborted) run. When `failure` is set the records hold the
/// partial trace up to the failing step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub scenario: Scenario,
    pub records: Vec<TraceRecord>,
    pub failure: Option<NonFiniteState>,
}

impl Trace {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

/// One classical RK4 step of the 2-state ODE `y' = deriv(t, y)`.
///
/// `y = [theta, theta_dot]`; any held inputs (control, disturbance) are
/// captured inside `deriv`. Errors if any stage or the result is non-finite.
pub fn rk4_step<F>(deriv: F, y: [f64; 2], t: f64, dt: f64) -> Result<[f64; 2], String>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let stage_ok = |k: &[f64; 2], name: &str| -> Result<(), String> {
        if k[0].is_finite() && k[1].is_finite() {
            Ok(())
        } else {
            Err(format!("RK4 stage {name} produced {:?}", k))
        }
    };
    let half = 0.5 * dt;
    let k1 = deriv(t, y);
    stage_ok(&k1, "k1")?;
    let k2 = deriv(t + half, [y[0] + half * k1[0], y[1] + half * k1[1]]);
    stage_ok(&k2, "k2")?;
    let k3 = deriv(t + half, [y[0] + half * k2[0], y[1] + half * k2[1]]);
    stage_ok(&k3, "k3")?;
    let k4 = deriv(t + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
    stage_ok(&k4, "k4")?;
    let sixth = dt / 6.0;
    let out = [
        y[0] + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ];
    stage_ok(&out, "result")?;
    Ok(out)
}

/// Runs the closed loop on the scenario's grid.
///
/// Configuration problems surface as `Err`; a non-finite state mid-run yields
/// `Ok` with the partial trace and `failure` set. Identical scenarios produce
/// bit-identical traces on the same build.
pub fn run_scenario(scenario: &Scenario) -> Result<Trace, ScenarioError> {
    scenario.validate()?;
    let mut controller = Controller::new(scenario.controller, *scenario.controller_model())?;

    let steps = scenario.step_count();
    let dt = scenario.dt;
    let reference = scenario.reference;
    let mut records = Vec::with_capacity(steps + 1);
    let mut failure = None;

    let mut theta = scenario.theta0;
    let mut theta_dot = scenario.theta_dot0;
    let mut e_int = 0.0;

    for i in 0..=steps {
        let t = i as f64 * dt;
        let state = PlantState::new(theta, theta_dot, t);
        let e = reference.theta_ref - theta;
        let e_dot = reference.theta_ref_dot - theta_dot;
        let err = TrackingError::new(e, e_dot, e_int);
        let out = controller.compute(&state, &reference, &err);
        let d = eval_disturbance(&scenario.disturbance, t);

        let record = TraceRecord {
            t,
            theta,
            theta_dot,
            theta_ref: reference.theta_ref,
            e,
            e_dot,
            e_int,
            s_pd: out.s_pd,
            s_pi: out.s_pi,
            s_pi_dot: out.s_pi_dot,
            u_pd: out.u_pd,
            u_pi: out.u_pi,
            u_total: out.u_total,
            d,
            guard: out.guard_active,
        };
        if !record.is_finite() {
            failure = Some(NonFiniteState {
                step: i,
                time: t,
                detail: "trace record contains a non-finite value".to_string(),
            });
            records.push(record);
            break;
        }
        records.push(record);

        if i == steps {
            break;
        }

        // Control and disturbance held across the step.
        let plant = scenario.plant;
        let u = out.u_total;
        let deriv = |time: f64, y: [f64; 2]| {
            let s = PlantState::new(y[0], y[1], time);
            [y[1], acceleration(&plant, &s, u, d)]
        };
        match rk4_step(deriv, [theta, theta_dot], t, dt) {
            Ok([next_theta, next_theta_dot]) => {
                let e_next = reference.theta_ref - next_theta;
                e_int += dt * (e + e_next) / 2.0;
                theta = next_theta;
                theta_dot = next_theta_dot;
            }
            Err(detail) => {
                failure = Some(NonFiniteState {
                    step: i,
                    time: t,
                    detail,
                });
                break;
            }
        }
    }

    Ok(Trace {
        scenario: scenario.clone(),
        records,
        failure,
    })
}
