//! Deterministic simulation toolkit for sliding-mode stabilization of the
//! nonlinear inverted pendulum.
//!
//! The crate is organized around the closed-loop pipeline:
//!
//! * [`plant`]: the control-affine pendulum dynamics and disturbances
//! * [`surface`]: classical, PI, and PD sliding surfaces
//! * [`reaching`]: first- and second-order power-rate reaching laws and the
//!   sign/saturation switching element
//! * [`controller`]: the PD-SMC, PI second-order SMC, and combined control
//!   laws with singularity guarding
//! * [`simulator`]: fixed-step RK4 closed-loop integration producing full
//!   per-step traces
//! * [`analysis`]: scalar performance metrics (overshoot, settling,
//!   chattering, guard activity) and scenario comparison
//! * [`config`]: the flat key=value scenario grammar
//! * [`trace_csv`]: the trace CSV schema
//!
//! Everything is pure `f64` arithmetic with no hidden state or randomness:
//! identical scenarios produce bit-identical traces on the same build.
//!
//! ```
//! use pendsim_core::{compute_metrics, run_scenario, Scenario, SwitchKind};
//!
//! // Stabilize from 0.2 rad with boundary-layer switching.
//! let mut scenario = Scenario::default();
//! scenario.controller.reaching_first.switch = SwitchKind::Saturation;
//! scenario.controller.reaching_second.switch = SwitchKind::Saturation;
//!
//! let trace = run_scenario(&scenario).unwrap();
//! let metrics = compute_metrics(&trace, 1e-3, 0.02).unwrap();
//! assert!(metrics.settling_time.unwrap() < 5.0);
//! assert!(metrics.overshoot_pct.unwrap() < 5.0);
//! ```

pub mod analysis;
pub mod config;
pub mod controller;
pub mod plant;
pub mod reaching;
pub mod simulator;
pub mod surface;
pub mod trace_csv;

pub use analysis::{compare, compute_metrics, AnalysisError, ComparisonReport, Metrics};
pub use config::{parse_scenario, scenario_to_config, ConfigError};
pub use controller::{
    pd_control_law, pi2_control_law, ControlDecomposition, Controller, ControllerConfig,
    ControllerKind, ReferenceSignal,
};
pub use plant::{
    acceleration, eval_disturbance, eval_f, eval_g, DisturbanceModel, PendulumParams, PlantState,
};
pub use reaching::{
    first_order_rate, reaching_time_bound, second_order_rate, switch_fn, ReachingParams, SwitchKind,
};
pub use simulator::{rk4_step, run_scenario, NonFiniteState, Scenario, Trace, TraceRecord};
pub use surface::{
    classical_surface, pd_surface, pi_surface, SurfaceGains, SurfaceValue, TrackingError,
};
pub use trace_csv::{parse_trace_csv, write_trace_csv, TRACE_CSV_HEADER};

#[cfg(test)]
pub(crate) mod testutil {
    /// Tiny deterministic generator for sampled-property tests.
    pub struct SplitMix64(u64);

    impl SplitMix64 {
        pub fn new(seed: u64) -> Self {
            Self(seed)
        }

        pub fn next_u64(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }

        /// Uniform in [0, 1).
        pub fn next_f64(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
        }

        pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * self.next_f64()
        }
    }
}
