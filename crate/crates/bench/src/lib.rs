//! Shared scenario builders for the benchmarks.

use pendsim_core::{ControllerKind, Scenario, SwitchKind};

/// Default stabilization scenario with boundary-layer switching and a short
/// horizon suitable for iteration timing.
pub fn bench_scenario(kind: ControllerKind, t_final: f64) -> Scenario {
    let mut scenario = Scenario::default();
    scenario.controller.kind = kind;
    scenario.controller.reaching_first.switch = SwitchKind::Saturation;
    scenario.controller.reaching_second.switch = SwitchKind::Saturation;
    scenario.t_final = t_final;
    scenario
}
