//! Flat key=value scenario configuration.
//!
//! One `key = value` pair per line; `#` starts a comment; keys are namespaced
//! (`plant.mass_m`, `controller.kind`, `reaching2.k1`, `sim.dt`). Values are
//! decimal numbers, bare enum tokens, or quoted strings (`sim.label` only).
//! Unknown and duplicate keys are errors. Missing keys take the defaults of
//! [`Scenario::default`]. The same grammar is reused for the metrics report
//! sidecar.
//!
//! The optional `model.*` group pins the plant parameters the controller
//! inverts; when absent the controller uses the true plant. Setting `model.*`
//! to nominal values while perturbing `plant.*` exercises robustness to
//! parametric mismatch.

use crate::analysis::Metrics;
use crate::controller::{ControllerKind, ReferenceSignal};
use crate::plant::{DisturbanceModel, PendulumParams};
use crate::reaching::SwitchKind;
use crate::simulator::{Scenario, ScenarioError};

/// Every key the grammar accepts, with a marker for sweepable numeric keys.
const KEYS: &[(&str, ValueKind)] = &[
    ("plant.mass_m", ValueKind::Number),
    ("plant.length_l", ValueKind::Number),
    ("plant.inertia_i", ValueKind::Number),
    ("plant.gravity_g", ValueKind::Number),
    ("plant.g_min", ValueKind::Number),
    ("model.mass_m", ValueKind::Number),
    ("model.length_l", ValueKind::Number),
    ("model.inertia_i", ValueKind::Number),
    ("model.gravity_g", ValueKind::Number),
    ("model.g_min", ValueKind::Number),
    (
        "disturbance.kind",
        ValueKind::Token(&["none", "step", "sinusoid"]),
    ),
    ("disturbance.amplitude", ValueKind::Number),
    ("disturbance.onset_time", ValueKind::Number),
    ("disturbance.frequency", ValueKind::Number),
    (
        "controller.kind",
        ValueKind::Token(&["pd_smc", "pi2_smc", "combined"]),
    ),
    ("controller.pd_weight", ValueKind::Number),
    ("controller.u_max", ValueKind::Number),
    ("surface.kp", ValueKind::Number),
    ("surface.ki", ValueKind::Number),
    ("surface.kd", ValueKind::Number),
    ("surface.lambda", ValueKind::Number),
    ("reaching1.k1", ValueKind::Number),
    ("reaching1.k2", ValueKind::Number),
    ("reaching1.eps1", ValueKind::Number),
    ("reaching1.eps2", ValueKind::Number),
    ("reaching1.alpha", ValueKind::Number),
    (
        "reaching1.switch",
        ValueKind::Token(&["sign", "saturation"]),
    ),
    ("reaching1.delta", ValueKind::Number),
    ("reaching2.k1", ValueKind::Number),
    ("reaching2.k2", ValueKind::Number),
    ("reaching2.eps1", ValueKind::Number),
    ("reaching2.eps2", ValueKind::Number),
    ("reaching2.alpha", ValueKind::Number),
    (
        "reaching2.switch",
        ValueKind::Token(&["sign", "saturation"]),
    ),
    ("reaching2.delta", ValueKind::Number),
    ("reference.kind", ValueKind::Token(&["constant"])),
    ("reference.theta_ref", ValueKind::Number),
    ("sim.theta0", ValueKind::Number),
    ("sim.theta_dot0", ValueKind::Number),
    ("sim.dt", ValueKind::Number),
    ("sim.t_final", ValueKind::Number),
    ("sim.label", ValueKind::QuotedString),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ValueKind {
    Number,
    Token(&'static [&'static str]),
    QuotedString,
}

fn kind_of(key: &str) -> Option<ValueKind> {
    KEYS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

/// True when `key` exists and holds a decimal number (sweepable).
pub fn is_numeric_key(key: &str) -> bool {
    matches!(kind_of(key), Some(ValueKind::Number))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax {
        line: usize,
        reason: String,
    },
    UnknownKey {
        line: usize,
        key: String,
    },
    DuplicateKey {
        line: usize,
        key: String,
    },
    BadValue {
        key: String,
        value: String,
        expected: String,
    },
    Scenario(ScenarioError),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Syntax { line, reason } => {
                write!(f, "config line {line}: {reason}")
            }
            ConfigError::UnknownKey { line, key } => {
                write!(f, "config line {line}: unknown key `{key}`")
            }
            ConfigError::DuplicateKey { line, key } => {
                write!(f, "config line {line}: duplicate key `{key}`")
            }
            ConfigError::BadValue {
                key,
                value,
                expected,
            } => {
                write!(
                    f,
                    "config key `{key}`: value `{value}` invalid, expected {expected}"
                )
            }
            ConfigError::Scenario(e) => write!(f, "config: {e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<ScenarioError> for ConfigError {
    fn from(e: ScenarioError) -> Self {
        ConfigError::Scenario(e)
    }
}

/// Parsed key=value pairs, order-preserving, unique keys.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: Vec<(String, String)>,
}

impl ConfigMap {
    /// Parses config text: syntax, key membership, and duplicates are checked
    /// here; value typing happens in [`ConfigMap::build`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = ConfigMap::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw_line);
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    reason: format!("expected key=value, got `{line}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if kind_of(key).is_none() {
                return Err(ConfigError::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                });
            }
            if map.get(key).is_some() {
                return Err(ConfigError::DuplicateKey {
                    line: line_no,
                    key: key.to_string(),
                });
            }
            map.entries.push((key.to_string(), value.to_string()));
        }
        Ok(map)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Inserts or replaces a pair; the key must be known.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if kind_of(key).is_none() {
            return Err(ConfigError::UnknownKey {
                line: 0,
                key: key.to_string(),
            });
        }
        if let Some(entry) = self.entries.iter_mut().find(|(k, _)| k == key) {
            entry.1 = value.to_string();
        } else {
            self.entries.push((key.to_string(), value.to_string()));
        }
        Ok(())
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.parse::<f64>() {
                Ok(parsed) if parsed.is_finite() => Ok(parsed),
                _ => Err(ConfigError::BadValue {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a finite decimal number".to_string(),
                }),
            },
        }
    }

    fn token(&self, key: &str, default: &'static str) -> Result<String, ConfigError> {
        let Some(ValueKind::Token(allowed)) = kind_of(key) else {
            unreachable!("token() called on non-token key");
        };
        match self.get(key) {
            None => Ok(default.to_string()),
            Some(v) if allowed.contains(&v) => Ok(v.to_string()),
            Some(v) => Err(ConfigError::BadValue {
                key: key.to_string(),
                value: v.to_string(),
                expected: format!("one of {}", allowed.join("|")),
            }),
        }
    }

    fn quoted(&self, key: &str, default: &str) -> Result<String, ConfigError> {
        match self.get(key) {
            None => Ok(default.to_string()),
            Some(v) => {
                let inner = v
                    .strip_prefix('"')
                    .and_then(|rest| rest.strip_suffix('"'))
                    .filter(|inner| !inner.contains('"'));
                inner
                    .map(str::to_string)
                    .ok_or_else(|| ConfigError::BadValue {
                        key: key.to_string(),
                        value: v.to_string(),
                        expected: "a double-quoted string without embedded quotes".to_string(),
                    })
            }
        }
    }

    fn params(
        &self,
        namespace: &str,
        base: &PendulumParams,
    ) -> Result<PendulumParams, ConfigError> {
        Ok(PendulumParams {
            mass_m: self.number(&format!("{namespace}.mass_m"), base.mass_m)?,
            length_l: self.number(&format!("{namespace}.length_l"), base.length_l)?,
            inertia_i: self.number(&format!("{namespace}.inertia_i"), base.inertia_i)?,
            gravity_g: self.number(&format!("{namespace}.gravity_g"), base.gravity_g)?,
            g_min: self.number(&format!("{namespace}.g_min"), base.g_min)?,
        })
    }

    /// Builds and validates a full scenario.
    pub fn build(&self) -> Result<Scenario, ConfigError> {
        let defaults = Scenario::default();
        let plant = self.params("plant", &defaults.plant)?;

        // Any model.* key activates the nominal-model override; unset fields
        // follow the configured plant.
        let has_model = self.entries.iter().any(|(k, _)| k.starts_with("model."));
        let model = if has_model {
            Some(self.params("model", &plant)?)
        } else {
            None
        };

        let disturbance = match self.token("disturbance.kind", "none")?.as_str() {
            "none" => DisturbanceModel::None,
            "step" => DisturbanceModel::Step {
                amplitude: self.number("disturbance.amplitude", 0.0)?,
                onset_time: self.number("disturbance.onset_time", 0.0)?,
            },
            "sinusoid" => DisturbanceModel::Sinusoid {
                amplitude: self.number("disturbance.amplitude", 0.0)?,
                frequency_hz: self.number("disturbance.frequency", 0.0)?,
            },
            _ => unreachable!(),
        };

        let mut controller = defaults.controller;
        controller.kind = match self.token("controller.kind", "combined")?.as_str() {
            "pd_smc" => ControllerKind::PdSmc,
            "pi2_smc" => ControllerKind::Pi2Smc,
            "combined" => ControllerKind::Combined,
            _ => unreachable!(),
        };
        controller.pd_weight = self.number("controller.pd_weight", controller.pd_weight)?;
        controller.u_max = self.number("controller.u_max", controller.u_max)?;
        controller.surface_gains.kp = self.number("surface.kp", controller.surface_gains.kp)?;
        controller.surface_gains.ki = self.number("surface.ki", controller.surface_gains.ki)?;
        controller.surface_gains.kd = self.number("surface.kd", controller.surface_gains.kd)?;
        controller.surface_gains.lambda =
            self.number("surface.lambda", controller.surface_gains.lambda)?;

        for (namespace, reaching) in [
            ("reaching1", &mut controller.reaching_first),
            ("reaching2", &mut controller.reaching_second),
        ] {
            reaching.k1 = self.number(&format!("{namespace}.k1"), reaching.k1)?;
            reaching.k2 = self.number(&format!("{namespace}.k2"), reaching.k2)?;
            reaching.eps1 = self.number(&format!("{namespace}.eps1"), reaching.eps1)?;
            reaching.eps2 = self.number(&format!("{namespace}.eps2"), reaching.eps2)?;
            reaching.alpha = self.number(&format!("{namespace}.alpha"), reaching.alpha)?;
            reaching.delta = self.number(&format!("{namespace}.delta"), reaching.delta)?;
            reaching.switch = match self
                .token(
                    match namespace {
                        "reaching1" => "reaching1.switch",
                        _ => "reaching2.switch",
                    },
                    "sign",
                )?
                .as_str()
            {
                "sign" => SwitchKind::Sign,
                "saturation" => SwitchKind::Saturation,
                _ => unreachable!(),
            };
        }

        self.token("reference.kind", "constant")?;
        let reference = ReferenceSignal::constant(
            self.number("reference.theta_ref", defaults.reference.theta_ref)?,
        );

        let scenario = Scenario {
            plant,
            model,
            disturbance,
            controller,
            reference,
            theta0: self.number("sim.theta0", defaults.theta0)?,
            theta_dot0: self.number("sim.theta_dot0", defaults.theta_dot0)?,
            dt: self.number("sim.dt", defaults.dt)?,
            t_final: self.number("sim.t_final", defaults.t_final)?,
            label: self.quoted("sim.label", &defaults.label)?,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn strip_comment(line: &str) -> &str {
    // A # inside the quoted label value does not start a comment.
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Parses config text directly into a validated scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    ConfigMap::parse(text)?.build()
}

fn fmt_f64(v: f64) -> String {
    // `{}` prints the shortest decimal that round-trips the exact f64.
    format!("{v}")
}

/// Serializes every scenario field back to the key=value grammar.
/// Reparsing the output reproduces the scenario exactly.
pub fn scenario_to_config(s: &Scenario) -> String {
    let mut out = String::new();
    let mut push = |key: &str, value: String| {
        out.push_str(key);
        out.push('=');
        out.push_str(&value);
        out.push('\n');
    };

    push("plant.mass_m", fmt_f64(s.plant.mass_m));
    push("plant.length_l", fmt_f64(s.plant.length_l));
    push("plant.inertia_i", fmt_f64(s.plant.inertia_i));
    push("plant.gravity_g", fmt_f64(s.plant.gravity_g));
    push("plant.g_min", fmt_f64(s.plant.g_min));
    if let Some(model) = &s.model {
        push("model.mass_m", fmt_f64(model.mass_m));
        push("model.length_l", fmt_f64(model.length_l));
        push("model.inertia_i", fmt_f64(model.inertia_i));
        push("model.gravity_g", fmt_f64(model.gravity_g));
        push("model.g_min", fmt_f64(model.g_min));
    }
    match s.disturbance {
        DisturbanceModel::None => push("disturbance.kind", "none".to_string()),
        DisturbanceModel::Step {
            amplitude,
            onset_time,
        } => {
            push("disturbance.kind", "step".to_string());
            push("disturbance.amplitude", fmt_f64(amplitude));
            push("disturbance.onset_time", fmt_f64(onset_time));
        }
        DisturbanceModel::Sinusoid {
            amplitude,
            frequency_hz,
        } => {
            push("disturbance.kind", "sinusoid".to_string());
            push("disturbance.amplitude", fmt_f64(amplitude));
            push("disturbance.frequency", fmt_f64(frequency_hz));
        }
    }
    push("controller.kind", s.controller.kind.token().to_string());
    push("controller.pd_weight", fmt_f64(s.controller.pd_weight));
    push("controller.u_max", fmt_f64(s.controller.u_max));
    push("surface.kp", fmt_f64(s.controller.surface_gains.kp));
    push("surface.ki", fmt_f64(s.controller.surface_gains.ki));
    push("surface.kd", fmt_f64(s.controller.surface_gains.kd));
    push("surface.lambda", fmt_f64(s.controller.surface_gains.lambda));
    for (namespace, reaching) in [
        ("reaching1", &s.controller.reaching_first),
        ("reaching2", &s.controller.reaching_second),
    ] {
        push(&format!("{namespace}.k1"), fmt_f64(reaching.k1));
        push(&format!("{namespace}.k2"), fmt_f64(reaching.k2));
        push(&format!("{namespace}.eps1"), fmt_f64(reaching.eps1));
        push(&format!("{namespace}.eps2"), fmt_f64(reaching.eps2));
        push(&format!("{namespace}.alpha"), fmt_f64(reaching.alpha));
        push(
            &format!("{namespace}.switch"),
            match reaching.switch {
                SwitchKind::Sign => "sign".to_string(),
                SwitchKind::Saturation => "saturation".to_string(),
            },
        );
        push(&format!("{namespace}.delta"), fmt_f64(reaching.delta));
    }
    push("reference.kind", "constant".to_string());
    push("reference.theta_ref", fmt_f64(s.reference.theta_ref));
    push("sim.theta0", fmt_f64(s.theta0));
    push("sim.theta_dot0", fmt_f64(s.theta_dot0));
    push("sim.dt", fmt_f64(s.dt));
    push("sim.t_final", fmt_f64(s.t_final));
    push("sim.label", format!("\"{}\"", s.label));
    out
}

fn opt_f64(v: Option<f64>) -> String {
    match v {
        Some(v) => fmt_f64(v),
        None => "none".to_string(),
    }
}

/// Metrics as a key=value block (same grammar as configs).
pub fn metrics_to_report(m: &Metrics) -> String {
    let mut out = String::new();
    let mut push = |key: &str, value: String| {
        out.push_str(key);
        out.push('=');
        out.push_str(&value);
        out.push('\n');
    };
    push("overshoot_pct", opt_f64(m.overshoot_pct));
    push("settling_time", opt_f64(m.settling_time));
    push("sse", fmt_f64(m.sse));
    push("conv_time_s_pd", opt_f64(m.conv_time_s_pd));
    push("conv_time_s_pi", opt_f64(m.conv_time_s_pi));
    push("chatter_tv", fmt_f64(m.chatter_tv));
    push("chatter_switches", m.chatter_switches.to_string());
    push("guard_fraction", fmt_f64(m.guard_fraction));
    push("degenerate_start", m.degenerate_start.to_string());
    out
}
