//! Scalar performance metrics over a trace, and ordered comparison between
//! runs that differ only in controller kind/switching.
//!
//! Chattering is measured on the controller output `u_total` (total variation
//! and strict sign changes of its increments), not on the plant output.

use std::cmp::Ordering;

use crate::simulator::{Scenario, Trace};

/// Default tolerance below which a surface counts as converged.
pub const DEFAULT_S_TOL: f64 = 1e-3;
/// Default settling band as a fraction of the initial error magnitude.
pub const DEFAULT_BAND_PCT: f64 = 0.02;

/// Scalar summary of one closed-loop run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Peak excursion beyond the reference against the initial error sign,
    /// in percent of |e0|. Absent when e0 = 0 (degenerate start).
    pub overshoot_pct: Option<f64>,
    /// Earliest time after which |e| stays within the band forever.
    /// Absent when not settled by the end of the horizon or when e0 = 0.
    pub settling_time: Option<f64>,
    /// Mean |e| over the final 10% of the horizon (rad).
    pub sse: f64,
    /// First time |s_pd| drops below s_tol and stays there.
    pub conv_time_s_pd: Option<f64>,
    /// First time |s_pi| drops below s_tol and stays there.
    pub conv_time_s_pi: Option<f64>,
    /// Total variation of u_total.
    pub chatter_tv: f64,
    /// Strict sign changes of consecutive u_total increments.
    pub chatter_switches: u64,
    /// Fraction of records with the singularity guard active.
    pub guard_fraction: f64,
    /// e0 = 0: overshoot and settling are undefined.
    pub degenerate_start: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    EmptyTrace,
    /// The run aborted on a non-finite state; metrics would be meaningless.
    FailedTrace,
    /// Record times are not strictly increasing.
    NonMonotonicTime {
        index: usize,
    },
    /// Compared scenarios differ in more than controller kind/switching.
    IncomparableScenarios {
        what: &'static str,
    },
}

impl std::fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalysisError::EmptyTrace => write!(f, "trace has no records"),
            AnalysisError::FailedTrace => write!(f, "trace is flagged failed"),
            AnalysisError::NonMonotonicTime { index } => {
                write!(f, "record times not strictly increasing at index {index}")
            }
            AnalysisError::IncomparableScenarios { what } => {
                write!(
                    f,
                    "scenarios differ in {what}; only controller kind/switch may differ"
                )
            }
        }
    }
}

impl std::error::Error for AnalysisError {}

/// Computes all metrics of a finished trace.
///
/// `s_tol` is the convergence tolerance on the surfaces, `band_pct` the
/// settling band as a fraction of |e0| (e.g. 0.02 for the 2% band).
pub fn compute_metrics(trace: &Trace, s_tol: f64, band_pct: f64) -> Result<Metrics, AnalysisError> {
    if trace.failed() {
        return Err(AnalysisError::FailedTrace);
    }
    let records = &trace.records;
    if records.is_empty() {
        return Err(AnalysisError::EmptyTrace);
    }
    for i in 1..records.len() {
        // Strictly increasing; NaN timestamps fail the comparison too.
        if records[i].t.partial_cmp(&records[i - 1].t) != Some(Ordering::Greater) {
            return Err(AnalysisError::NonMonotonicTime { index: i });
        }
    }

    let e0 = records[0].e;
    let degenerate_start = e0 == 0.0;

    let overshoot_pct = if degenerate_start {
        None
    } else {
        let against = -e0.signum();
        let peak = records
            .iter()
            .map(|r| against * r.e)
            .fold(f64::NEG_INFINITY, f64::max);
        Some(100.0 * peak.max(0.0) / e0.abs())
    };

    // Earliest time after which the signal never leaves the band again:
    // scan for the last out-of-band record.
    let settling_time = if degenerate_start {
        None
    } else {
        let band = band_pct * e0.abs();
        last_violation(records.iter().map(|r| r.e.abs() > band))
            .map(|last| {
                if last + 1 < records.len() {
                    Some(records[last + 1].t)
                } else {
                    None // never settled
                }
            })
            .unwrap_or(Some(records[0].t))
    };

    let conv_time = |values: Vec<f64>| -> Option<f64> {
        last_violation(values.iter().map(|s| s.abs() >= s_tol))
            .map(|last| {
                if last + 1 < records.len() {
                    Some(records[last + 1].t)
                } else {
                    None
                }
            })
            .unwrap_or(Some(records[0].t))
    };
    let conv_time_s_pd = conv_time(records.iter().map(|r| r.s_pd).collect());
    let conv_time_s_pi = conv_time(records.iter().map(|r| r.s_pi).collect());

    let mut chatter_tv = 0.0;
    let mut chatter_switches = 0u64;
    let mut prev_delta = 0.0;
    for i in 1..records.len() {
        let delta = records[i].u_total - records[i - 1].u_total;
        chatter_tv += delta.abs();
        if i > 1 && delta * prev_delta < 0.0 {
            chatter_switches += 1;
        }
        prev_delta = delta;
    }

    let guard_count = records.iter().filter(|r| r.guard).count();
    let guard_fraction = guard_count as f64 / records.len() as f64;

    // Mean |e| over the trailing 10% of records (at least one).
    let tail = (records.len() / 10).max(1);
    let sse = records[records.len() - tail..]
        .iter()
        .map(|r| r.e.abs())
        .sum::<f64>()
        / tail as f64;

    Ok(Metrics {
        overshoot_pct,
        settling_time,
        sse,
        conv_time_s_pd,
        conv_time_s_pi,
        chatter_tv,
        chatter_switches,
        guard_fraction,
        degenerate_start,
    })
}

/// Index of the last record for which `violated` is true, or None when the
/// predicate never fires.
fn last_violation(violated: impl Iterator<Item = bool>) -> Option<usize> {
    let mut last = None;
    for (i, v) in violated.enumerate() {
        if v {
            last = Some(i);
        }
    }
    last
}

/// Per-metric ordering of run `a` against run `b` (`Less` means a < b).
/// Optional entries are absent when either side does not define the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComparisonReport {
    pub overshoot_pct: Option<Ordering>,
    pub settling_time: Option<Ordering>,
    pub sse: Ordering,
    pub conv_time_s_pd: Option<Ordering>,
    pub conv_time_s_pi: Option<Ordering>,
    pub chatter_tv: Ordering,
    pub chatter_switches: Ordering,
    pub guard_fraction: Ordering,
}

/// Orders each metric of `a` against `b` after checking that both runs came
/// from the same experiment up to controller kind and switching element.
pub fn compare(
    a: (&Scenario, &Metrics),
    b: (&Scenario, &Metrics),
) -> Result<ComparisonReport, AnalysisError> {
    check_comparable(a.0, b.0)?;
    let (ma, mb) = (a.1, b.1);
    let ord = |x: f64, y: f64| x.partial_cmp(&y).unwrap_or(Ordering::Equal);
    let opt_ord = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => Some(ord(x, y)),
        _ => None,
    };
    Ok(ComparisonReport {
        overshoot_pct: opt_ord(ma.overshoot_pct, mb.overshoot_pct),
        settling_time: opt_ord(ma.settling_time, mb.settling_time),
        sse: ord(ma.sse, mb.sse),
        conv_time_s_pd: opt_ord(ma.conv_time_s_pd, mb.conv_time_s_pd),
        conv_time_s_pi: opt_ord(ma.conv_time_s_pi, mb.conv_time_s_pi),
        chatter_tv: ord(ma.chatter_tv, mb.chatter_tv),
        chatter_switches: ma.chatter_switches.cmp(&mb.chatter_switches),
        guard_fraction: ord(ma.guard_fraction, mb.guard_fraction),
    })
}

fn check_comparable(a: &Scenario, b: &Scenario) -> Result<(), AnalysisError> {
    let differ = |what: &'static str| AnalysisError::IncomparableScenarios { what };
    if a.plant != b.plant || a.model != b.model {
        return Err(differ("plant parameters"));
    }
    if a.disturbance != b.disturbance {
        return Err(differ("disturbance"));
    }
    if a.reference != b.reference {
        return Err(differ("reference"));
    }
    if a.theta0 != b.theta0 || a.theta_dot0 != b.theta_dot0 {
        return Err(differ("initial state"));
    }
    if a.dt != b.dt || a.t_final != b.t_final {
        return Err(differ("integration grid"));
    }
    // Controllers must match up to kind and switching element.
    let mask = |s: &Scenario| {
        let mut c = s.controller;
        c.kind = crate::controller::ControllerKind::Combined;
        c.reaching_first.switch = crate::reaching::SwitchKind::Sign;
        c.reaching_second.switch = crate::reaching::SwitchKind::Sign;
        c
    };
    if mask(a) != mask(b) {
        return Err(differ("controller gains"));
    }
    Ok(())
}
