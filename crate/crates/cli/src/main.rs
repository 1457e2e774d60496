//! Command-line front end for the pendulum sliding-mode simulator.
//!
//! Subcommands:
//!   simulate  one scenario -> trace CSV + metrics sidecar
//!   compare   the three controller kinds on one scenario -> CSVs + verdicts
//!   sweep     one numeric config key over a value list -> summary table
//!
//! Exit codes: 0 success (compare: all verdicts hold), 1 runtime failure or
//! failed verdict, 2 configuration/usage error, 3 non-finite simulation state.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use pendsim_core::analysis::{compare, compute_metrics, Metrics, DEFAULT_BAND_PCT, DEFAULT_S_TOL};
use pendsim_core::config::{is_numeric_key, metrics_to_report, ConfigMap};
use pendsim_core::controller::ControllerKind;
use pendsim_core::simulator::{run_scenario, Scenario, Trace};
use pendsim_core::trace_csv::write_trace_csv;

const EXIT_RUNTIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NON_FINITE: u8 = 3;

fn usage() -> &'static str {
    "\
pendsim - sliding-mode inverted-pendulum simulator

USAGE:
  pendsim simulate --config <path> --out <path>
  pendsim compare  --config <path> --out-dir <dir>
  pendsim sweep    --config <path> --key <key> --values <v1,v2,...> [--jobs N]
  pendsim --help

SUBCOMMANDS:
  simulate  Run one scenario; write the trace CSV to <path> and the metrics
            report to <path>.metrics.
  compare   Run the pd_smc, pi2_smc and combined controllers on the otherwise
            identical scenario; write one CSV + metrics per controller and a
            compare.report with the hierarchy verdicts into <dir>.
            Exits 0 only if every verdict holds.
  sweep     Re-run the scenario once per value of a numeric config key and
            print a metrics summary table. --jobs N runs scenarios on N
            worker threads (default 1); output order is always input order.

CONFIG:
  Flat key=value lines, `#` comments. Unknown keys are errors; missing keys
  take built-in defaults. Keys: plant.* model.* disturbance.* controller.*
  surface.* reaching1.* reaching2.* reference.* sim.*  (see README).

EXIT CODES:
  0  success / all verdicts hold
  1  runtime error or failed verdict
  2  invalid arguments or configuration
  3  simulation produced a non-finite state
"
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{}", usage());
        return ExitCode::SUCCESS;
    }
    let Some(command) = args.first() else {
        eprint!("{}", usage());
        return ExitCode::from(EXIT_CONFIG);
    };
    let rest = &args[1..];
    match command.as_str() {
        "simulate" => cmd_simulate(rest),
        "compare" => cmd_compare(rest),
        "sweep" => cmd_sweep(rest),
        other => {
            eprintln!("unknown subcommand `{other}`\n");
            eprint!("{}", usage());
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

/// Pulls `--name value` pairs out of `args`; returns None on stray tokens.
fn parse_flags<'a>(args: &'a [String], allowed: &[&str]) -> Option<Vec<(&'a str, &'a str)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let name = flag.strip_prefix("--")?;
        if !allowed.contains(&name) {
            return None;
        }
        let value = it.next()?;
        out.push((name, value.as_str()));
    }
    Some(out)
}

fn flag_value<'a>(flags: &[(&'a str, &'a str)], name: &str) -> Option<&'a str> {
    flags.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
}

fn load_config(path: &str) -> Result<ConfigMap, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("cannot read config `{path}`: {e}");
        EXIT_CONFIG
    })?;
    ConfigMap::parse(&text).map_err(|e| {
        eprintln!("{e}");
        EXIT_CONFIG
    })
}

fn run_checked(scenario: &Scenario) -> Result<Trace, u8> {
    let trace = run_scenario(scenario).map_err(|e| {
        eprintln!("{e}");
        EXIT_CONFIG
    })?;
    if let Some(failure) = &trace.failure {
        eprintln!("{failure}");
        return Err(EXIT_NON_FINITE);
    }
    Ok(trace)
}

fn write_file(path: &Path, contents: &str) -> Result<(), u8> {
    std::fs::write(path, contents).map_err(|e| {
        eprintln!("cannot write `{}`: {e}", path.display());
        EXIT_RUNTIME
    })
}

fn trace_metrics(trace: &Trace) -> Result<Metrics, u8> {
    compute_metrics(trace, DEFAULT_S_TOL, DEFAULT_BAND_PCT).map_err(|e| {
        eprintln!("{e}");
        EXIT_RUNTIME
    })
}

fn exit_from(code: u8) -> ExitCode {
    ExitCode::from(code)
}

fn cmd_simulate(args: &[String]) -> ExitCode {
    let Some(flags) = parse_flags(args, &["config", "out"]) else {
        eprint!("{}", usage());
        return exit_from(EXIT_CONFIG);
    };
    let (Some(config_path), Some(out_path)) =
        (flag_value(&flags, "config"), flag_value(&flags, "out"))
    else {
        eprintln!("simulate requires --config and --out\n");
        return exit_from(EXIT_CONFIG);
    };

    match simulate_to(config_path, Path::new(out_path)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => exit_from(code),
    }
}

fn simulate_to(config_path: &str, out_path: &Path) -> Result<(), u8> {
    let map = load_config(config_path)?;
    let scenario = map.build().map_err(|e| {
        eprintln!("{e}");
        EXIT_CONFIG
    })?;
    let trace = match run_scenario(&scenario) {
        Ok(trace) => trace,
        Err(e) => {
            eprintln!("{e}");
            return Err(EXIT_CONFIG);
        }
    };
    // A partial trace is still written so the failure can be inspected.
    write_file(out_path, &write_trace_csv(&trace))?;
    if let Some(failure) = &trace.failure {
        eprintln!("{failure}");
        return Err(EXIT_NON_FINITE);
    }
    let metrics = trace_metrics(&trace)?;
    let sidecar = sidecar_path(out_path);
    write_file(&sidecar, &metrics_to_report(&metrics))?;
    Ok(())
}

fn sidecar_path(out_path: &Path) -> PathBuf {
    let mut name = out_path.file_name().unwrap_or_default().to_os_string();
    name.push(".metrics");
    out_path.with_file_name(name)
}

struct CompareRun {
    kind: ControllerKind,
    scenario: Scenario,
    metrics: Metrics,
}

fn cmd_compare(args: &[String]) -> ExitCode {
    let Some(flags) = parse_flags(args, &["config", "out-dir"]) else {
        eprint!("{}", usage());
        return exit_from(EXIT_CONFIG);
    };
    let (Some(config_path), Some(out_dir)) =
        (flag_value(&flags, "config"), flag_value(&flags, "out-dir"))
    else {
        eprintln!("compare requires --config and --out-dir\n");
        return exit_from(EXIT_CONFIG);
    };
    match compare_to(config_path, Path::new(out_dir)) {
        Ok(all_hold) => {
            if all_hold {
                ExitCode::SUCCESS
            } else {
                exit_from(EXIT_RUNTIME)
            }
        }
        Err(code) => exit_from(code),
    }
}

fn compare_to(config_path: &str, out_dir: &Path) -> Result<bool, u8> {
    let mut map = load_config(config_path)?;
    std::fs::create_dir_all(out_dir).map_err(|e| {
        eprintln!("cannot create `{}`: {e}", out_dir.display());
        EXIT_RUNTIME
    })?;

    let mut runs = Vec::new();
    let mut theta0 = 0.0;
    for kind in [
        ControllerKind::PdSmc,
        ControllerKind::Pi2Smc,
        ControllerKind::Combined,
    ] {
        map.set("controller.kind", kind.token()).expect("known key");
        let scenario = map.build().map_err(|e| {
            eprintln!("{e}");
            EXIT_CONFIG
        })?;
        theta0 = scenario.theta0;
        let trace = run_checked(&scenario)?;
        let metrics = trace_metrics(&trace)?;
        write_file(
            &out_dir.join(format!("{}.csv", kind.token())),
            &write_trace_csv(&trace),
        )?;
        write_file(
            &out_dir.join(format!("{}.csv.metrics", kind.token())),
            &metrics_to_report(&metrics),
        )?;
        runs.push(CompareRun {
            kind,
            scenario,
            metrics,
        });
    }

    let by_kind =
        |kind: ControllerKind| runs.iter().find(|r| r.kind == kind).expect("all kinds ran");
    let pd = by_kind(ControllerKind::PdSmc);
    let pi = by_kind(ControllerKind::Pi2Smc);
    let combined = by_kind(ControllerKind::Combined);

    // Orderings come from the analysis comparison (which also checks that
    // the runs really differ only in controller kind).
    let ordering = |a: &CompareRun, b: &CompareRun| {
        compare((&a.scenario, &a.metrics), (&b.scenario, &b.metrics)).map_err(|e| {
            eprintln!("{e}");
            EXIT_RUNTIME
        })
    };
    let combined_vs_pi = ordering(combined, pi)?;
    let pi_vs_pd = ordering(pi, pd)?;

    // The paper-hierarchy verdicts. A degenerate start (e0 = 0) never leaves
    // equilibrium, so the comparative verdicts are not applicable.
    let degenerate = runs.iter().any(|r| r.metrics.degenerate_start);
    let settled: Vec<(ControllerKind, Option<bool>)> = runs
        .iter()
        .map(|r| {
            let verdict = if degenerate {
                None
            } else {
                Some(r.metrics.settling_time.is_some())
            };
            (r.kind, verdict)
        })
        .collect();
    let all_settled = settled.iter().all(|(_, ok)| ok.unwrap_or(true));

    let overshoot = combined_vs_pi
        .overshoot_pct
        .map(|ord| ord == std::cmp::Ordering::Less);
    let chatter = if degenerate {
        None
    } else {
        Some(pi_vs_pd.chatter_tv == std::cmp::Ordering::Less)
    };
    let guard = if theta0.abs() < std::f64::consts::FRAC_PI_2 {
        Some(combined.metrics.guard_fraction == 0.0)
    } else {
        None
    };

    let all_hold = all_settled
        && overshoot.unwrap_or(true)
        && chatter.unwrap_or(true)
        && guard.unwrap_or(true);

    let verdict_token = |v: Option<bool>| match v {
        Some(true) => "pass",
        Some(false) => "fail",
        None => "n/a",
    };
    let mut report = String::new();
    for run in &runs {
        let prefix = format!("metrics.{}", run.kind.token());
        for line in metrics_to_report(&run.metrics).lines() {
            report.push_str(&format!("{prefix}.{line}\n"));
        }
    }
    for (kind, ok) in &settled {
        report.push_str(&format!(
            "verdict.settled.{}={}\n",
            kind.token(),
            verdict_token(*ok)
        ));
    }
    report.push_str(&format!(
        "verdict.overshoot_combined_below_pi2={}\n",
        verdict_token(overshoot)
    ));
    report.push_str(&format!(
        "verdict.chatter_pi2_below_pd={}\n",
        verdict_token(chatter)
    ));
    report.push_str(&format!(
        "verdict.guard_free_combined={}\n",
        verdict_token(guard)
    ));
    report.push_str(&format!(
        "verdict.overall={}\n",
        verdict_token(Some(all_hold))
    ));
    write_file(&out_dir.join("compare.report"), &report)?;
    print!("{report}");
    Ok(all_hold)
}

fn cmd_sweep(args: &[String]) -> ExitCode {
    let Some(flags) = parse_flags(args, &["config", "key", "values", "jobs"]) else {
        eprint!("{}", usage());
        return exit_from(EXIT_CONFIG);
    };
    let (Some(config_path), Some(key), Some(values)) = (
        flag_value(&flags, "config"),
        flag_value(&flags, "key"),
        flag_value(&flags, "values"),
    ) else {
        eprintln!("sweep requires --config, --key and --values\n");
        return exit_from(EXIT_CONFIG);
    };
    let jobs = match flag_value(&flags, "jobs").unwrap_or("1").parse::<usize>() {
        Ok(n) if n >= 1 => n,
        _ => {
            eprintln!("--jobs must be a positive integer");
            return exit_from(EXIT_CONFIG);
        }
    };
    match sweep_over(config_path, key, values, jobs) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => exit_from(code),
    }
}

fn sweep_over(config_path: &str, key: &str, values: &str, jobs: usize) -> Result<(), u8> {
    if !is_numeric_key(key) {
        eprintln!("sweep key `{key}` is not a numeric config field");
        return Err(EXIT_CONFIG);
    }
    let values: Vec<&str> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        eprintln!("sweep requires a non-empty --values list");
        return Err(EXIT_CONFIG);
    }

    let base = load_config(config_path)?;
    // Validate every scenario up front so config errors beat run errors.
    let mut scenarios = Vec::new();
    for value in &values {
        let mut map = base.clone();
        map.set(key, value).expect("numeric key is known");
        let scenario = map.build().map_err(|e| {
            eprintln!("{key}={value}: {e}");
            EXIT_CONFIG
        })?;
        scenarios.push(scenario);
    }

    // Fan the runs over a small worker pool; results keep input order.
    let results: Vec<Option<Result<Metrics, String>>> = {
        let slots = Mutex::new(vec![None; scenarios.len()]);
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(scenarios.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= scenarios.len() {
                        break;
                    }
                    let outcome = match run_scenario(&scenarios[i]) {
                        Ok(trace) if trace.failed() => {
                            Err(trace.failure.as_ref().unwrap().to_string())
                        }
                        Ok(trace) => compute_metrics(&trace, DEFAULT_S_TOL, DEFAULT_BAND_PCT)
                            .map_err(|e| e.to_string()),
                        Err(e) => Err(e.to_string()),
                    };
                    slots.lock().unwrap()[i] = Some(outcome);
                });
            }
        });
        slots.into_inner().unwrap()
    };

    let fmt_opt = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v:.4}"));
    println!(
        "{:>14}  {:>12} {:>12} {:>12} {:>12} {:>10} {:>10}",
        key, "overshoot%", "settle_s", "sse", "chatter_tv", "switches", "guard"
    );
    let mut failed = false;
    for (value, outcome) in values.iter().zip(results) {
        match outcome.expect("worker filled every slot") {
            Ok(m) => println!(
                "{:>14}  {:>12} {:>12} {:>12.3e} {:>12.4} {:>10} {:>10.4}",
                value,
                fmt_opt(m.overshoot_pct),
                fmt_opt(m.settling_time),
                m.sse,
                m.chatter_tv,
                m.chatter_switches,
                m.guard_fraction
            ),
            Err(e) => {
                println!("{value:>14}  run failed: {e}");
                failed = true;
            }
        }
    }
    if failed {
        return Err(EXIT_NON_FINITE);
    }
    Ok(())
}
