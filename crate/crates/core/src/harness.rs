//! Scenario × terrain × controller matrix runner, CSV output, and the PID
//! tuning pass.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::controller::Mode;
use crate::error::{Error, Result};
use crate::metrics::{rise_time, rmse, steady_state_error, MetricsReport};
use crate::pid::PidConfig;
use crate::scenario::{
    make_rising_profile, make_set_point_profile, make_stop_and_go_profile, run_closed_loop,
    ControllerKind, ReferenceProfile, RunTrace, SensorConfig, TraceRow,
};
use crate::terrain::TerrainProfile;

pub const TRACE_HEADER: &str =
    "time_s,ref_velocity_mps,velocity_mps,ep_v,brake_percent,grade_rad,mode,wheel_torque_nm,brake_torque_nm";
pub const SUMMARY_HEADER: &str = "scenario,terrain,controller,rise_time_s,rmse_kmh,sse_kmh";

/// Fraction of the trace used for the steady-state window.
pub const SSE_WINDOW_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    SetPoint,
    Rising,
    StopAndGo,
}

impl ScenarioKind {
    pub fn id(&self) -> &'static str {
        match self {
            ScenarioKind::SetPoint => "set-point",
            ScenarioKind::Rising => "rising",
            ScenarioKind::StopAndGo => "stop-and-go",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "set-point" => Ok(ScenarioKind::SetPoint),
            "rising" => Ok(ScenarioKind::Rising),
            "stop-and-go" => Ok(ScenarioKind::StopAndGo),
            other => Err(Error::ConfigParse(format!("unknown scenario `{other}`"))),
        }
    }

    /// Default run length: 20 s for set-point/rising, 30 s for stop-and-go.
    pub fn default_total_s(&self) -> f64 {
        match self {
            ScenarioKind::StopAndGo => 30.0,
            _ => 20.0,
        }
    }

    /// Stop-and-go peaks at 3 m/s, the others target 4 m/s.
    pub fn target_mps(&self, configured: f64) -> f64 {
        match self {
            ScenarioKind::StopAndGo => configured.min(3.0),
            _ => configured,
        }
    }

    pub fn profile(&self, v_target: f64, window_s: f64, total_s: f64) -> ReferenceProfile {
        match self {
            ScenarioKind::SetPoint => make_set_point_profile(v_target, window_s, total_s),
            // ramp over four planner windows
            ScenarioKind::Rising => make_rising_profile(v_target, 4.0 * window_s, total_s),
            // five equal phases: up, hold, down, hold, up
            ScenarioKind::StopAndGo => {
                make_stop_and_go_profile(v_target, total_s / 6.0, total_s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerId {
    ShrinkingDomain,
    Pid,
}

impl ControllerId {
    pub fn id(&self) -> &'static str {
        match self {
            ControllerId::ShrinkingDomain => "shrinking-domain",
            ControllerId::Pid => "pid",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "shrinking-domain" | "sd" => Ok(ControllerId::ShrinkingDomain),
            "pid" => Ok(ControllerId::Pid),
            other => Err(Error::ConfigParse(format!("unknown controller `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerrainId {
    Flat,
    Gradient,
}

impl TerrainId {
    pub fn id(&self) -> &'static str {
        match self {
            TerrainId::Flat => "flat",
            TerrainId::Gradient => "gradient",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(TerrainId::Flat),
            "gradient" => Ok(TerrainId::Gradient),
            other => Err(Error::ConfigParse(format!("unknown terrain `{other}`"))),
        }
    }

    pub fn profile(&self, config: &Config) -> TerrainProfile {
        match self {
            TerrainId::Flat => TerrainProfile::Flat,
            TerrainId::Gradient => TerrainProfile::Sinusoidal {
                amplitude_rad: config.scenario.terrain.amplitude_rad,
                wavelength_m: config.scenario.terrain.wavelength_m,
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub scenario: ScenarioKind,
    pub terrain: TerrainId,
    pub controller: ControllerId,
    pub config: Config,
    pub seed: u64,
    pub dt_s: f64,
    /// Trace CSV destination; `None` skips the file.
    pub out: Option<PathBuf>,
}

impl RunSpec {
    pub fn total_s(&self) -> f64 {
        self.scenario.default_total_s()
    }
}

/// Runs one spec and returns the trace plus its metrics row.
pub fn run_spec(spec: &RunSpec) -> Result<(RunTrace, MetricsReport)> {
    let cfg = &spec.config;
    let total_s = spec.total_s();
    let v_target = spec.scenario.target_mps(cfg.scenario.v_target_mps);
    let profile = spec
        .scenario
        .profile(v_target, cfg.controller.window_s, total_s);
    let terrain = spec.terrain.profile(cfg);
    let controller = match spec.controller {
        ControllerId::ShrinkingDomain => {
            ControllerKind::ShrinkingDomain(cfg.controller_config())
        }
        ControllerId::Pid => ControllerKind::Pid(cfg.pid_config()),
    };
    let sensors = SensorConfig {
        seed: spec.seed,
        ..cfg.sensor_config()
    };

    let trace = run_closed_loop(
        &controller,
        &profile,
        &terrain,
        &cfg.vehicle_params(),
        &cfg.motor_params(),
        &cfg.brake_map(),
        &sensors,
        spec.dt_s,
        total_s,
    )?;

    let report = MetricsReport {
        scenario: spec.scenario.id().to_string(),
        terrain: spec.terrain.id().to_string(),
        controller: spec.controller.id().to_string(),
        rise_time_s: rise_time(&trace, v_target),
        rmse_kmh: rmse(&trace),
        sse_kmh: steady_state_error(&trace, SSE_WINDOW_FRACTION),
    };

    if let Some(path) = &spec.out {
        write_trace_csv(path, &trace)?;
    }
    Ok((trace, report))
}

/// Runs every spec in order and returns one metrics row per spec.
pub fn run_matrix(specs: &[RunSpec]) -> Result<Vec<MetricsReport>> {
    specs.iter().map(|s| run_spec(s).map(|(_, r)| r)).collect()
}

/// The default comparison matrix: 3 scenarios × 2 terrains × 2 controllers.
pub fn default_matrix(
    config: &Config,
    seed: u64,
    dt_s: f64,
    out_dir: Option<&Path>,
) -> Vec<RunSpec> {
    let mut specs = Vec::new();
    for scenario in [
        ScenarioKind::SetPoint,
        ScenarioKind::Rising,
        ScenarioKind::StopAndGo,
    ] {
        for terrain in [TerrainId::Flat, TerrainId::Gradient] {
            for controller in [ControllerId::ShrinkingDomain, ControllerId::Pid] {
                let out = out_dir.map(|d| {
                    d.join(format!(
                        "{}_{}_{}.csv",
                        scenario.id(),
                        terrain.id(),
                        controller.id()
                    ))
                });
                specs.push(RunSpec {
                    scenario,
                    terrain,
                    controller,
                    config: config.clone(),
                    seed,
                    dt_s,
                    out,
                });
            }
        }
    }
    specs
}

/// Formats with 9 significant digits for reproducible diffs.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).clamp(0, 17) as usize;
    format!("{:.*}", decimals, x)
}

pub fn trace_to_csv(trace: &RunTrace) -> String {
    let mut out = String::with_capacity(trace.rows.len() * 96);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &trace.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.time_s),
            fmt_f64(r.ref_velocity_mps),
            fmt_f64(r.velocity_mps),
            fmt_f64(r.ep_v),
            fmt_f64(r.brake_percent),
            fmt_f64(r.grade_rad),
            r.mode,
            fmt_f64(r.wheel_torque_nm),
            fmt_f64(r.brake_torque_nm),
        );
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &RunTrace) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, trace_to_csv(trace))?;
    Ok(())
}

/// Parses a trace CSV written by `write_trace_csv`; used for the round-trip
/// audit of summary rows.
pub fn read_trace_csv(path: &Path) -> Result<RunTrace> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        _ => return Err(Error::ConfigParse(format!("bad trace header in {}", path.display()))),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::ConfigParse(format!(
                "trace line {}: expected 9 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| Error::ConfigParse(format!("trace line {}: {e}", lineno + 2)))
        };
        let mode = match fields[6] {
            "drive" => Mode::Drive,
            "brake" => Mode::Brake,
            "coast" => Mode::Coast,
            other => {
                return Err(Error::ConfigParse(format!(
                    "trace line {}: unknown mode `{other}`",
                    lineno + 2
                )))
            }
        };
        rows.push(TraceRow {
            time_s: num(0)?,
            ref_velocity_mps: num(1)?,
            velocity_mps: num(2)?,
            ep_v: num(3)?,
            brake_percent: num(4)?,
            grade_rad: num(5)?,
            mode,
            wheel_torque_nm: num(7)?,
            brake_torque_nm: num(8)?,
        });
    }
    let dt_s = if rows.len() >= 2 {
        rows[1].time_s - rows[0].time_s
    } else {
        0.01
    };
    Ok(RunTrace { dt_s, rows })
}

pub fn summary_to_csv(reports: &[MetricsReport]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in reports {
        let rise = match r.rise_time_s {
            Some(t) => fmt_f64(t),
            None => "undefined".to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scenario,
            r.terrain,
            r.controller,
            rise,
            fmt_f64(r.rmse_kmh),
            fmt_f64(r.sse_kmh),
        );
    }
    out
}

/// Maximum acceptable set-point overshoot for a tuned candidate, as a
/// fraction of the target speed.
const TUNE_OVERSHOOT_LIMIT: f64 = 0.10;

/// Grid-search PID gains on the flat-terrain scenarios, minimizing the mean
/// RMSE across them subject to a 10% overshoot cap on the set-point step.
/// Returns the best gains together with that mean RMSE.
pub fn tune_pid(config: &Config, dt_s: f64) -> Result<(PidConfig, f64)> {
    // kp capped so the demand stays inside the linear actuator range for
    // velocity errors up to the 4 m/s operating envelope
    let kp_grid = [0.05, 0.08, 0.1, 0.15, 0.2, 0.25];
    let ki_grid = [0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8];
    let kd_grid = [0.0, 0.05, 0.1, 0.2];

    let mut best: Option<(PidConfig, f64)> = None;
    // fallback in case no candidate meets the overshoot cap
    let mut best_any: Option<(PidConfig, f64)> = None;
    for &kp in &kp_grid {
        for &ki in &ki_grid {
            for &kd in &kd_grid {
                let mut candidate = config.clone();
                candidate.pid.kp = kp;
                candidate.pid.ki = ki;
                candidate.pid.kd = kd;
                let mut total = 0.0;
                let mut overshoots = false;
                for scenario in [
                    ScenarioKind::SetPoint,
                    ScenarioKind::Rising,
                    ScenarioKind::StopAndGo,
                ] {
                    let spec = RunSpec {
                        scenario,
                        terrain: TerrainId::Flat,
                        controller: ControllerId::Pid,
                        config: candidate.clone(),
                        seed: 0,
                        dt_s,
                        out: None,
                    };
                    let (trace, report) = run_spec(&spec)?;
                    if scenario == ScenarioKind::SetPoint {
                        let target = candidate.scenario.v_target_mps;
                        let peak = trace
                            .rows
                            .iter()
                            .map(|r| r.velocity_mps)
                            .fold(0.0, f64::max);
                        overshoots = peak > target * (1.0 + TUNE_OVERSHOOT_LIMIT);
                    }
                    total += report.rmse_kmh;
                }
                let mean = total / 3.0;
                if !overshoots && best.as_ref().is_none_or(|(_, r)| mean < *r) {
                    best = Some((candidate.pid_config(), mean));
                }
                if best_any.as_ref().is_none_or(|(_, r)| mean < *r) {
                    best_any = Some((candidate.pid_config(), mean));
                }
            }
        }
    }
    Ok(best.or(best_any).expect("non-empty grid"))
}
