//! Reference profiles, sensor models, and the closed-loop simulation driver.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::controller::{
    control_step, ControlCommand, ControllerConfig, Measurement, Mode,
};
use crate::error::{Error, Result};
use crate::motor::{
    brake_torque_from_pedal, motor_torque, wheel_torque_from_motor, BrakeMap, MotorParams,
};
use crate::pid::{demand_to_command, pid_step, PidConfig, PidState};
use crate::plant::{plant_step, VehicleParams, VehicleState};
use crate::terrain::TerrainProfile;

/// Time → target-velocity profile; linear interpolation between samples,
/// held constant past the last one.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReferenceProfile {
    pub samples: Vec<(f64, f64)>,
}

impl ReferenceProfile {
    pub fn value_at(&self, time_s: f64) -> f64 {
        match self.samples.as_slice() {
            [] => 0.0,
            [only] => only.1,
            samples => {
                if time_s <= samples[0].0 {
                    return samples[0].1;
                }
                for pair in samples.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    if time_s <= b.0 {
                        let frac = (time_s - a.0) / (b.0 - a.0);
                        return a.1 + frac * (b.1 - a.1);
                    }
                }
                samples.last().unwrap().1
            }
        }
    }
}

/// Constant set-point from t = 0.
pub fn make_set_point_profile(v_target: f64, _window_s: f64, total_s: f64) -> ReferenceProfile {
    ReferenceProfile {
        samples: vec![(0.0, v_target), (total_s, v_target)],
    }
}

/// Linear ramp from rest to `v_final` over `rise_duration_s`, then constant.
pub fn make_rising_profile(v_final: f64, rise_duration_s: f64, total_s: f64) -> ReferenceProfile {
    ReferenceProfile {
        samples: vec![(0.0, 0.0), (rise_duration_s, v_final), (total_s, v_final)],
    }
}

/// Trapezoid: ramp to `v_peak`, hold, ramp to 0, hold, ramp back up, hold.
pub fn make_stop_and_go_profile(v_peak: f64, phase_s: f64, total_s: f64) -> ReferenceProfile {
    let mut samples = vec![
        (0.0, 0.0),
        (phase_s, v_peak),
        (2.0 * phase_s, v_peak),
        (3.0 * phase_s, 0.0),
        (4.0 * phase_s, 0.0),
        (5.0 * phase_s, v_peak),
    ];
    if total_s > 5.0 * phase_s {
        samples.push((total_s, v_peak));
    }
    ReferenceProfile { samples }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SensorConfig {
    /// Encoder resolution; `None` models an ideal (continuous) encoder.
    pub encoder_ticks_per_rev: Option<u32>,
    pub imu_grade_noise_std_rad: f64,
    pub seed: u64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            encoder_ticks_per_rev: None,
            imu_grade_noise_std_rad: 0.0,
            seed: 0,
        }
    }
}

/// Simulated encoder + IMU readout. Velocity is quantized to whole encoder
/// ticks counted over `interval_s`; grade carries seeded Gaussian noise.
pub fn sense(
    state: &VehicleState,
    cfg: &SensorConfig,
    wheel_radius_m: f64,
    interval_s: f64,
    rng: &mut ChaCha8Rng,
) -> Measurement {
    let velocity_mps = match cfg.encoder_ticks_per_rev {
        None | Some(0) => state.velocity_mps,
        Some(ticks) => {
            let meters_per_tick =
                2.0 * std::f64::consts::PI * wheel_radius_m / ticks as f64;
            let counted = (state.velocity_mps * interval_s / meters_per_tick).floor();
            counted * meters_per_tick / interval_s
        }
    };
    let grade_rad = if cfg.imu_grade_noise_std_rad > 0.0 {
        use rand::Rng;
        // Box-Muller from two uniforms; rand_distr is not needed for one gaussian
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        state.grade_rad + cfg.imu_grade_noise_std_rad * z
    } else {
        state.grade_rad
    };
    Measurement {
        velocity_mps,
        grade_rad,
        wheel_speed_radps: velocity_mps / wheel_radius_m,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub time_s: f64,
    pub ref_velocity_mps: f64,
    pub velocity_mps: f64,
    pub ep_v: f64,
    pub brake_percent: f64,
    pub grade_rad: f64,
    pub mode: Mode,
    pub wheel_torque_nm: f64,
    pub brake_torque_nm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub dt_s: f64,
    pub rows: Vec<TraceRow>,
}

/// Which control law closes the loop.
#[derive(Debug, Clone)]
pub enum ControllerKind {
    ShrinkingDomain(ControllerConfig),
    Pid(PidConfig),
}

/// Drives the plant at `dt_s` with the chosen controller in the loop and
/// records every plant tick.
///
/// The shrinking-domain controller runs every T/n seconds with the index
/// cycling 0..n-1; at the start of each window it latches the current
/// reference value as V_T and plans to reach it by the window's end, so a
/// moving reference is followed with up to one window of planning lag.
/// The PID runs every plant tick against the instantaneous reference. Pedal
/// commands are zero-order-held between controller ticks.
#[allow(clippy::too_many_arguments)]
pub fn run_closed_loop(
    controller: &ControllerKind,
    profile: &ReferenceProfile,
    terrain: &TerrainProfile,
    vparams: &VehicleParams,
    mparams: &MotorParams,
    bmap: &BrakeMap,
    sensors: &SensorConfig,
    dt_s: f64,
    total_s: f64,
) -> Result<RunTrace> {
    run_closed_loop_from(
        VehicleState::at_rest(terrain),
        controller,
        profile,
        terrain,
        vparams,
        mparams,
        bmap,
        sensors,
        dt_s,
        total_s,
    )
}

/// As `run_closed_loop`, from an arbitrary initial state.
#[allow(clippy::too_many_arguments)]
pub fn run_closed_loop_from(
    initial: VehicleState,
    controller: &ControllerKind,
    profile: &ReferenceProfile,
    terrain: &TerrainProfile,
    vparams: &VehicleParams,
    mparams: &MotorParams,
    bmap: &BrakeMap,
    sensors: &SensorConfig,
    dt_s: f64,
    total_s: f64,
) -> Result<RunTrace> {
    let n_ticks = (total_s / dt_s).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(sensors.seed);
    let mut state = initial;
    let mut cmd = ControlCommand::coast();
    let mut pid_state = PidState::default();
    let mut rows = Vec::with_capacity(n_ticks);

    // shrinking-domain scheduling in whole plant ticks
    let (ctrl_interval_ticks, n_steps) = match controller {
        ControllerKind::ShrinkingDomain(cfg) => {
            let ticks = (cfg.tick_s() / dt_s).round().max(1.0) as usize;
            (ticks, cfg.n_steps)
        }
        ControllerKind::Pid(_) => (1, 1),
    };
    let mut window_target = profile.value_at(0.0);

    for k in 0..n_ticks {
        let time_s = k as f64 * dt_s;
        let ref_velocity_mps = profile.value_at(time_s);

        match controller {
            ControllerKind::ShrinkingDomain(cfg) => {
                if k % ctrl_interval_ticks == 0 {
                    let count = k / ctrl_interval_ticks;
                    let i = count % n_steps;
                    if i == 0 {
                        // target latched at the start of each planning window
                        window_target = profile.value_at(time_s);
                    }
                    let meas =
                        sense(&state, sensors, vparams.wheel_radius_m, cfg.tick_s(), &mut rng);
                    cmd = control_step(&meas, window_target, i, cfg, vparams, mparams, bmap)?;
                }
            }
            ControllerKind::Pid(pcfg) => {
                let meas = sense(&state, sensors, vparams.wheel_radius_m, dt_s, &mut rng);
                let error = ref_velocity_mps - meas.velocity_mps;
                let (next, demand) = pid_step(&pid_state, pcfg, error, dt_s);
                pid_state = next;
                cmd = demand_to_command(demand, pcfg.output_limit, mparams, bmap);
            }
        }

        // torques from the held pedal commands at the current wheel speed
        let omega_motor = mparams.motor_speed(state.wheel_speed_radps);
        let wheel_torque_nm =
            wheel_torque_from_motor(motor_torque(cmd.ep_v, omega_motor, mparams), mparams);
        let brake_torque_nm = brake_torque_from_pedal(cmd.brake_percent, bmap);

        rows.push(TraceRow {
            time_s,
            ref_velocity_mps,
            velocity_mps: state.velocity_mps,
            ep_v: cmd.ep_v,
            brake_percent: cmd.brake_percent,
            grade_rad: state.grade_rad,
            mode: cmd.mode,
            wheel_torque_nm,
            brake_torque_nm,
        });

        state = plant_step(&state, wheel_torque_nm, brake_torque_nm, vparams, terrain, dt_s)?;
        if !state.velocity_mps.is_finite() || !state.distance_m.is_finite() {
            return Err(Error::RunAborted {
                time_s,
                reason: "non-finite vehicle state".into(),
            });
        }
    }

    Ok(RunTrace { dt_s, rows })
}
