//! TOML configuration: every key optional with documented defaults, unknown
//! keys rejected, invariants validated with the offending key path.

use serde::{Deserialize, Serialize};

use crate::controller::ControllerConfig;
use crate::error::{Error, Result};
use crate::motor::{BrakeMap, MotorParams};
use crate::pid::PidConfig;
use crate::plant::VehicleParams;
use crate::scenario::SensorConfig;
use crate::terrain::TerrainProfile;

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub vehicle: VehicleSection,
    pub motor: MotorSection,
    pub brake: BrakeSection,
    pub controller: ControllerSection,
    pub pid: PidSection,
    pub scenario: ScenarioSection,
}

macro_rules! section {
    ($name:ident { $($field:ident : $ty:ty = $default:expr),+ $(,)? }) => {
        #[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $(pub $field: $ty),+
        }
        impl Default for $name {
            fn default() -> Self {
                Self { $($field: $default),+ }
            }
        }
    };
}

section!(VehicleSection {
    mass_kg: f64 = 1250.0,
    wheel_radius_m: f64 = 0.27,
    brake_radius_m: f64 = 0.14,
    mu_rolling: f64 = 0.03,
    gravity_mps2: f64 = 9.81,
    air_density_kgpm3: f64 = 1.225,
    frontal_area_m2: f64 = 2.0,
    drag_coeff: f64 = 0.35,
});

section!(MotorSection {
    k1: f64 = 0.06692,
    k2: f64 = 0.00126,
    ep_max_v: f64 = 5.0,
    gear_ratio: f64 = 10.23,
    transmission_efficiency: f64 = 0.85,
});

section!(BrakeSection {
    map: Vec<(f64, f64)> = vec![(0.0, 0.0), (800.0, 100.0)],
});

section!(ControllerSection {
    window_s: f64 = 2.0,
    n_steps: usize = 10,
    accel_upper_mps2: f64 = 2.5,
    accel_lower_mps2: f64 = 0.0,
    coast_deadband_n: f64 = 1.0,
});

section!(PidSection {
    kp: f64 = 0.25,
    ki: f64 = 0.20,
    kd: f64 = 0.20,
    output_limit: f64 = 2.0,
    integral_limit: f64 = 5.0,
});

section!(ScenarioSection {
    name: String = "set-point".to_string(),
    v_target_mps: f64 = 4.0,
    window_s: f64 = 2.0,
    total_s: f64 = 20.0,
    terrain: TerrainSection = TerrainSection::default(),
    sensors: SensorSection = SensorSection::default(),
});

section!(TerrainSection {
    kind: String = "flat".to_string(),
    amplitude_rad: f64 = 0.05,
    wavelength_m: f64 = 50.0,
    segments: Vec<(f64, f64)> = Vec::new(),
});

section!(SensorSection {
    encoder_ticks_per_rev: u32 = 0,
    imu_grade_noise_std_rad: f64 = 0.0,
    seed: u64 = 0,
});

fn invariant(key: &str, reason: &str) -> Error {
    Error::ConfigInvariant {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let v = &self.vehicle;
        if v.mass_kg <= 0.0 {
            return Err(invariant("vehicle.mass_kg", "must be > 0"));
        }
        if v.wheel_radius_m <= 0.0 {
            return Err(invariant("vehicle.wheel_radius_m", "must be > 0"));
        }
        if v.brake_radius_m <= 0.0 {
            return Err(invariant("vehicle.brake_radius_m", "must be > 0"));
        }
        if !(0.0..1.0).contains(&v.mu_rolling) {
            return Err(invariant("vehicle.mu_rolling", "must be in [0, 1)"));
        }
        if v.drag_coeff < 0.0 {
            return Err(invariant("vehicle.drag_coeff", "must be >= 0"));
        }
        if v.frontal_area_m2 < 0.0 {
            return Err(invariant("vehicle.frontal_area_m2", "must be >= 0"));
        }

        let m = &self.motor;
        if m.k1 <= 0.0 {
            return Err(invariant("motor.k1", "must be > 0"));
        }
        if m.k2 <= 0.0 {
            return Err(invariant("motor.k2", "must be > 0"));
        }
        if m.ep_max_v <= 0.0 {
            return Err(invariant("motor.ep_max_v", "must be > 0"));
        }
        if m.gear_ratio <= 0.0 {
            return Err(invariant("motor.gear_ratio", "must be > 0"));
        }
        if !(m.transmission_efficiency > 0.0 && m.transmission_efficiency <= 1.0) {
            return Err(invariant("motor.transmission_efficiency", "must be in (0, 1]"));
        }

        let map = &self.brake.map;
        if map.len() < 2 {
            return Err(invariant("brake.map", "needs at least two points"));
        }
        if map[0] != (0.0, 0.0) {
            return Err(invariant("brake.map", "first point must be (0, 0)"));
        }
        if map.last().unwrap().1 != 100.0 {
            return Err(invariant("brake.map", "last point must reach 100%"));
        }
        for pair in map.windows(2) {
            if pair[1].0 <= pair[0].0 || pair[1].1 <= pair[0].1 {
                return Err(invariant("brake.map", "points must be strictly increasing"));
            }
        }

        let c = &self.controller;
        if c.window_s <= 0.0 {
            return Err(invariant("controller.window_s", "must be > 0"));
        }
        if c.n_steps < 1 {
            return Err(invariant("controller.n_steps", "must be >= 1"));
        }
        if !(c.accel_lower_mps2 >= 0.0 && c.accel_lower_mps2 < c.accel_upper_mps2) {
            return Err(invariant(
                "controller.accel_lower_mps2",
                "must satisfy 0 <= lower < upper",
            ));
        }
        if c.coast_deadband_n < 0.0 {
            return Err(invariant("controller.coast_deadband_n", "must be >= 0"));
        }

        let p = &self.pid;
        if p.kp < 0.0 || p.ki < 0.0 || p.kd < 0.0 {
            return Err(invariant("pid.kp", "gains must be >= 0"));
        }
        if p.output_limit <= 0.0 {
            return Err(invariant("pid.output_limit", "must be > 0"));
        }
        if p.integral_limit <= 0.0 {
            return Err(invariant("pid.integral_limit", "must be > 0"));
        }

        let s = &self.scenario;
        if s.v_target_mps < 0.0 {
            return Err(invariant("scenario.v_target_mps", "must be >= 0"));
        }
        if s.total_s <= 0.0 {
            return Err(invariant("scenario.total_s", "must be > 0"));
        }
        match s.terrain.kind.as_str() {
            "flat" | "sinusoidal" => {}
            "piecewise" => {
                if s.terrain.segments.is_empty() {
                    return Err(invariant(
                        "scenario.terrain.segments",
                        "piecewise terrain needs segments",
                    ));
                }
            }
            other => {
                return Err(invariant(
                    "scenario.terrain.kind",
                    &format!("unknown terrain kind `{other}`"),
                ));
            }
        }
        if s.terrain.amplitude_rad.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(invariant("scenario.terrain.amplitude_rad", "|grade| must be < pi/2"));
        }
        for &(_, g) in &s.terrain.segments {
            if g.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(invariant("scenario.terrain.segments", "|grade| must be < pi/2"));
            }
        }
        if s.sensors.imu_grade_noise_std_rad < 0.0 {
            return Err(invariant(
                "scenario.sensors.imu_grade_noise_std_rad",
                "must be >= 0",
            ));
        }
        Ok(())
    }

    pub fn vehicle_params(&self) -> VehicleParams {
        let v = &self.vehicle;
        VehicleParams {
            mass_kg: v.mass_kg,
            wheel_radius_m: v.wheel_radius_m,
            brake_radius_m: v.brake_radius_m,
            mu_rolling: v.mu_rolling,
            gravity_mps2: v.gravity_mps2,
            air_density_kgpm3: v.air_density_kgpm3,
            frontal_area_m2: v.frontal_area_m2,
            drag_coeff: v.drag_coeff,
        }
    }

    pub fn motor_params(&self) -> MotorParams {
        let m = &self.motor;
        MotorParams {
            k1: m.k1,
            k2: m.k2,
            ep_max_v: m.ep_max_v,
            gear_ratio: m.gear_ratio,
            transmission_efficiency: m.transmission_efficiency,
        }
    }

    pub fn brake_map(&self) -> BrakeMap {
        BrakeMap {
            points: self.brake.map.clone(),
        }
    }

    pub fn controller_config(&self) -> ControllerConfig {
        let c = &self.controller;
        ControllerConfig {
            window_s: c.window_s,
            n_steps: c.n_steps,
            accel_upper_mps2: c.accel_upper_mps2,
            accel_lower_mps2: c.accel_lower_mps2,
            coast_deadband_n: c.coast_deadband_n,
        }
    }

    pub fn pid_config(&self) -> PidConfig {
        let p = &self.pid;
        PidConfig {
            kp: p.kp,
            ki: p.ki,
            kd: p.kd,
            output_limit: p.output_limit,
            integral_limit: p.integral_limit,
        }
    }

    pub fn sensor_config(&self) -> SensorConfig {
        let s = &self.scenario.sensors;
        SensorConfig {
            encoder_ticks_per_rev: match s.encoder_ticks_per_rev {
                0 => None,
                t => Some(t),
            },
            imu_grade_noise_std_rad: s.imu_grade_noise_std_rad,
            seed: s.seed,
        }
    }

    pub fn terrain(&self) -> TerrainProfile {
        let t = &self.scenario.terrain;
        match t.kind.as_str() {
            "sinusoidal" => TerrainProfile::Sinusoidal {
                amplitude_rad: t.amplitude_rad,
                wavelength_m: t.wavelength_m,
            },
            "piecewise" => TerrainProfile::PiecewiseGrade(t.segments.clone()),
            _ => TerrainProfile::Flat,
        }
    }
}
