//! Velocity-error PID baseline with anti-windup and a throttle/brake split.

use serde::{Deserialize, Serialize};

use crate::controller::{ControlCommand, Mode};
use crate::motor::{BrakeMap, MotorParams};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PidConfig {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Symmetric bound on the normalized actuator demand.
    pub output_limit: f64,
    /// Anti-windup clamp on the accumulated integral (error * s).
    pub integral_limit: f64,
}

impl Default for PidConfig {
    fn default() -> Self {
        // gains frozen from `longctl tune-pid` (flat-terrain grid search with
        // a 10% overshoot cap)
        Self {
            kp: 0.25,
            ki: 0.20,
            kd: 0.20,
            output_limit: 2.0,
            integral_limit: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: f64,
}

/// One PID update. Returns the next state and the clamped normalized demand.
pub fn pid_step(
    state: &PidState,
    config: &PidConfig,
    error_mps: f64,
    dt_s: f64,
) -> (PidState, f64) {
    let integral = (state.integral + error_mps * dt_s)
        .clamp(-config.integral_limit, config.integral_limit);
    let derivative = (error_mps - state.prev_error) / dt_s;
    let demand = (config.kp * error_mps + config.ki * integral + config.kd * derivative)
        .clamp(-config.output_limit, config.output_limit);
    (
        PidState {
            integral,
            prev_error: error_mps,
        },
        demand,
    )
}

/// Maps signed normalized demand to pedals: positive scales linearly to
/// throttle voltage, negative to brake percent.
pub fn demand_to_command(
    demand: f64,
    output_limit: f64,
    mparams: &MotorParams,
    bmap: &BrakeMap,
) -> ControlCommand {
    let _ = bmap; // brake percent is commanded directly; the map applies downstream
    if demand > 0.0 {
        ControlCommand {
            ep_v: (demand / output_limit).min(1.0) * mparams.ep_max_v,
            brake_percent: 0.0,
            mode: Mode::Drive,
        }
    } else if demand < 0.0 {
        ControlCommand {
            ep_v: 0.0,
            brake_percent: (-demand / output_limit).min(1.0) * 100.0,
            mode: Mode::Brake,
        }
    } else {
        ControlCommand::coast()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(kp: f64, ki: f64, kd: f64) -> PidConfig {
        PidConfig {
            kp,
            ki,
            kd,
            output_limit: 10.0,
            integral_limit: 10.0,
        }
    }

    #[test]
    fn proportional_only() {
        let (_, demand) = pid_step(&PidState::default(), &config(1.0, 0.0, 0.0), 2.0, 0.1);
        assert_eq!(demand, 2.0);
    }

    #[test]
    fn null_input_gives_zero_demand() {
        let mut state = PidState::default();
        for _ in 0..100 {
            let (next, demand) = pid_step(&state, &config(1.0, 0.5, 0.2), 0.0, 0.01);
            assert_eq!(demand, 0.0);
            state = next;
        }
    }

    #[test]
    fn integral_accumulation_oracle() {
        // e = 1 held for 2 s at dt = 1: demand = kp*1 + ki*2 = 2.0
        let c = config(1.0, 0.5, 0.0);
        let mut state = PidState { integral: 0.0, prev_error: 1.0 };
        let mut demand = 0.0;
        for _ in 0..2 {
            let (next, d) = pid_step(&state, &c, 1.0, 1.0);
            state = next;
            demand = d;
        }
        assert!((demand - 2.0).abs() < 1e-12);
    }

    #[test]
    fn demand_mapping_anchors() {
        let mp = MotorParams::default();
        let bmap = BrakeMap::default();
        let limit = 1.0;
        let cmd = demand_to_command(0.0, limit, &mp, &bmap);
        assert_eq!(cmd.mode, Mode::Coast);
        let cmd = demand_to_command(limit, limit, &mp, &bmap);
        assert_eq!(cmd.ep_v, mp.ep_max_v);
        let cmd = demand_to_command(-limit / 2.0, limit, &mp, &bmap);
        assert!((cmd.brake_percent - 50.0).abs() < 1e-12);
        assert_eq!(cmd.ep_v, 0.0);
    }

    proptest! {
        #[test]
        fn anti_windup_holds(errors in proptest::collection::vec(-50.0..50.0f64, 1..200)) {
            let c = PidConfig { integral_limit: 3.0, ..config(1.0, 1.0, 0.0) };
            let mut state = PidState::default();
            for e in errors {
                let (next, _) = pid_step(&state, &c, e, 0.05);
                prop_assert!(next.integral.abs() <= c.integral_limit);
                state = next;
            }
        }

        #[test]
        fn throttle_brake_exclusive(demand in -5.0..5.0f64) {
            let cmd = demand_to_command(demand, 1.0, &MotorParams::default(), &BrakeMap::default());
            prop_assert!(cmd.ep_v * cmd.brake_percent == 0.0);
        }
    }
}
