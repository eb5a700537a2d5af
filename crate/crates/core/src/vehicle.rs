//! Vehicle limits, state and commanded actions.

use crate::geom::Pose;
use crate::num::Real;

/// Performance and geometry limits of the simulated car.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleLimits<T = f64> {
    pub v_max: T,
    /// Longitudinal acceleration limit, drive and brake (m/s²).
    pub a_long_max: T,
    /// Lateral acceleration limit μ·g (m/s²).
    pub a_lat_max: T,
    pub wheelbase: T,
    pub delta_max: T,
    pub half_width: T,
    /// Steering slew rate used by the actuator model (rad/s).
    pub steer_rate_max: T,
}

impl<T: Real> Default for VehicleLimits<T> {
    fn default() -> Self {
        Self {
            v_max: T::c(8.0),
            a_long_max: T::c(4.0),
            a_lat_max: T::c(0.8 * 9.81),
            wheelbase: T::c(0.33),
            delta_max: T::c(0.4),
            half_width: T::c(0.15),
            steer_rate_max: T::c(3.2),
        }
    }
}

impl<T: Real> VehicleLimits<T> {
    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("v_max", self.v_max),
            ("a_long_max", self.a_long_max),
            ("a_lat_max", self.a_lat_max),
            ("wheelbase", self.wheelbase),
            ("delta_max", self.delta_max),
            ("half_width", self.half_width),
            ("steer_rate_max", self.steer_rate_max),
        ];
        for (name, v) in fields {
            if v <= T::zero() || !v.is_finite() {
                return Err(format!("limit {name} must be positive, got {v}"));
            }
        }
        if self.delta_max >= T::pi() * T::half() {
            return Err("delta_max must be below pi/2".into());
        }
        Ok(())
    }
}

/// Kinematic state of the simulated car.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VehicleState<T = f64> {
    pub pose: Pose<T>,
    pub speed: T,
    /// Actual (slew-limited) steering angle.
    pub steering: T,
    pub time: T,
}

impl<T: Real> VehicleState<T> {
    pub fn at_pose(pose: Pose<T>) -> Self {
        Self {
            pose,
            speed: T::zero(),
            steering: T::zero(),
            time: T::zero(),
        }
    }
}

/// Commanded steering angle and target speed; clamped to limits when applied.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Action<T = f64> {
    pub steer: T,
    pub speed: T,
}

impl<T: Real> Action<T> {
    pub fn new(steer: T, speed: T) -> Self {
        Self { steer, speed }
    }

    pub fn stop() -> Self {
        Self {
            steer: T::zero(),
            speed: T::zero(),
        }
    }
}
