//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};

/// Floating-point scalar the whole pipeline is generic over: `f32` or `f64`.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Shorthand for converting an `f64` constant into `Self`.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    /// π in the scalar type.
    fn pi() -> Self {
        Self::c(std::f64::consts::PI)
    }

    /// 2π in the scalar type.
    fn two_pi() -> Self {
        Self::c(std::f64::consts::TAU)
    }

    fn half() -> Self {
        Self::c(0.5)
    }

    fn two() -> Self {
        Self::c(2.0)
    }

    /// Lossy conversion to `f64`, used for reporting and serialisation.
    fn to_f64(self) -> f64;
}

impl Real for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}
