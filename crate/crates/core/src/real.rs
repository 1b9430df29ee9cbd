//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the physics is written against: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every constant in the crate fits either width.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy view used for diagnostics, error payloads and eigen-solvers.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Neighbouring representable value, `steps` ulps away (negative steps go down).
    fn ulp_step(self, steps: i32) -> Self;
}

impl Real for f32 {
    fn ulp_step(self, steps: i32) -> Self {
        let mut v = self;
        for _ in 0..steps.unsigned_abs() {
            v = if steps > 0 { v.next_up() } else { v.next_down() };
        }
        v
    }
}

impl Real for f64 {
    fn ulp_step(self, steps: i32) -> Self {
        let mut v = self;
        for _ in 0..steps.unsigned_abs() {
            v = if steps > 0 { v.next_up() } else { v.next_down() };
        }
        v
    }
}

/// Relative difference `|a - b| / |b|`, falling back to the absolute difference when `b == 0`.
pub fn rel_diff<T: Real>(a: T, b: T) -> T {
    let d = (a - b).abs();
    if b == T::zero() {
        d
    } else {
        d / b.abs()
    }
}
