//! Scalar abstraction for the whole crate.
//!
//! Everything numeric is generic over [`Real`], a thin extension of
//! `num_traits::Float`. The crate root exports f64 aliases for the common
//! concrete types; f32 works too but the default tolerances (chosen for f64)
//! should then be relaxed by the caller.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar used by tensors, models, drivers and optimizers.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + core::iter::Sum
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + Default
    + Send
    + Sync
    + 'static
{
    /// Shorthand conversion from an f64 literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Machine epsilon scale used by generic finite-difference steps.
    fn sqrt_eps() -> Self {
        Self::epsilon().sqrt()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Clamp to a closed interval.
pub fn clamp<T: Real>(x: T, lo: T, hi: T) -> T {
    x.max(lo).min(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn of_round_trips_literals() {
        assert_eq!(f64::of(1.5), 1.5);
        assert_eq!(f32::of(0.25), 0.25_f32);
    }

    #[test]
    fn clamp_bounds() {
        assert_eq!(clamp(2.0, 0.0, 1.0), 1.0);
        assert_eq!(clamp(-2.0, 0.0, 1.0), 0.0);
        assert_eq!(clamp(0.5, 0.0, 1.0), 0.5);
    }
}
