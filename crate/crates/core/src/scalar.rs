//! Scalar abstractions.
//!
//! Timeline bookkeeping, trajectory integration and interval arithmetic only
//! need field operations and ordering, so they are written against [`Scalar`],
//! which exact rationals satisfy. Closed forms and random sampling need
//! transcendental functions and are written against [`Real`] (`f32`, `f64`).

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Ordered field element usable as a time or age value.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn half(&self) -> Self {
        self.clone() / (Self::one() + Self::one())
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Lossy conversion used for reporting.
    fn to_f64_lossy(&self) -> f64;
}

impl Scalar for f32 {
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Scalar + Float + FloatConst + FromPrimitive + Copy + std::fmt::Display {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_half_is_exact() {
        let three = BigRational::from_integer(3.into());
        assert_eq!(three.half(), BigRational::new(3.into(), 2.into()));
        assert_eq!(3.0f64.half(), 1.5);
    }
}
