//! Scalar abstraction for the numerics kernel.
//!
//! The integrator, quadrature, root finding and special functions are generic
//! over [`Real`]; the physics layer instantiates everything at `f64` (see the
//! [`crate::Scalar`] alias) because the reference values it reproduces need
//! full double precision.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar: f32 or f64.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + 'static {
    /// Shorthand for lossy conversion of an `f64` literal into `Self`.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in Real")
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Display + 'static {}
