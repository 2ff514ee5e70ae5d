//! Numerical study of self-similar blowup profiles of the focusing cubic
//! wave equation in three space dimensions.
//!
//! The library computes the countable family of smooth profiles inside the
//! past light cone (labelled by their nodal index n), the asymptotic scaling
//! laws of the family, the point spectrum of the linearization around each
//! profile, and the continuation of the profiles outside the light cone,
//! together with grid certificates for the monotonicity arguments that the
//! continuation relies on.

pub mod num;

pub mod ode;
pub mod quad;
pub mod rootfind;
pub mod special;

pub mod asymptotics;
pub mod interior;
pub mod spectrum;
pub mod stability;
pub mod exterior;
pub mod polar;
pub mod report;

/// Scalar type of the physics layer. The numerics kernel is generic over
/// [`num::Real`]; everything above it runs in double precision.
pub type Scalar = f64;

pub use num::Real;
