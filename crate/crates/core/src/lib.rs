//! Numerical laboratory for Bergman-Orlicz spaces on the unit disc and the ball of `C²`.
//!
//! Routines are generic over the scalar type through [`scalar::Real`]; the aliases
//! below fix it to `f64` or `f32`.

pub mod atoms;
pub mod checks;
pub mod error;
pub mod factor;
pub mod geometry;
pub mod growth;
pub mod quad;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Growth = growth::GrowthFunction<f64>;
pub type Growth32 = growth::GrowthFunction<f32>;
pub type Point = geometry::BallPoint<f64>;
pub type Point32 = geometry::BallPoint<f32>;
pub type Rule = quad::QuadratureRule<f64>;
pub type Rule32 = quad::QuadratureRule<f32>;
pub type Series = atoms::AtomicSeries<f64>;
pub type Series32 = atoms::AtomicSeries<f32>;
pub type Complex = scalar::C<f64>;
pub type Complex32 = scalar::C<f32>;
