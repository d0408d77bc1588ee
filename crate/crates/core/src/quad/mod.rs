//! Quadrature on the ball and Orlicz modulars.

mod gauss;
pub mod norm;
pub mod rule;

pub use gauss::{jacobi, legendre};
pub use norm::{
    c_alpha, kernel_integral, luxembourg_from_values, luxembourg_norm, luxembourg_norm_fast, modular,
    modular_of_values, modular_report, sample_abs, BallFunction, BallRule, ModularReport, NormReport,
};
pub use rule::{build_rule, QuadratureRule, RuleSpec};
