use serde::Serialize;

use crate::error::Result;
use crate::geometry::BallPoint;
use crate::growth::GrowthFunction;
use crate::quad::{luxembourg_norm_fast, BallFunction, QuadratureRule};
use crate::scalar::Real;

use super::bloch::{bloch_norm, BlochFunction, BLOCH_GRID};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductRatio<T> {
    pub product_norm: T,
    pub left_norm: T,
    pub right_norm: T,
    /// `product_norm / (left_norm · right_norm)`.
    pub ratio: T,
}

/// `‖fg‖_{Φ,α} / (‖f‖_{Φ₁,α} ‖g‖_{Φ₂,α})`.
pub fn product_norm_check<T: Real>(
    f: &dyn BallFunction<T>,
    g: &dyn BallFunction<T>,
    phi: &GrowthFunction<T>,
    phi1: &GrowthFunction<T>,
    phi2: &GrowthFunction<T>,
    rule: &QuadratureRule<T>,
) -> Result<ProductRatio<T>> {
    let fg = |z: &BallPoint<T>| f.eval(z) * g.eval(z);
    let product_norm = luxembourg_norm_fast(&fg, phi, rule)?.luxembourg_norm;
    let left_norm = luxembourg_norm_fast(f, phi1, rule)?.luxembourg_norm;
    let right_norm = luxembourg_norm_fast(g, phi2, rule)?.luxembourg_norm;
    Ok(ProductRatio { product_norm, left_norm, right_norm, ratio: product_norm / (left_norm * right_norm) })
}

/// `‖fθ‖_{Ψ,α} / (‖f‖_{Φ,α} ‖θ‖_ℬ)`.
pub fn product_norm_check_bloch<T: Real>(
    f: &dyn BallFunction<T>,
    theta: &BlochFunction<T>,
    phi: &GrowthFunction<T>,
    psi: &GrowthFunction<T>,
    rule: &QuadratureRule<T>,
) -> Result<ProductRatio<T>> {
    let ft = |z: &BallPoint<T>| f.eval(z) * theta.eval(z);
    let product_norm = luxembourg_norm_fast(&ft, psi, rule)?.luxembourg_norm;
    let left_norm = luxembourg_norm_fast(f, phi, rule)?.luxembourg_norm;
    let right_norm = bloch_norm(theta, rule.dim(), BLOCH_GRID)?.value;
    Ok(ProductRatio { product_norm, left_norm, right_norm, ratio: product_norm / (left_norm * right_norm) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::build_rule;
    use crate::scalar::C;

    #[test]
    fn constants_give_one() {
        let rule = build_rule::<f64>(0.0, 1, 8).unwrap();
        let one = |_: &BallPoint<f64>| C::new(1.0, 0.0);
        let two = GrowthFunction::power(2.0);
        let r = product_norm_check(&one, &one, &GrowthFunction::power(1.0), &two, &two, &rule).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-10);
    }
}
