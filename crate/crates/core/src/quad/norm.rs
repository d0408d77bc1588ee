use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{involution, BallPoint};
use crate::growth::GrowthFunction;
use crate::scalar::{pairwise_sum, Real, C};

use super::gauss::legendre;
use super::rule::QuadratureRule;

/// Anything that can be sampled at points of the ball.
pub trait BallFunction<T>: Sync {
    fn eval(&self, z: &BallPoint<T>) -> C<T>;
}

impl<T, F> BallFunction<T> for F
where
    F: Fn(&BallPoint<T>) -> C<T> + Sync,
{
    fn eval(&self, z: &BallPoint<T>) -> C<T> {
        self(z)
    }
}

/// `|f|` at every node, in node order.
pub fn sample_abs<T: Real>(f: &dyn BallFunction<T>, nodes: &[BallPoint<T>]) -> Result<Vec<T>> {
    let vals: Vec<T> = nodes.par_iter().map(|z| f.eval(z).norm()).collect();
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        let z = nodes[i].z1();
        return Err(Error::NonFiniteNode { index: i, re: z.re.f64(), im: z.im.f64() });
    }
    Ok(vals)
}

/// `Σ w_i Φ(|f_i|/λ)`.
pub fn modular_of_values<T: Real>(abs_vals: &[T], weights: &[T], phi: &GrowthFunction<T>, lambda: T) -> T {
    let terms: Vec<T> = abs_vals.par_iter().zip(weights).map(|(&a, &w)| w * phi.value(a / lambda)).collect();
    pairwise_sum(&terms)
}

/// `∫Φ(|f|) dν_α` by the rule.
pub fn modular<T: Real>(f: &dyn BallFunction<T>, phi: &GrowthFunction<T>, rule: &QuadratureRule<T>) -> Result<T> {
    let vals = sample_abs(f, rule.nodes())?;
    Ok(modular_of_values(&vals, rule.weights(), phi, T::one()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModularReport<T> {
    pub value: T,
    /// `|value − value on the half-resolution companion rule|`.
    pub error_estimate: T,
}

pub fn modular_report<T: Real>(
    f: &dyn BallFunction<T>,
    phi: &GrowthFunction<T>,
    rule: &QuadratureRule<T>,
) -> Result<ModularReport<T>> {
    let value = modular(f, phi, rule)?;
    let coarse = modular(f, phi, rule.companion()?)?;
    Ok(ModularReport { value, error_estimate: (value - coarse).abs() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormReport<T> {
    pub luxembourg_norm: T,
    pub modular_at_norm: T,
    /// `|norm − norm on the half-resolution companion rule|`, when requested.
    pub quadrature_error_estimate: Option<T>,
    pub bisection_iterations: usize,
}

const MODULAR_TOL: f64 = 1e-6;
const BRACKET_RTOL: f64 = 1e-12;
const LAMBDA_MIN: f64 = 1e-30;
const LAMBDA_MAX: f64 = 1e30;

/// Smallest `λ` with `Σ w_i Φ(|f_i|/λ) ≤ 1`, by bisection on `log λ`.
///
/// Bisection runs until the bracket is below `1e-12` relative width; the
/// modular at the returned `λ` is reported so callers can check it against 1.
pub fn luxembourg_from_values<T: Real>(abs_vals: &[T], weights: &[T], phi: &GrowthFunction<T>) -> Result<NormReport<T>> {
    let m = |lam: T| modular_of_values(abs_vals, weights, phi, lam);
    let peak = abs_vals.iter().copied().fold(T::zero(), T::max);
    if peak == T::zero() {
        return Ok(NormReport {
            luxembourg_norm: T::zero(),
            modular_at_norm: T::zero(),
            quadrature_error_estimate: None,
            bisection_iterations: 0,
        });
    }
    let (lmin, lmax) = (T::of(LAMBDA_MIN), T::of(LAMBDA_MAX));
    let ten = T::of(10.0);
    let mut hi = peak.max(lmin).min(lmax);
    let mut lo = hi;
    let mut iters = 0;
    while m(hi) > T::one() {
        lo = hi;
        hi = hi * ten;
        iters += 1;
        if hi > lmax {
            return Err(Error::NoBracket { lo: LAMBDA_MIN, hi: LAMBDA_MAX });
        }
    }
    if lo == hi {
        while m(lo) <= T::one() {
            hi = lo;
            lo = lo / ten;
            iters += 1;
            if lo < lmin {
                return Err(Error::NoBracket { lo: LAMBDA_MIN, hi: LAMBDA_MAX });
            }
        }
    }
    // Invariant: m(lo) > 1 >= m(hi).
    while (hi - lo) > T::of(BRACKET_RTOL) * hi {
        let mid = (lo * hi).sqrt();
        let mid = if mid > lo && mid < hi { mid } else { (lo + hi) * T::of(0.5) };
        if !(mid > lo && mid < hi) {
            break;
        }
        if m(mid) > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    let at = m(hi);
    Ok(NormReport { luxembourg_norm: hi, modular_at_norm: at, quadrature_error_estimate: None, bisection_iterations: iters })
}

/// Luxembourg norm `‖f‖_{Φ,α}` without an error estimate.
pub fn luxembourg_norm_fast<T: Real>(
    f: &dyn BallFunction<T>,
    phi: &GrowthFunction<T>,
    rule: &QuadratureRule<T>,
) -> Result<NormReport<T>> {
    let vals = sample_abs(f, rule.nodes())?;
    luxembourg_from_values(&vals, rule.weights(), phi)
}

/// Luxembourg norm with a companion-rule error estimate.
pub fn luxembourg_norm<T: Real>(
    f: &dyn BallFunction<T>,
    phi: &GrowthFunction<T>,
    rule: &QuadratureRule<T>,
) -> Result<NormReport<T>> {
    let mut rep = luxembourg_norm_fast(f, phi, rule)?;
    let coarse = luxembourg_norm_fast(f, phi, rule.companion()?)?;
    rep.quadrature_error_estimate = Some((rep.luxembourg_norm - coarse.luxembourg_norm).abs());
    Ok(rep)
}

/// Whether the modular at the reported norm lies within the bisection tolerance of 1.
pub fn modular_tolerance<T: Real>() -> T {
    T::of(MODULAR_TOL)
}

/// `J_{c,α}(z) = ∫ (1−|w|²)^α |1−⟨z,w⟩|^{−(n+1+α+c)} dν(w)` for Lebesgue measure `ν`.
pub fn kernel_integral<T: Real>(z: &BallPoint<T>, c: T, alpha: T, rule: &QuadratureRule<T>) -> Result<T> {
    if !(c > T::zero()) {
        return Err(Error::domain(format!("kernel exponent c = {c} must be positive")));
    }
    if (alpha - rule.alpha()).abs() > T::of(1e-12) * (T::one() + alpha.abs()) {
        return Err(Error::domain(format!("rule weight alpha = {} does not match alpha = {alpha}", rule.alpha())));
    }
    if !(z.norm_sq() < T::one()) {
        return Err(Error::domain("kernel point is not inside the unit ball"));
    }
    let e = T::nat(rule.dim() + 1) + alpha + c;
    let one = C::new(T::one(), T::zero());
    let s = rule.integrate(|w| (one - z.inner(w)).norm().powf(-e));
    Ok(s * rule.lebesgue_mass())
}

/// Normalizing constant of `dν_α = c_α (1−|w|²)^α dA` on the unit ball of ℂⁿ.
pub fn c_alpha<T: Real>(alpha: T, n: usize) -> T {
    let mut c = T::one();
    for k in 1..=n {
        c = c * (alpha + T::nat(k)) / T::PI();
    }
    c
}

/// Rule for `ν_α` restricted to the Bergman ball `D(a, ρ)`, obtained by pulling a
/// polar rule on the Euclidean ball of radius `tanh ρ` through `φ_a`.
///
/// Weights integrate against the normalized measure `dν_α` (their sum is `ν_α(D(a, ρ))`).
#[derive(Clone, Debug)]
pub struct BallRule<T> {
    pub center: BallPoint<T>,
    pub radius: T,
    pub nodes: Vec<BallPoint<T>>,
    pub weights: Vec<T>,
    /// `1 − |w|²` per node, from the automorphism identity.
    pub defect: Vec<T>,
}

impl<T: Real> BallRule<T> {
    pub fn new(center: &BallPoint<T>, radius: T, alpha: T, resolution: usize) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::domain("Bergman ball radius must be positive"));
        }
        let n = center.dim();
        let c_alpha = c_alpha(alpha, n);
        let t = radius.tanh();
        let q = resolution.max(4);
        let gl = legendre::<T>(q);
        let a2 = center.norm_sq();
        let one = C::new(T::one(), T::zero());
        let two_pi = T::of(2.0) * T::PI();
        let half = T::of(0.5);
        let mut local: Vec<(BallPoint<T>, T)> = Vec::new();
        if n == 1 {
            let m = 2 * q;
            for &(x, w) in &gl {
                let s = t * half * (T::one() + x);
                let ws = w * t * half * s * T::of(2.0);
                for j in 0..m {
                    let th = two_pi * T::nat(j) / T::nat(m);
                    local.push((BallPoint::raw1(C::from_polar(s, th)), ws / T::nat(m)));
                }
            }
        } else {
            let gu = legendre::<T>((q / 2).max(4));
            let m = q;
            for &(x, w) in &gl {
                let s = t * half * (T::one() + x);
                let ws = w * t * half * T::of(4.0) * s.powi(3);
                for &(y, wu) in &gu {
                    let u = (T::one() + y) * half;
                    for j1 in 0..m {
                        for j2 in 0..m {
                            let p1 = two_pi * T::nat(j1) / T::nat(m);
                            let p2 = two_pi * (T::nat(j2) + half) / T::nat(m);
                            let z = BallPoint::raw2(C::from_polar(s * u.sqrt(), p1), C::from_polar(s * (T::one() - u).sqrt(), p2));
                            local.push((z, ws * wu * half / T::nat(m * m)));
                        }
                    }
                }
            }
        }
        // Normalized volume dν/vol(B) pulled back: Jacobian ((1−|a|²)/|1−⟨u,a⟩|²)^{n+1}.
        let mut nodes = Vec::with_capacity(local.len());
        let mut weights = Vec::with_capacity(local.len());
        let mut defect = Vec::with_capacity(local.len());
        let vol = if n == 1 { T::PI() } else { T::PI() * T::PI() * half };
        for (u, w) in local {
            let k = (one - u.inner(center)).norm_sqr();
            let jac = ((T::one() - a2) / k).powi(n as i32 + 1);
            let dw = (T::one() - a2) * (T::one() - u.norm_sq()) / k;
            nodes.push(involution(center, &u)?);
            weights.push(w * jac * c_alpha * vol * dw.powf(alpha));
            defect.push(dw);
        }
        Ok(BallRule { center: *center, radius, nodes, weights, defect })
    }

    /// `ν_α(D(a, ρ))`.
    pub fn measure(&self) -> T {
        pairwise_sum(&self.weights)
    }

    pub fn integrate(&self, g: impl Fn(&BallPoint<T>) -> T) -> T {
        let vals: Vec<T> = self.nodes.iter().zip(&self.weights).map(|(z, &w)| w * g(z)).collect();
        pairwise_sum(&vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::rule::build_rule;

    #[test]
    fn modular_of_constants() {
        let rule = build_rule::<f64>(0.0, 1, 8).unwrap();
        let phi = GrowthFunction::power(2.0);
        assert_eq!(modular(&|_: &BallPoint<f64>| C::new(0.0, 0.0), &phi, &rule).unwrap(), 0.0);
        let m = modular(&|_: &BallPoint<f64>| C::new(3.0, 0.0), &GrowthFunction::exp_minus_one(), &rule).unwrap();
        assert!((m - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn luxembourg_of_constant() {
        let rule = build_rule::<f64>(0.0, 1, 8).unwrap();
        let rep = luxembourg_norm(&|_: &BallPoint<f64>| C::new(3.0, 0.0), &GrowthFunction::power(2.0), &rule).unwrap();
        assert!((rep.luxembourg_norm - 3.0).abs() < 1e-11);
        let e = GrowthFunction::exp_minus_one();
        let rep = luxembourg_norm(&|_: &BallPoint<f64>| C::new(2.0, 0.0), &e, &rule).unwrap();
        assert!((rep.luxembourg_norm - 2.0 / 2f64.ln()).abs() < 1e-10);
        assert!((rep.modular_at_norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn luxembourg_zero_and_bracket_failure() {
        let rule = build_rule::<f64>(0.0, 1, 4).unwrap();
        let z = luxembourg_norm_fast(&|_: &BallPoint<f64>| C::new(0.0, 0.0), &GrowthFunction::power(1.0), &rule).unwrap();
        assert_eq!(z.luxembourg_norm, 0.0);
        let huge = luxembourg_norm_fast(&|_: &BallPoint<f64>| C::new(1e200, 0.0), &GrowthFunction::power(1.0), &rule);
        assert!(matches!(huge, Err(Error::NoBracket { .. })));
    }

    #[test]
    fn non_finite_node_is_named() {
        let rule = build_rule::<f64>(0.0, 1, 4).unwrap();
        let r = modular(&|_: &BallPoint<f64>| C::new(f64::NAN, 0.0), &GrowthFunction::power(1.0), &rule);
        assert!(matches!(r, Err(Error::NonFiniteNode { index: 0, .. })));
    }

    #[test]
    fn kernel_integral_at_origin() {
        let rule = build_rule::<f64>(0.0, 1, 8).unwrap();
        let j = kernel_integral(&BallPoint::origin(1), 1.0, 0.0, &rule).unwrap();
        assert!((j - std::f64::consts::PI).abs() < 1e-12);
        // π ∫_0^1 v^α dv
        let rule = build_rule::<f64>(2.0, 1, 8).unwrap();
        let j = kernel_integral(&BallPoint::origin(1), 0.7, 2.0, &rule).unwrap();
        assert!((j - std::f64::consts::PI / 3.0).abs() < 1e-12);
        assert!(kernel_integral(&BallPoint::origin(1), 0.7, 1.0, &rule).is_err());
    }

    #[test]
    fn ball_rule_measure_matches_origin_formula() {
        // ν_0(D(0, ρ)) = tanh²ρ on the disc; invariance under φ_a for α = 0 is not exact,
        // but the ball at the origin is a Euclidean disc.
        let br = BallRule::new(&BallPoint::origin(1), 0.8, 0.0, 16).unwrap();
        assert!((br.measure() - 0.8f64.tanh().powi(2)).abs() < 1e-12);
        let a = BallPoint::disc(C::new(0.6, 0.5)).unwrap();
        let br = BallRule::new(&a, 0.5, 0.0, 24).unwrap();
        // Area of the Euclidean disc image, in normalized measure.
        let e = crate::geometry::EuclidDisc::of(a.z1(), 0.5f64);
        assert!((br.measure() - e.radius * e.radius).abs() < 1e-10);
    }
}
