use crate::error::{Error, Result};
use crate::scalar::{Real, C};

use super::BallPoint;

fn check<T: Real>(p: &BallPoint<T>) -> Result<()> {
    if p.norm_sq() < T::one() {
        Ok(())
    } else {
        Err(Error::domain("point is not inside the unit ball"))
    }
}

/// Involutive automorphism `φ_z(w)`; swaps `z` and `0`.
pub fn involution<T: Real>(z: &BallPoint<T>, w: &BallPoint<T>) -> Result<BallPoint<T>> {
    check(z)?;
    check(w)?;
    if z.dim() != w.dim() {
        return Err(Error::domain("points of different dimension"));
    }
    Ok(phi(z, w))
}

/// Numerator vector of `φ_z(w)`: `z − P_z w − s_z Q_z w`.
fn numerator<T: Real>(z: &BallPoint<T>, w: &BallPoint<T>) -> BallPoint<T> {
    let r2 = z.norm_sq();
    if r2 == T::zero() {
        return w.map(|c| -c);
    }
    if z.dim() == 1 {
        return BallPoint::raw1(z.z1() - w.z1());
    }
    let s = (T::one() - r2).sqrt();
    let proj = w.inner(z) / r2;
    let p = z.map(|c| c * proj);
    let q = w.sub(&p);
    z.sub(&p).sub(&q.map(|c| c * s))
}

pub(crate) fn phi<T: Real>(z: &BallPoint<T>, w: &BallPoint<T>) -> BallPoint<T> {
    let den = C::new(T::one(), T::zero()) - w.inner(z);
    numerator(z, w).map(|c| c / den)
}

/// `1 − |φ_z(w)|² = (1−|z|²)(1−|w|²)/|1−⟨z,w⟩|²`.
pub fn one_minus_phi_sq<T: Real>(z: &BallPoint<T>, w: &BallPoint<T>) -> T {
    let d = (C::new(T::one(), T::zero()) - z.inner(w)).norm_sqr();
    (T::one() - z.norm_sq()) * (T::one() - w.norm_sq()) / d
}

/// Pseudo-hyperbolic distance `|φ_z(w)|`.
pub fn pseudo_distance<T: Real>(z: &BallPoint<T>, w: &BallPoint<T>) -> T {
    let den = (C::new(T::one(), T::zero()) - w.inner(z)).norm();
    numerator(z, w).norm() / den
}

/// Bergman distance `½ log((1+|φ_z(w)|)/(1−|φ_z(w)|))`.
pub fn bergman_distance<T: Real>(z: &BallPoint<T>, w: &BallPoint<T>) -> Result<T> {
    check(z)?;
    check(w)?;
    if z.dim() != w.dim() {
        return Err(Error::domain("points of different dimension"));
    }
    Ok(dist(z, w))
}

/// Unchecked distance, `log(1+ρ) − ½ log(1−ρ²)` with `1−ρ²` from the closed form.
#[inline]
pub(crate) fn dist<T: Real>(z: &BallPoint<T>, w: &BallPoint<T>) -> T {
    let rho = pseudo_distance(z, w);
    if rho < T::of(0.5) {
        return rho.atanh();
    }
    let half = T::of(0.5);
    rho.ln_1p() - half * one_minus_phi_sq(z, w).ln()
}

/// Distance from the origin to a point of modulus `r`.
pub fn distance_from_origin<T: Real>(r: T) -> T {
    r.atanh()
}

/// Euclidean description of a Bergman disc `D(a, ρ)` in the unit disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EuclidDisc<T> {
    pub center: C<T>,
    pub radius: T,
}

impl<T: Real> EuclidDisc<T> {
    pub fn of(a: C<T>, rho: T) -> Self {
        let t = rho.tanh();
        let (t2, a2) = (t * t, a.norm_sqr());
        let den = T::one() - t2 * a2;
        EuclidDisc { center: a * ((T::one() - t2) / den), radius: t * (T::one() - a2) / den }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1(x: f64, y: f64) -> BallPoint<f64> {
        BallPoint::disc(C::new(x, y)).unwrap()
    }

    #[test]
    fn involution_examples() {
        let z = d1(0.5, 0.0);
        assert!(involution(&z, &z).unwrap().norm() < 1e-15);
        assert!((involution(&z, &d1(0.0, 0.0)).unwrap().z1() - C::new(0.5, 0.0)).norm() < 1e-15);
        assert!((involution(&z, &d1(-0.5, 0.0)).unwrap().z1() - C::new(0.8, 0.0)).norm() < 1e-15);
        assert!(involution(&z, &BallPoint::raw1(C::new(1.0, 0.0))).is_err());
    }

    #[test]
    fn ball_involution_fixes_and_swaps() {
        let z = BallPoint::ball2(C::new(0.3, 0.4), C::new(-0.2, 0.5)).unwrap();
        let w = BallPoint::ball2(C::new(-0.1, 0.2), C::new(0.6, -0.3)).unwrap();
        assert!(phi(&z, &z).norm() < 1e-14);
        assert!(phi(&z, &BallPoint::origin(2)).sub(&z).norm() < 1e-15);
        assert!(phi(&z, &phi(&z, &w)).sub(&w).norm() < 1e-14);
        let lhs: f64 = 1.0 - phi(&z, &w).norm_sq();
        assert!((lhs - one_minus_phi_sq(&z, &w)).abs() < 1e-14);
    }

    #[test]
    fn distance_examples() {
        let z = d1(0.3, -0.2);
        assert_eq!(bergman_distance(&z, &z).unwrap(), 0.0);
        let d = bergman_distance(&d1(0.0, 0.0), &d1(0.5, 0.0)).unwrap();
        assert!((d - 0.5 * 3f64.ln()).abs() < 1e-15);
        // far-apart points near the boundary stay finite and accurate
        let a = d1(0.999_999, 0.0);
        let b = d1(-0.999_999, 0.0);
        let exact = 2.0 * 0.999_999f64.atanh();
        assert!((dist(&a, &b) - exact).abs() < 1e-7 * exact);
    }

    #[test]
    fn euclid_disc_matches_distance() {
        let a = C::new(0.6, 0.3);
        let disc = EuclidDisc::of(a, 0.7);
        for k in 0..16 {
            let th = k as f64 * std::f64::consts::PI / 8.0;
            let p = disc.center + C::from_polar(disc.radius, th);
            let d = dist(&BallPoint::raw1(a), &BallPoint::raw1(p));
            assert!((d - 0.7).abs() < 1e-12, "{d}");
        }
    }
}
