//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real field the library is generic over (`f32` or `f64`).
pub trait Real:
    serde::Serialize + Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn nat(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex numbers over the scalar type.
pub type C<T> = Complex<T>;

/// Pairwise (cascade) summation in fixed order, so that results do not depend
/// on how the values were produced.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        let mut acc = T::zero();
        for &v in values {
            acc = acc + v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise summation of complex values.
pub fn pairwise_sum_c<T: Real>(values: &[C<T>]) -> C<T> {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        let mut acc = C::new(T::zero(), T::zero());
        for &v in values {
            acc = acc + v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum_c(&values[..mid]) + pairwise_sum_c(&values[mid..])
}

/// Principal branch of `w^(-b)` for `Re w > 0`, with an integer fast path.
#[inline]
pub fn inv_pow<T: Real>(w: C<T>, b: T) -> C<T> {
    if b == b.round() && b.abs() <= T::of(64.0) {
        let k = b.to_i32().unwrap_or(0);
        let p = if k >= 0 { w.powi(k) } else { w.inv().powi(-k) };
        return p.inv();
    }
    let (r, theta) = w.to_polar();
    C::from_polar(r.powf(-b), -b * theta)
}

/// `|w|^(-b)` without building the complex power.
#[inline]
pub fn inv_pow_abs<T: Real>(w: C<T>, b: T) -> T {
    let r2 = w.norm_sqr();
    if b == b.round() && b.abs() <= T::of(64.0) {
        let k = b.to_i32().unwrap_or(0);
        let m = r2.sqrt().powi(k);
        return T::one() / m;
    }
    r2.powf(-b / T::of(2.0))
}

/// Log-spaced grid of `count` points from `lo` to `hi` inclusive.
pub fn log_grid<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    assert!(count >= 2 && lo > T::zero() && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / T::nat(count - 1);
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == count {
                hi
            } else {
                (a + step * T::nat(i)).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_ints() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn inv_pow_integer_and_fractional_agree() {
        let w = C::new(0.3_f64, -0.7);
        let a = inv_pow(w, 3.0);
        let (r, t) = w.to_polar();
        let b = C::from_polar(r.powf(-3.0), -3.0 * t);
        assert!((a - b).norm() < 1e-12 * b.norm());
        let h = inv_pow(w, 2.5);
        assert!((h.norm() - w.norm().powf(-2.5)).abs() < 1e-12);
        assert!((inv_pow_abs(w, 2.5) - w.norm().powf(-2.5)).abs() < 1e-12);
        assert!((inv_pow_abs(w, 4.0) - w.norm().powf(-4.0)).abs() < 1e-10);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3_f64, 1e3, 7);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[6], 1e3);
        assert!((g[3] - 1.0).abs() < 1e-12);
    }
}
