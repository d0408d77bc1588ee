use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// A point of the unit disc (`n = 1`) or of the unit ball of ℂ² (`n = 2`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallPoint<T> {
    z: [C<T>; 2],
    n: u8,
}

impl<T: Real> BallPoint<T> {
    /// Point of the disc; fails unless `|z| < 1`.
    pub fn disc(z: C<T>) -> Result<Self> {
        Self::new(&[z])
    }

    pub fn ball2(z1: C<T>, z2: C<T>) -> Result<Self> {
        Self::new(&[z1, z2])
    }

    pub fn new(coords: &[C<T>]) -> Result<Self> {
        match coords.len() {
            1 => Self::raw1(coords[0]).checked(),
            2 => Self::raw2(coords[0], coords[1]).checked(),
            n => Err(Error::domain(format!("dimension {n} not supported (n must be 1 or 2)"))),
        }
    }

    /// Real point `x` on the first axis of the `n`-ball.
    pub fn real(x: T, n: usize) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::domain(format!("dimension {n} not supported (n must be 1 or 2)")));
        }
        Self::raw([C::new(x, T::zero()), C::new(T::zero(), T::zero())], n).checked()
    }

    fn checked(self) -> Result<Self> {
        let s = self.norm_sq();
        if s < T::one() {
            Ok(self)
        } else {
            Err(Error::domain(format!("point with |z|^2 = {s} is not inside the unit ball")))
        }
    }

    pub(crate) fn raw1(z: C<T>) -> Self {
        BallPoint { z: [z, C::new(T::zero(), T::zero())], n: 1 }
    }

    pub(crate) fn raw2(z1: C<T>, z2: C<T>) -> Self {
        BallPoint { z: [z1, z2], n: 2 }
    }

    pub(crate) fn raw(coords: [C<T>; 2], n: usize) -> Self {
        let mut p = BallPoint { z: coords, n: n as u8 };
        if n == 1 {
            p.z[1] = C::new(T::zero(), T::zero());
        }
        p
    }

    pub fn origin(n: usize) -> Self {
        Self::raw([C::new(T::zero(), T::zero()); 2], n)
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn coords(&self) -> &[C<T>] {
        &self.z[..self.n as usize]
    }

    /// First coordinate; the point itself when `n = 1`.
    pub fn z1(&self) -> C<T> {
        self.z[0]
    }

    pub fn norm_sq(&self) -> T {
        self.coords().iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// Hermitian product `⟨z, w⟩ = Σ z_j conj(w_j)`.
    pub fn inner(&self, w: &Self) -> C<T> {
        debug_assert_eq!(self.n, w.n);
        let mut acc = self.z[0] * w.z[0].conj();
        if self.n == 2 {
            acc = acc + self.z[1] * w.z[1].conj();
        }
        acc
    }

    pub(crate) fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self::raw([f(self.z[0]), f(self.z[1])], self.dim())
    }

    pub(crate) fn sub(&self, w: &Self) -> Self {
        Self::raw([self.z[0] - w.z[0], self.z[1] - w.z[1]], self.dim())
    }

    pub fn to_f64(&self) -> BallPoint<f64> {
        let c = |z: C<T>| C::new(z.re.f64(), z.im.f64());
        BallPoint { z: [c(self.z[0]), c(self.z[1])], n: self.n }
    }
}

impl<T: Real + Serialize> Serialize for BallPoint<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.dim()))?;
        for c in self.coords() {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for BallPoint<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[T; 2]> = Vec::deserialize(d)?;
        let coords: Vec<C<T>> = pairs.iter().map(|p| C::new(p[0], p[1])).collect();
        BallPoint::new(&coords).map_err(serde::de::Error::custom)
    }
}
