use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BallPoint;
use crate::quad::QuadratureRule;
use crate::scalar::{pairwise_sum, Real, C};

type Holo<T> = Arc<dyn Fn(&BallPoint<T>) -> C<T> + Send + Sync>;

#[derive(Clone)]
pub enum BlochKind<T> {
    Constant(C<T>),
    /// `1 + scale · log(4 / (1 − ⟨z, a⟩))`.
    LogAtom { center: BallPoint<T>, scale: T },
    /// A function with its radial derivative `Rf = Σ z_j ∂f/∂z_j`.
    General { value: Holo<T>, radial: Holo<T>, label: String },
}

/// A Bloch-space function given in closed form.
#[derive(Clone)]
pub struct BlochFunction<T> {
    pub kind: BlochKind<T>,
}

impl<T: fmt::Debug> fmt::Debug for BlochFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BlochKind::Constant(c) => write!(f, "Constant({c:?})"),
            BlochKind::LogAtom { center, scale } => write!(f, "LogAtom({center:?}, {scale:?})"),
            BlochKind::General { label, .. } => write!(f, "General({label})"),
        }
    }
}

impl<T: Real> BlochFunction<T> {
    pub fn constant(c: C<T>) -> Self {
        BlochFunction { kind: BlochKind::Constant(c) }
    }

    pub fn one() -> Self {
        Self::constant(C::new(T::one(), T::zero()))
    }

    pub fn log_atom(center: BallPoint<T>, scale: T) -> Self {
        BlochFunction { kind: BlochKind::LogAtom { center, scale } }
    }

    pub fn general(
        label: impl Into<String>,
        value: impl Fn(&BallPoint<T>) -> C<T> + Send + Sync + 'static,
        radial: impl Fn(&BallPoint<T>) -> C<T> + Send + Sync + 'static,
    ) -> Self {
        BlochFunction { kind: BlochKind::General { value: Arc::new(value), radial: Arc::new(radial), label: label.into() } }
    }

    /// The first coordinate function `z ↦ z₁`.
    pub fn coordinate() -> Self {
        Self::general("z1", |z: &BallPoint<T>| z.z1(), |z: &BallPoint<T>| z.z1())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.kind, BlochKind::Constant(c) if c == C::new(T::one(), T::zero()))
    }

    pub fn eval(&self, z: &BallPoint<T>) -> C<T> {
        match &self.kind {
            BlochKind::Constant(c) => *c,
            BlochKind::LogAtom { center, scale } => {
                let one = C::new(T::one(), T::zero());
                let w = one - z.inner(center);
                one + (C::new(T::of(4.0), T::zero()) / w).ln() * *scale
            }
            BlochKind::General { value, .. } => value(z),
        }
    }

    pub fn radial_derivative(&self, z: &BallPoint<T>) -> C<T> {
        match &self.kind {
            BlochKind::Constant(_) => C::new(T::zero(), T::zero()),
            BlochKind::LogAtom { center, scale } => {
                let w = z.inner(center);
                w / (C::new(T::one(), T::zero()) - w) * *scale
            }
            BlochKind::General { radial, .. } => radial(z),
        }
    }

    fn foci(&self) -> Vec<BallPoint<T>> {
        match &self.kind {
            BlochKind::LogAtom { center, .. } if center.norm_sq() > T::zero() => vec![*center],
            _ => Vec::new(),
        }
    }
}

/// Sample points for the Bloch supremum: radii graded toward the sphere, angles graded
/// toward the focus directions.
pub fn bloch_grid<T: Real>(n: usize, resolution: usize, foci: &[BallPoint<T>]) -> Vec<BallPoint<T>> {
    let res = resolution.max(2);
    let m = 12 * res;
    let mut radii: Vec<T> = vec![T::zero()];
    for k in 0..=m {
        let gap = T::of(10.0).powf(-T::of(12.0) * T::nat(k) / T::nat(m));
        radii.push(T::one() - gap);
    }
    let two_pi = T::of(2.0) * T::PI();
    let na = 8 * res;
    let mut out = Vec::new();
    if n == 1 {
        let focus_angles: Vec<T> = foci.iter().map(|a| a.z1().arg()).collect();
        for &r in &radii {
            let mut angles: Vec<T> = (0..na).map(|j| two_pi * T::nat(j) / T::nat(na)).collect();
            let gap = T::one() - r;
            for &th in &focus_angles {
                angles.push(th);
                let mut h = gap * T::of(0.125);
                while h < T::PI() {
                    angles.push(th + h);
                    angles.push(th - h);
                    h = h * T::of(1.5);
                }
            }
            out.extend(angles.into_iter().map(|t| BallPoint::raw1(C::from_polar(r, t))));
        }
    } else {
        let k = res.max(4);
        let mut dirs = Vec::new();
        for iu in 0..k {
            let u = (T::nat(iu) + T::of(0.5)) / T::nat(k);
            for i1 in 0..k {
                for i2 in 0..k {
                    let p1 = two_pi * T::nat(i1) / T::nat(k);
                    let p2 = two_pi * T::nat(i2) / T::nat(k);
                    dirs.push([C::from_polar(u.sqrt(), p1), C::from_polar((T::one() - u).sqrt(), p2)]);
                }
            }
        }
        for &r in &radii {
            for d in &dirs {
                out.push(BallPoint::raw2(d[0] * r, d[1] * r));
            }
            let gap = T::one() - r;
            for a in foci {
                let na = a.norm();
                let (u1, u2) = (a.coords()[0] / na, a.coords()[1] / na);
                let mut psis = vec![T::zero()];
                let mut h = gap * T::of(0.125);
                while h < T::PI() {
                    psis.push(h);
                    psis.push(-h);
                    h = h * T::of(1.5);
                }
                for psi in psis {
                    let e = C::from_polar(r, psi);
                    out.push(BallPoint::raw2(u1 * e, u2 * e));
                }
            }
        }
    }
    out
}

fn bloch_sup<T: Real>(theta: &BlochFunction<T>, n: usize, resolution: usize) -> Result<T> {
    let grid = bloch_grid(n, resolution, &theta.foci());
    let vals: Vec<T> = grid
        .par_iter()
        .map(|z| {
            // 1 − |z|² from the radius directly keeps precision near the sphere
            let r = z.norm();
            let defect = (T::one() - r) * (T::one() + r);
            theta.radial_derivative(z).norm() * defect
        })
        .collect();
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        let z = grid[i].z1();
        return Err(Error::NonFiniteNode { index: i, re: z.re.f64(), im: z.im.f64() });
    }
    Ok(vals.into_iter().fold(T::zero(), T::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochNorm<T> {
    pub value: T,
    /// Same quantity on a grid of twice the resolution.
    pub refined: T,
    pub stable: bool,
}

/// `|θ(0)| + sup |Rθ(z)|(1 − |z|²)` over a graded grid.
pub fn bloch_norm<T: Real>(theta: &BlochFunction<T>, n: usize, grid_resolution: usize) -> Result<BlochNorm<T>> {
    let at0 = theta.eval(&BallPoint::origin(n)).norm();
    let value = at0 + bloch_sup(theta, n, grid_resolution)?;
    let refined = at0 + bloch_sup(theta, n, 2 * grid_resolution)?;
    let stable = (refined - value).abs() <= T::of(1e-3) * refined.max(T::min_positive_value());
    Ok(BlochNorm { value, refined, stable })
}

pub const BLOCH_GRID: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpClassReport<T> {
    pub integral: T,
    pub bloch_norm: T,
    /// Set when `λ ≤ 1/(1+α)`, where the integral need not converge.
    pub divergence_expected: bool,
}

/// `∫ exp(|θ| / (λ‖θ‖_ℬ)) dν_α` by the rule.
pub fn bloch_exponential_check<T: Real>(
    theta: &BlochFunction<T>,
    lambda: T,
    alpha: T,
    rule: &QuadratureRule<T>,
) -> Result<ExpClassReport<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::domain(format!("lambda = {lambda} must be positive")));
    }
    let norm = bloch_norm(theta, rule.dim(), BLOCH_GRID)?.value;
    if norm == T::zero() {
        return Err(Error::domain("the zero function has no exponential normalization"));
    }
    let scale = lambda * norm;
    let terms: Vec<T> = rule
        .nodes()
        .par_iter()
        .zip(rule.weights())
        .map(|(z, &w)| w * (theta.eval(z).norm() / scale).exp())
        .collect();
    let integral = pairwise_sum(&terms);
    Ok(ExpClassReport { integral, bloch_norm: norm, divergence_expected: lambda <= T::one() / (T::one() + alpha) })
}
