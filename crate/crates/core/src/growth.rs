//! Growth functions: power, power-over-log, exponential and tabulated families,
//! together with the sampled diagnostics used to classify them (type constants,
//! indices, Δ₂ doubling, complementary functions and equivalence).
//!
//! Every diagnostic here is measured on a finite log-spaced grid. Nothing is
//! proved symbolically; reports carry the measured constant and whether it was
//! stable under grid refinement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{log_grid, Real};

/// Log-spaced sampling grid used by the diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { lo: 1e-8, hi: 1e8, points: 10_000 }
    }
}

impl Grid {
    pub fn refined(self) -> Self {
        Grid { points: 2 * self.points, ..self }
    }

    pub fn samples<T: Real>(&self) -> Vec<T> {
        log_grid(T::of(self.lo), T::of(self.hi), self.points)
    }
}

/// How a table of knots is interpolated between knots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interp {
    /// Piecewise power law (linear in log-log coordinates).
    #[default]
    LogLog,
    /// Piecewise linear (chords); an upper bound for convex data.
    Linear,
}

/// Increasing knots `(t, Φ(t))` with `t > 0` and non-decreasing values.
#[derive(Clone, Debug, PartialEq)]
pub struct Table<T> {
    ts: Vec<T>,
    ys: Vec<T>,
    interp: Interp,
}

impl<T: Real> Table<T> {
    pub fn new(knots: Vec<(T, T)>, interp: Interp) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::domain("tabulated growth function needs at least two knots"));
        }
        let (ts, ys): (Vec<T>, Vec<T>) = knots.into_iter().unzip();
        for i in 0..ts.len() {
            if !(ts[i] > T::zero()) || !ts[i].is_finite() || !(ys[i] >= T::zero()) || !ys[i].is_finite() {
                return Err(Error::domain(format!("knot {i} is not a finite (t > 0, y >= 0) pair")));
            }
            if i > 0 && (ts[i] <= ts[i - 1] || ys[i] < ys[i - 1]) {
                return Err(Error::domain(format!(
                    "knots must have increasing t and non-decreasing values (knot {i})"
                )));
            }
        }
        if *ys.last().unwrap() <= T::zero() {
            return Err(Error::domain("tabulated growth function is identically zero"));
        }
        Ok(Table { ts, ys, interp })
    }

    pub fn knots(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.ts.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    fn slope(&self, i: usize) -> T {
        let (t0, t1, y0, y1) = (self.ts[i], self.ts[i + 1], self.ys[i], self.ys[i + 1]);
        if y0 > T::zero() && y1 > T::zero() {
            (y1 / y0).ln() / (t1 / t0).ln()
        } else {
            T::one()
        }
    }

    fn eval(&self, t: T) -> T {
        let n = self.ts.len();
        if t <= T::zero() {
            return T::zero();
        }
        if t <= self.ts[0] {
            let k = self.slope(0);
            let k = if k > T::zero() { k } else { T::one() };
            return self.ys[0] * (t / self.ts[0]).powf(k);
        }
        if t >= self.ts[n - 1] {
            let k = self.slope(n - 2);
            let k = if k > T::zero() { k } else { T::one() };
            return self.ys[n - 1] * (t / self.ts[n - 1]).powf(k);
        }
        let i = match self.ts.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let (t0, t1, y0, y1) = (self.ts[i], self.ts[i + 1], self.ys[i], self.ys[i + 1]);
        match self.interp {
            Interp::LogLog if y0 > T::zero() && y1 > T::zero() => {
                let theta = (t / t0).ln() / (t1 / t0).ln();
                (y0.ln() + theta * (y1 / y0).ln()).exp()
            }
            _ => y0 + (y1 - y0) * (t - t0) / (t1 - t0),
        }
    }
}

/// The family a growth function belongs to.
#[derive(Clone, Debug, PartialEq)]
pub enum Kind<T> {
    /// `t^p`.
    Power(T),
    /// `Φ(t / log(e + t))` for the boxed base `Φ`.
    PowerLog(Box<GrowthFunction<T>>),
    /// `e^t - 1`.
    ExpMinusOne,
    Tabulated(Table<T>),
    /// `factor · Φ(t)`.
    Scaled { factor: T, base: Box<GrowthFunction<T>> },
    /// `Φ(t^(1/p))`.
    Compose { base: Box<GrowthFunction<T>>, p: T },
}

/// A growth function with its declared type exponents.
///
/// `lower_type` is the declared `p` for membership in the lower-type class
/// (`Φ(st) ≤ C t^p Φ(s)` for `t ≤ 1`, `Φ(t)/t` non-increasing) and
/// `upper_type` the declared `q` of the upper-type class.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFunction<T> {
    pub kind: Kind<T>,
    pub lower_type: Option<T>,
    pub upper_type: Option<T>,
}

/// Lower and upper indices: extrema of `tΦ'(t)/Φ(t)` over the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IndexPair<T> {
    pub a_phi: T,
    pub b_phi: T,
    /// Where the infimum was attained.
    pub a_at: T,
    /// Where the supremum was attained.
    pub b_at: T,
    /// Infimum attained at an end of the grid while still decreasing.
    pub a_boundary: bool,
    /// Supremum attained at an end of the grid while still increasing.
    pub b_diverging: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Delta2Report<T> {
    /// sup Φ(2t)/Φ(t) on the base grid.
    pub k: T,
    /// The same supremum on the refined grid.
    pub k_refined: T,
    pub argmax: T,
    pub diverging: bool,
    pub satisfied: bool,
}

/// A measured type constant and its grid stability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TypeConstant<T> {
    pub c: T,
    pub c_refined: T,
    pub stable: bool,
}

const REL_STABLE: f64 = 1e-2;

impl<T: Real> GrowthFunction<T> {
    pub fn power(p: T) -> Self {
        let one = T::one();
        GrowthFunction {
            kind: Kind::Power(p),
            lower_type: if p <= one { Some(p) } else { None },
            upper_type: if p >= one { Some(p) } else { None },
        }
    }

    /// `Ψ(t) = Φ(t / log(e + t))`; inherits the lower type of `Φ`.
    pub fn power_log(base: GrowthFunction<T>) -> Self {
        let lower = base.lower_type;
        GrowthFunction { kind: Kind::PowerLog(Box::new(base)), lower_type: lower, upper_type: None }
    }

    pub fn exp_minus_one() -> Self {
        GrowthFunction { kind: Kind::ExpMinusOne, lower_type: None, upper_type: None }
    }

    pub fn tabulated(table: Table<T>) -> Self {
        GrowthFunction { kind: Kind::Tabulated(table), lower_type: None, upper_type: None }
    }

    pub fn scaled(self, factor: T) -> Self {
        let (l, u) = (self.lower_type, self.upper_type);
        GrowthFunction { kind: Kind::Scaled { factor, base: Box::new(self) }, lower_type: l, upper_type: u }
    }

    pub fn with_types(mut self, lower: Option<T>, upper: Option<T>) -> Self {
        self.lower_type = lower;
        self.upper_type = upper;
        self
    }

    /// Φ(t), `t ≥ 0`.
    pub fn evaluate(&self, t: T) -> Result<T> {
        if t < T::zero() || t.is_nan() {
            return Err(Error::domain(format!("growth function evaluated at negative t = {t}")));
        }
        Ok(self.value(t))
    }

    /// Φ(t) without the domain check; negative input is treated as 0.
    pub fn value(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        match &self.kind {
            Kind::Power(p) => t.powf(*p),
            Kind::PowerLog(base) => base.value(t / (T::E() + t).ln()),
            Kind::ExpMinusOne => t.exp_m1(),
            Kind::Tabulated(table) => table.eval(t),
            Kind::Scaled { factor, base } => *factor * base.value(t),
            Kind::Compose { base, p } => base.value(t.powf(T::one() / *p)),
        }
    }

    /// Elasticity `tΦ'(t)/Φ(t)`, in closed form where available.
    pub fn elasticity(&self, t: T) -> T {
        match &self.kind {
            Kind::Power(p) => *p,
            Kind::PowerLog(base) => {
                let l = (T::E() + t).ln();
                base.elasticity(t / l) * (T::one() - t / ((T::E() + t) * l))
            }
            Kind::ExpMinusOne => {
                if t == T::zero() {
                    T::one()
                } else {
                    t / -(-t).exp_m1()
                }
            }
            Kind::Tabulated(_) => {
                let h = T::of(1e-4);
                let (up, dn) = (self.value(t * h.exp()), self.value(t * (-h).exp()));
                (up.ln() - dn.ln()) / (h + h)
            }
            Kind::Scaled { base, .. } => base.elasticity(t),
            Kind::Compose { base, p } => base.elasticity(t.powf(T::one() / *p)) / *p,
        }
    }

    /// Φ'(t) for `t > 0`.
    pub fn derivative(&self, t: T) -> T {
        match &self.kind {
            Kind::ExpMinusOne => t.exp(),
            _ => self.elasticity(t) * self.value(t) / t,
        }
    }

    /// Φ⁻¹(y): closed form where available, bracketed bisection otherwise.
    pub fn inverse(&self, y: T) -> T {
        if y <= T::zero() {
            return T::zero();
        }
        match &self.kind {
            Kind::Power(p) => y.powf(T::one() / *p),
            Kind::ExpMinusOne => y.ln_1p(),
            Kind::Scaled { factor, base } => base.inverse(y / *factor),
            Kind::Compose { base, p } => base.inverse(y).powf(*p),
            Kind::PowerLog(_) | Kind::Tabulated(_) => self.bisect_inverse(y),
        }
    }

    fn bisect_inverse(&self, y: T) -> T {
        let two = T::of(2.0);
        let (mut lo, mut hi) = (T::one(), T::one());
        let huge = T::max_value().sqrt();
        while self.value(lo) > y && lo > T::min_positive_value() {
            lo = lo / two;
        }
        while self.value(hi) < y && hi < huge {
            hi = hi * two;
        }
        if self.value(lo) > y {
            return lo;
        }
        for _ in 0..200 {
            let mid = if lo > T::zero() { (lo * hi).sqrt() } else { (lo + hi) / two };
            if !(mid > lo && mid < hi) {
                break;
            }
            if self.value(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (vl, vh) = (self.value(lo), self.value(hi));
        if (y - vl).abs() <= (vh - y).abs() {
            lo
        } else {
            hi
        }
    }

    /// Lower/upper indices `inf`/`sup` of `tΦ'/Φ` over the grid.
    pub fn indices(&self, grid: Grid) -> Result<IndexPair<T>> {
        let ts = grid.samples::<T>();
        let mut e = Vec::with_capacity(ts.len());
        for &t in &ts {
            let v = self.elasticity(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { what: "elasticity tΦ'(t)/Φ(t)".into(), t: t.f64() });
            }
            e.push(v);
        }
        let (mut ia, mut ib) = (0, 0);
        for i in 0..e.len() {
            if e[i] < e[ia] {
                ia = i;
            }
            if e[i] > e[ib] {
                ib = i;
            }
        }
        let last = e.len() - 1;
        let tol = T::of(1e-9);
        let at_end = |i: usize, sign: T| {
            (i == 0 && sign * (e[0] - e[1]) > tol * e[0].abs()) || (i == last && sign * (e[last] - e[last - 1]) > tol * e[last].abs())
        };
        Ok(IndexPair {
            a_phi: e[ia],
            b_phi: e[ib],
            a_at: ts[ia],
            b_at: ts[ib],
            a_boundary: at_end(ia, -T::one()),
            b_diverging: at_end(ib, T::one()),
        })
    }

    fn ratio_sup<F: Fn(T) -> T>(ts: &[T], f: F) -> (T, usize) {
        let mut best = (T::neg_infinity(), 0);
        for (i, &t) in ts.iter().enumerate() {
            let r = f(t);
            let r = if r.is_nan() { T::infinity() } else { r };
            if r > best.0 {
                best = (r, i);
            }
        }
        best
    }

    /// sup Φ(2t)/Φ(t) on the grid and on its refinement.
    pub fn check_delta2(&self, grid: Grid) -> Delta2Report<T> {
        let two = T::of(2.0);
        let ratio = |t: T| self.value(two * t) / self.value(t);
        let base = grid.samples::<T>();
        let fine = grid.refined().samples::<T>();
        let (k, i) = Self::ratio_sup(&base, ratio);
        let (k_refined, _) = Self::ratio_sup(&fine, ratio);
        let last = base.len() - 1;
        let growing_tail = |idx: usize| {
            let rel = T::of(1e-6);
            (idx == last && ratio(base[last]) > ratio(base[last - 1]) * (T::one() + rel))
                || (idx == 0 && ratio(base[0]) > ratio(base[1]) * (T::one() + rel))
        };
        let diverging = !k.is_finite() || growing_tail(i);
        let stable = ((k - k_refined) / k).abs() <= T::of(1e-3);
        Delta2Report { k, k_refined, argmax: base[i], diverging, satisfied: !diverging && stable }
    }

    fn type_sup(&self, exponent: T, upper: bool, points: usize) -> T {
        let g = Grid { lo: 1e-8, hi: 1e8, points };
        let ss = g.samples::<T>();
        let ts: Vec<T> = if upper {
            log_grid(T::one(), T::of(1e8), points / 2)
        } else {
            log_grid(T::of(1e-8), T::one(), points / 2)
        };
        let mut c = T::zero();
        for &s in &ss {
            let ps = self.value(s);
            if !(ps > T::zero()) || !ps.is_finite() {
                continue;
            }
            for &t in &ts {
                let v = self.value(s * t);
                if !v.is_finite() {
                    return T::infinity();
                }
                let r = v / (t.powf(exponent) * ps);
                if r > c {
                    c = r;
                }
            }
        }
        c
    }

    /// Measured `C` in `Φ(st) ≤ C t^p Φ(s)` for `0 < t ≤ 1`.
    pub fn lower_type_constant(&self, p: T) -> TypeConstant<T> {
        let (c, c_refined) = (self.type_sup(p, false, 400), self.type_sup(p, false, 800));
        TypeConstant { c, c_refined, stable: c.is_finite() && ((c - c_refined) / c).abs() < T::of(REL_STABLE) }
    }

    /// Measured `C` in `Φ(st) ≤ C t^q Φ(s)` for `t ≥ 1`.
    pub fn upper_type_constant(&self, q: T) -> TypeConstant<T> {
        let (c, c_refined) = (self.type_sup(q, true, 400), self.type_sup(q, true, 800));
        TypeConstant { c, c_refined, stable: c.is_finite() && ((c - c_refined) / c).abs() < T::of(REL_STABLE) }
    }

    /// Φ_p(t) = Φ(t^(1/p)).
    pub fn power_compose(&self, p: T) -> Result<Self> {
        if !(p > T::zero()) {
            return Err(Error::domain(format!("power_compose needs p > 0, got {p}")));
        }
        if let Kind::Power(q) = self.kind {
            return Ok(Self::power(q / p));
        }
        let tol = T::of(1e-12);
        let upper = match self.lower_type {
            Some(lp) if lp + tol >= p => Some(T::one() / p),
            _ => None,
        };
        Ok(GrowthFunction { kind: Kind::Compose { base: Box::new(self.clone()), p }, lower_type: None, upper_type: upper })
    }

    /// Chord slopes non-decreasing on the grid (relative tolerance).
    pub fn is_convex_sampled(&self, grid: Grid) -> bool {
        let ts = grid.samples::<T>();
        let vals: Vec<T> = ts.iter().map(|&t| self.value(t)).collect();
        let mut prev = vals[0] / ts[0];
        for i in 0..ts.len() - 1 {
            if !vals[i + 1].is_finite() {
                break;
            }
            let s = (vals[i + 1] - vals[i]) / (ts[i + 1] - ts[i]);
            if s < prev * (T::one() - T::of(1e-7)) - T::of(1e-300f64.max(T::min_positive_value().f64())) {
                return false;
            }
            prev = s;
        }
        true
    }

    /// `t ↦ Φ(t)/t` non-increasing on the grid.
    pub fn ratio_non_increasing(&self, grid: Grid) -> bool {
        let ts = grid.samples::<T>();
        let mut prev = T::infinity();
        for &t in &ts {
            let r = self.value(t) / t;
            if r > prev * (T::one() + T::of(1e-9)) {
                return false;
            }
            prev = r;
        }
        true
    }

    /// Young complementary `Ψ(s) = sup_t (ts − Φ(t))`, tabulated on a dense log grid.
    pub fn complementary(&self) -> Result<Self> {
        let grid = Grid::default();
        if !self.is_convex_sampled(grid) {
            return Err(Error::precondition("complementary function requires a convex growth function"));
        }
        let coarse = log_grid(T::of(grid.lo), T::of(grid.hi), 4001);
        let objective = |t: T, s: T| t * s - self.value(t);
        let knots_s = log_grid(T::of(grid.lo), T::of(grid.hi), 100_001);
        let mut idx = 0usize;
        let mut knots = Vec::with_capacity(knots_s.len());
        for &s in &knots_s {
            while idx + 1 < coarse.len() && objective(coarse[idx + 1], s) >= objective(coarse[idx], s) {
                idx += 1;
            }
            let lo = if idx == 0 { T::zero() } else { coarse[idx - 1] };
            let hi = coarse[(idx + 1).min(coarse.len() - 1)];
            let best = golden_max(|t| objective(t, s), lo, hi).max(T::zero());
            knots.push((s, best));
        }
        // Values must be non-decreasing; the dense grid makes any reordering round-off.
        for i in 1..knots.len() {
            if knots[i].1 < knots[i - 1].1 {
                knots[i].1 = knots[i - 1].1;
            }
        }
        Ok(Self::tabulated(Table::new(knots, Interp::Linear)?))
    }

    /// Largest `c ∈ (0, 1]` with `cΦ(ct) ≤ other(t) ≤ c⁻¹Φ(t/c)` on the grid.
    ///
    /// Returns `None` when no such `c` exists or when the constant moves by
    /// more than 1% after widening the grid by two decades on each side.
    pub fn equivalence_constant(&self, other: &GrowthFunction<T>, grid: Grid) -> Option<T> {
        let c = self.equivalence_on(other, grid)?;
        let wide = Grid { lo: grid.lo * 1e-2, hi: grid.hi * 1e2, points: grid.points + grid.points / 4 };
        let c_wide = self.equivalence_on(other, wide)?;
        if ((c - c_wide) / c).abs() <= T::of(REL_STABLE) {
            Some(c)
        } else {
            None
        }
    }

    fn equivalence_on(&self, other: &GrowthFunction<T>, grid: Grid) -> Option<T> {
        let ts = grid.samples::<T>();
        let slack = T::one() + T::of(1e-12);
        let holds = |c: T| {
            ts.iter().all(|&t| {
                let v = other.value(t);
                let hi = self.value(t / c) / c;
                c * self.value(c * t) <= v * slack && (v <= hi * slack || !hi.is_finite())
            })
        };
        if holds(T::one()) {
            return Some(T::one());
        }
        let mut lo = T::of(1e-12);
        if !holds(lo) {
            return None;
        }
        let mut hi = T::one();
        for _ in 0..60 {
            let mid = (lo * hi).sqrt();
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

/// Maximum of a concave function on `[lo, hi]` by golden-section search.
pub(crate) fn golden_max<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T) -> T {
    let ratio = T::of(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a <= T::epsilon() * (a.abs() + b.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    f(lo).max(f(hi)).max(f1).max(f2)
}

/// Serializable description of a growth function, e.g. `{"kind":"power","p":0.5}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthSpec {
    Power { p: f64 },
    PowerLog { base: Box<GrowthSpec> },
    ExpMinusOne,
    Tabulated {
        knots: Vec<[f64; 2]>,
        #[serde(default)]
        interp: Interp,
    },
    Scaled { factor: f64, base: Box<GrowthSpec> },
    Compose { p: f64, base: Box<GrowthSpec> },
    Complementary { base: Box<GrowthSpec> },
}

impl GrowthSpec {
    pub fn build<T: Real>(&self) -> Result<GrowthFunction<T>> {
        Ok(match self {
            GrowthSpec::Power { p } => {
                if !(*p > 0.0) {
                    return Err(Error::domain(format!("power growth function needs p > 0, got {p}")));
                }
                GrowthFunction::power(T::of(*p))
            }
            GrowthSpec::PowerLog { base } => GrowthFunction::power_log(base.build()?),
            GrowthSpec::ExpMinusOne => GrowthFunction::exp_minus_one(),
            GrowthSpec::Tabulated { knots, interp } => GrowthFunction::tabulated(Table::new(
                knots.iter().map(|k| (T::of(k[0]), T::of(k[1]))).collect(),
                *interp,
            )?),
            GrowthSpec::Scaled { factor, base } => {
                if !(*factor > 0.0) {
                    return Err(Error::domain("scale factor must be positive"));
                }
                base.build::<T>()?.scaled(T::of(*factor))
            }
            GrowthSpec::Compose { p, base } => base.build::<T>()?.power_compose(T::of(*p))?,
            GrowthSpec::Complementary { base } => base.build::<T>()?.complementary()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = GrowthFunction<f64>;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(G::power(2.0).evaluate(3.0).unwrap(), 9.0);
        assert_eq!(G::exp_minus_one().evaluate(0.0).unwrap(), 0.0);
        let psi = G::power_log(G::power(1.0));
        let oracle = 1.0 / (std::f64::consts::E + 1.0).ln();
        assert!(rel(psi.evaluate(1.0).unwrap(), oracle) < 1e-15);
        assert!((psi.evaluate(1.0).unwrap() - 0.761_463).abs() < 1e-6);
        assert!(matches!(G::power(2.0).evaluate(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn inverse_examples() {
        assert!(rel(G::power(2.0).inverse(9.0), 3.0) < 1e-15);
        assert!(rel(G::exp_minus_one().inverse(std::f64::consts::E - 1.0), 1.0) < 1e-15);
        assert_eq!(G::power(2.0).inverse(0.0), 0.0);
        // Independent bisection oracle on t/log(e+t) then Φ = sqrt.
        let psi = G::power_log(G::power(0.5));
        let f = |t: f64| (t / (std::f64::consts::E + t).ln()).sqrt();
        let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if f(m) < 0.5 {
                lo = m
            } else {
                hi = m
            }
        }
        let t_star = psi.inverse(0.5);
        assert!(rel(t_star, lo) < 1e-10);
        assert!((psi.value(t_star) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn power_indices_are_exact() {
        for p in [0.25, 0.5, 1.0, 2.0, 3.5] {
            let ix = G::power(p).indices(Grid::default()).unwrap();
            assert!((ix.a_phi - p).abs() < 1e-10 && (ix.b_phi - p).abs() < 1e-10);
            assert!(!ix.b_diverging && !ix.a_boundary);
        }
    }

    #[test]
    fn exp_indices_diverge_upward() {
        let ix = G::exp_minus_one().indices(Grid::default()).unwrap();
        // closed form t/(1-e^{-t}) at the grid ends
        assert!((ix.a_phi - 1.0).abs() < 1e-7);
        assert!(ix.b_diverging);
        assert!(rel(ix.b_phi, 1e8 / (1.0 - (-1e8f64).exp())) < 1e-12);
    }

    #[test]
    fn power_log_indices_band() {
        let ix = G::power_log(G::power(1.0)).indices(Grid::default()).unwrap();
        // grid minimization oracle of 1 - t/((e+t)log(e+t))
        let e = std::f64::consts::E;
        let oracle = Grid::default()
            .samples::<f64>()
            .into_iter()
            .map(|t| 1.0 - t / ((e + t) * (e + t).ln()))
            .fold(f64::INFINITY, f64::min);
        assert!(rel(ix.a_phi, oracle) < 1e-12);
        assert!(ix.a_phi > 0.0 && ix.a_phi < 1.0);
        assert!(ix.b_phi <= 1.0 + 1e-12);
    }

    #[test]
    fn tabulated_indices_report_flat_region() {
        let table = Table::new(vec![(1.0, 0.0), (2.0, 1.0), (4.0, 3.0)], Interp::LogLog).unwrap();
        let g = G::tabulated(table);
        assert!(matches!(g.indices(Grid::default()), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn complementary_power_pairs() {
        let half_sq = G::power(2.0).scaled(0.5);
        let psi = half_sq.complementary().unwrap();
        for s in [1e-3, 0.1, 1.0, 7.5, 1e3] {
            assert!(rel(psi.value(s), s * s / 2.0) < 1e-6, "s={s}");
        }
        let cubic = G::power(3.0).scaled(1.0 / 3.0);
        let psi = cubic.complementary().unwrap();
        for s in [1e-2, 0.5, 2.0, 40.0] {
            assert!(rel(psi.value(s), s.powf(1.5) / 1.5) < 1e-6, "s={s}");
        }
        assert!(matches!(G::power(0.5).complementary(), Err(Error::Precondition(_))));
    }

    #[test]
    fn complementary_exp_young_inequality() {
        use rand::{Rng, SeedableRng};
        let phi = G::exp_minus_one();
        let psi = phi.complementary().unwrap();
        // closed form s log s - s + 1 for s >= 1
        for s in [0.5_f64, 1.0, 2.0, 10.0, 1e4] {
            let exact = if s <= 1.0 { 0.0 } else { s * s.ln() - s + 1.0 };
            assert!((psi.value(s) - exact).abs() <= 1e-6 * exact.max(1.0), "s={s}");
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let t: f64 = 10f64.powf(rng.gen_range(-4.0..1.5));
            let s: f64 = 10f64.powf(rng.gen_range(-4.0..4.0));
            let resid = phi.value(t) + psi.value(s) - t * s;
            assert!(resid / (t * s).max(1.0) >= -1e-9, "t={t} s={s} resid={resid}");
        }
        // pairs on the equality curve s = Φ'(t)
        for i in 0..200 {
            let t = 1e-3 * 1.05f64.powi(i);
            let s = t.exp();
            let resid = phi.value(t) + psi.value(s) - t * s;
            assert!(resid / (t * s).max(1.0) >= -1e-9);
        }
    }

    #[test]
    fn delta2_examples() {
        let r = G::power(1.5).check_delta2(Grid::default());
        assert!(rel(r.k, 2f64.powf(1.5)) < 1e-12 && r.satisfied);
        let r = G::exp_minus_one().check_delta2(Grid::default());
        assert!(r.diverging && !r.satisfied);
        // closed form (e^{2t}-1)/(e^t-1) = e^t + 1 increases
        let e = G::exp_minus_one();
        for t in [1.0, 10.0, 100.0] {
            assert!(rel(e.value(2.0 * t) / e.value(t), t.exp() + 1.0) < 1e-12);
        }
        let r = G::power_log(G::power(0.5)).check_delta2(Grid::default());
        assert!(r.satisfied && r.k <= 2f64.sqrt() * 1.000_001);
    }

    #[test]
    fn ratio_non_increasing_implies_k_at_most_two() {
        for g in [G::power(0.3), G::power(1.0), G::power_log(G::power(1.0)), G::power_log(G::power(0.5))] {
            assert!(g.ratio_non_increasing(Grid::default()));
            assert!(g.check_delta2(Grid::default()).k <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn power_compose_examples() {
        assert_eq!(G::power(0.5).power_compose(0.5).unwrap().kind, Kind::Power(1.0));
        for p in [0.2, 0.7, 1.0] {
            assert_eq!(G::power(p).power_compose(p).unwrap().kind, Kind::Power(1.0));
        }
        let c = G::power_log(G::power(1.0)).power_compose(0.5).unwrap();
        assert!(c.is_convex_sampled(Grid { lo: 1e-6, hi: 1e6, points: 2000 }));
        assert_eq!(c.upper_type, Some(2.0));
        assert!(G::power(1.0).power_compose(0.0).is_err());
    }

    #[test]
    fn lower_type_constants_are_grid_stable() {
        let g = G::power_log(G::power(1.0));
        let c = g.lower_type_constant(g.lower_type.unwrap() * 0.9);
        assert!(c.stable && c.c.is_finite(), "{c:?}");
        let c = G::power(0.5).lower_type_constant(0.5);
        assert!(rel(c.c, 1.0) < 1e-9 && c.stable);
        let c = G::power(3.0).upper_type_constant(3.0);
        assert!(rel(c.c, 1.0) < 1e-9 && c.stable);
    }

    #[test]
    fn equivalence_diagnostic() {
        let a = G::power(1.0);
        let b = G::power(1.0).scaled(0.25);
        let c = a.equivalence_constant(&b, Grid { lo: 1e-4, hi: 1e4, points: 200 }).unwrap();
        assert!(c > 0.49 && c <= 0.5 + 1e-9, "{c}");
        assert_eq!(a.equivalence_constant(&a, Grid::default()), Some(1.0));
        assert!(G::power(1.0).equivalence_constant(&G::power(2.0), Grid::default()).is_none());
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec: GrowthSpec = serde_json::from_str(r#"{"kind":"power","p":0.5}"#).unwrap();
        assert_eq!(spec, GrowthSpec::Power { p: 0.5 });
        let nested = GrowthSpec::PowerLog { base: Box::new(spec) };
        let text = serde_json::to_string(&nested).unwrap();
        assert_eq!(serde_json::from_str::<GrowthSpec>(&text).unwrap(), nested);
        let g: G = nested.build().unwrap();
        assert_eq!(g.lower_type, Some(0.5));
    }
}
