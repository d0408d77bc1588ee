//! Tensor-product rules for `dν_α` on the disc and on the ball of ℂ².
//!
//! Radially the rule works in `v = 1 − |z|²` with panels `[2^{-(m+1)}, 2^{-m}]`
//! carrying Gauss–Legendre nodes, closed by a Gauss–Jacobi panel on
//! `[0, 2^{-L}]` that absorbs the `v^α` factor. On the disc the angular rule is
//! composite Gauss–Legendre; around declared focus points (atom centers) the
//! panels shrink geometrically toward the focus angle, the finest matching the
//! distance `1 − r|a|` to the kernel singularity.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::BallPoint;
use crate::scalar::{pairwise_sum, Real, C};

use super::gauss::{jacobi, legendre};

/// Parameters of a rule; `build` turns them into nodes and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSpec<T> {
    pub alpha: T,
    pub dim: usize,
    /// Gauss points per radial panel; angular resolution scales with it.
    pub resolution: usize,
    /// Number of geometric radial panels; derived from the foci when absent.
    pub levels: Option<usize>,
    /// Points near which the integrand is expected to peak.
    pub foci: Vec<BallPoint<T>>,
    /// Radius up to which node spacing must resolve lattice cells.
    pub cell_radius: Option<T>,
}

impl<T: Real> RuleSpec<T> {
    pub fn new(alpha: T, dim: usize, resolution: usize) -> Self {
        RuleSpec { alpha, dim, resolution, levels: None, foci: Vec::new(), cell_radius: None }
    }

    pub fn with_foci(mut self, foci: impl IntoIterator<Item = BallPoint<T>>) -> Self {
        self.foci.extend(foci);
        self
    }

    pub fn with_cells(mut self, radius: T) -> Self {
        self.cell_radius = Some(radius);
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = Some(levels);
        self
    }

    fn max_levels() -> usize {
        let bits = (-T::epsilon().log2()).to_usize().unwrap_or(23);
        bits.saturating_sub(6).max(8)
    }

    pub fn effective_levels(&self) -> usize {
        let auto = || {
            let worst = self.foci.iter().map(|a| a.norm_sq()).fold(T::zero(), T::max);
            let extra = (T::one() / (T::one() - worst)).log2().ceil().to_usize().unwrap_or(0);
            24.max(extra + 16)
        };
        self.levels.unwrap_or_else(auto).min(Self::max_levels())
    }

    pub fn build(&self) -> Result<QuadratureRule<T>> {
        QuadratureRule::from_spec(self.clone())
    }
}

/// Nodes and normalized weights for `dν_α`.
#[derive(Debug)]
pub struct QuadratureRule<T> {
    spec: RuleSpec<T>,
    nodes: Vec<BallPoint<T>>,
    weights: Vec<T>,
    defect: Vec<T>,
    lebesgue_mass: T,
    companion: OnceLock<Box<QuadratureRule<T>>>,
}

impl<T: Real> Clone for QuadratureRule<T> {
    fn clone(&self) -> Self {
        QuadratureRule {
            spec: self.spec.clone(),
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            defect: self.defect.clone(),
            lebesgue_mass: self.lebesgue_mass,
            companion: OnceLock::new(),
        }
    }
}

/// `build_rule(alpha, n, resolution)` with no foci.
pub fn build_rule<T: Real>(alpha: T, n: usize, resolution: usize) -> Result<QuadratureRule<T>> {
    RuleSpec::new(alpha, n, resolution).build()
}

/// Radial nodes `(v, weight)` for `∫_0^1 g(v) v^α (1−v)^{n−1} n dv`.
fn radial<T: Real>(alpha: T, n: usize, q: usize, levels: usize) -> Result<Vec<(T, T)>> {
    let gl = legendre::<T>(q);
    let half = T::of(0.5);
    let weight = |v: T| v.powf(alpha) * (T::one() - v).powi(n as i32 - 1) * T::nat(n);
    let mut out = Vec::with_capacity(q * (levels + 1));
    for m in 0..levels {
        let hi = half.powi(m as i32);
        let lo = hi * half;
        let (mid, rad) = ((hi + lo) * half, (hi - lo) * half);
        for &(x, w) in &gl {
            let v = mid + rad * x;
            out.push((v, w * rad * weight(v)));
        }
    }
    let top = half.powi(levels as i32);
    let gj = jacobi::<T>(q, 0.0, alpha.f64())?;
    let scale = (top * half).powf(alpha + T::one());
    for (x, w) in gj {
        let v = top * half * (T::one() + x);
        out.push((v, w * scale * (T::one() - v).powi(n as i32 - 1) * T::nat(n)));
    }
    Ok(out)
}

/// Angular panels on one ring of the disc, as `(start, end)` pairs covering a full turn.
fn angular_panels<T: Real>(r: T, base: usize, foci: &[(T, T)]) -> Vec<(T, T)> {
    let two_pi = T::of(2.0) * T::PI();
    let mut cuts: Vec<T> = (0..base).map(|k| two_pi * T::nat(k) / T::nat(base)).collect();
    let wrap = |x: T| {
        let y = x / two_pi;
        (y - y.floor()) * two_pi
    };
    for &(theta, rho) in foci {
        let d = T::one() - r * rho;
        if d >= T::of(0.5) {
            continue;
        }
        let mut h = d * T::of(0.5);
        while h < T::PI() {
            cuts.push(wrap(theta + h));
            cuts.push(wrap(theta - h));
            h = h + h;
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tiny = T::epsilon() * T::of(64.0);
    cuts.dedup_by(|b, a| *b - *a <= tiny);
    if cuts.len() > 1 && two_pi - *cuts.last().unwrap() + cuts[0] <= tiny {
        cuts.pop();
    }
    let k = cuts.len();
    (0..k).map(|i| (cuts[i], if i + 1 < k { cuts[i + 1] } else { cuts[0] + two_pi })).collect()
}

impl<T: Real> QuadratureRule<T> {
    fn from_spec(spec: RuleSpec<T>) -> Result<Self> {
        if !(spec.alpha > -T::one()) {
            return Err(Error::domain(format!("weight exponent alpha = {} must exceed -1", spec.alpha)));
        }
        if spec.dim != 1 && spec.dim != 2 {
            return Err(Error::domain(format!("dimension {} not supported (n must be 1 or 2)", spec.dim)));
        }
        if spec.resolution < 2 {
            return Err(Error::domain("rule resolution must be at least 2"));
        }
        let q = spec.resolution;
        let levels = spec.effective_levels();
        let rad = radial(spec.alpha, spec.dim, q, levels)?;
        let raw_mass = pairwise_sum(&rad.iter().map(|x| x.1).collect::<Vec<_>>());
        let (mut nodes, mut weights, mut defect) = (Vec::new(), Vec::new(), Vec::new());
        if spec.dim == 1 {
            let qa = (q / 2).max(8);
            let ga = legendre::<T>(qa);
            let foci: Vec<(T, T)> = spec.foci.iter().map(|a| (a.z1().arg(), a.norm())).collect();
            let base = (q / 2).max(4);
            let two_pi = T::of(2.0) * T::PI();
            let rings: Vec<Vec<(BallPoint<T>, T, T)>> = rad
                .par_iter()
                .map(|&(v, wr)| {
                    let r = (T::one() - v).sqrt();
                    let mut panels = base;
                    if let Some(rc) = spec.cell_radius {
                        if r <= rc * (T::one() + T::of(1e-9)) {
                            let circ = two_pi * r / v;
                            let want = (T::of(3.0) * T::nat(q) * circ / T::nat(qa)).ceil();
                            panels = panels.max(want.to_usize().unwrap_or(base));
                        }
                    }
                    angular_panels(r, panels, &foci)
                        .into_iter()
                        .flat_map(|(a, b)| {
                            let (mid, half) = ((a + b) * T::of(0.5), (b - a) * T::of(0.5));
                            ga.iter()
                                .map(move |&(x, w)| {
                                    let th = mid + half * x;
                                    (BallPoint::raw1(C::from_polar(r, th)), wr * w * half / two_pi, v)
                                })
                                .collect::<Vec<_>>()
                        })
                        .collect()
                })
                .collect();
            for ring in rings {
                for (p, w, v) in ring {
                    nodes.push(p);
                    weights.push(w);
                    defect.push(v);
                }
            }
        } else {
            let gu = legendre::<T>((q / 2).max(4));
            let m = q.max(8);
            let two_pi = T::of(2.0) * T::PI();
            for &(v, wr) in &rad {
                let r = (T::one() - v).sqrt();
                for &(x, wu) in &gu {
                    let u = (T::one() + x) * T::of(0.5);
                    let (s1, s2) = (u.sqrt() * r, (T::one() - u).sqrt() * r);
                    for j1 in 0..m {
                        let p1 = two_pi * T::nat(j1) / T::nat(m);
                        for j2 in 0..m {
                            let p2 = two_pi * (T::nat(j2) + T::of(0.5)) / T::nat(m);
                            nodes.push(BallPoint::raw2(C::from_polar(s1, p1), C::from_polar(s2, p2)));
                            weights.push(wr * wu * T::of(0.5) / T::nat(m * m));
                            defect.push(v);
                        }
                    }
                }
            }
        }
        let total = pairwise_sum(&weights);
        for w in &mut weights {
            *w = *w / total;
        }
        let volume = if spec.dim == 1 { T::PI() } else { T::PI() * T::PI() * T::of(0.5) };
        Ok(QuadratureRule { spec, nodes, weights, defect, lebesgue_mass: raw_mass * volume, companion: OnceLock::new() })
    }

    pub fn spec(&self) -> &RuleSpec<T> {
        &self.spec
    }

    pub fn alpha(&self) -> T {
        self.spec.alpha
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[BallPoint<T>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `1 − |z|²` per node, computed from the radial variable rather than the coordinates.
    pub fn one_minus_sq(&self) -> &[T] {
        &self.defect
    }

    /// `∫(1−|w|²)^α dν(w)` for Lebesgue measure `ν`; equals `1/c_α`.
    pub fn lebesgue_mass(&self) -> T {
        self.lebesgue_mass
    }

    pub fn c_alpha(&self) -> T {
        T::one() / self.lebesgue_mass
    }

    /// Rule at half the resolution, used for error estimates.
    pub fn companion(&self) -> Result<&QuadratureRule<T>> {
        if let Some(c) = self.companion.get() {
            return Ok(c);
        }
        let mut spec = self.spec.clone();
        spec.resolution = (spec.resolution / 2).max(2);
        spec.levels = Some(self.spec.effective_levels());
        let built = Box::new(spec.build()?);
        Ok(self.companion.get_or_init(|| built))
    }

    /// Rule at twice the resolution.
    pub fn refined(&self) -> Result<QuadratureRule<T>> {
        let mut spec = self.spec.clone();
        spec.resolution *= 2;
        spec.build()
    }

    /// `Σ w_i g(z_i)` in fixed pairwise order.
    pub fn integrate(&self, g: impl Fn(&BallPoint<T>) -> T + Sync) -> T {
        let vals: Vec<T> = self.nodes.par_iter().zip(&self.weights).map(|(z, &w)| w * g(z)).collect();
        pairwise_sum(&vals)
    }

    /// Same as [`integrate`](Self::integrate) with `1 − |z|²` passed alongside each node.
    pub fn integrate_with_defect(&self, g: impl Fn(&BallPoint<T>, T) -> T + Sync) -> T {
        let vals: Vec<T> = (0..self.nodes.len())
            .into_par_iter()
            .map(|i| self.weights[i] * g(&self.nodes[i], self.defect[i]))
            .collect();
        pairwise_sum(&vals)
    }

    /// Indices of nodes with `|z| ≤ r`.
    pub fn indices_within(&self, r: T) -> Vec<usize> {
        let v = T::one() - r * r;
        (0..self.nodes.len()).filter(|&i| self.defect[i] >= v * (T::one() - T::of(1e-12))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_nodes_inside() {
        for (alpha, n) in [(0.0, 1), (1.0, 1), (-0.5, 1), (6.0, 1), (0.0, 2), (1.5, 2)] {
            let rule = build_rule::<f64>(alpha, n, 8).unwrap();
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(rule.nodes().iter().all(|z| z.norm_sq() < 1.0));
        }
        assert!(build_rule::<f64>(-1.0, 1, 8).is_err());
    }

    #[test]
    fn radial_moment_oracles() {
        let rule = build_rule::<f64>(0.0, 1, 16).unwrap();
        assert!((rule.integrate(|z| z.norm_sq()) - 0.5).abs() < 1e-13);
        let rule = build_rule::<f64>(1.0, 1, 16).unwrap();
        assert!((rule.integrate_with_defect(|_, v| v) - 2.0 / 3.0).abs() < 1e-13);
        // n = 2: E|z_1|^2 = 1/3 for alpha = 0
        let rule = build_rule::<f64>(0.0, 2, 8).unwrap();
        assert!((rule.integrate(|z| z.z1().norm_sqr()) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_mass_matches_beta_integral() {
        // π ∫_0^1 v^α dv = π/(α+1) on the disc
        for alpha in [0.0, 1.0, 2.5] {
            let rule = build_rule::<f64>(alpha, 1, 8).unwrap();
            assert!((rule.lebesgue_mass() - std::f64::consts::PI / (alpha + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn focus_panels_cover_the_circle() {
        let panels = angular_panels(0.99_f64, 4, &[(0.3, 0.999), (-2.0, 0.9)]);
        let total: f64 = panels.iter().map(|(a, b)| b - a).sum();
        assert!((total - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(panels.iter().all(|(a, b)| b > a));
        let finest = panels.iter().map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
        assert!(finest <= (1.0 - 0.99 * 0.999) * 0.5 + 1e-15);
    }

    #[test]
    fn f32_rule_is_normalized() {
        let rule = build_rule::<f32>(0.0, 1, 8).unwrap();
        let s: f32 = rule.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-5);
        assert!((rule.integrate(|z| z.norm_sq()) - 0.5).abs() < 1e-5);
    }
}
