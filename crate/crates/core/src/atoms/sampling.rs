use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BallPoint, JointLattice};
use crate::growth::GrowthFunction;
use crate::quad::{c_alpha, modular, BallFunction, BallRule, QuadratureRule, RuleSpec};
use crate::scalar::{inv_pow, inv_pow_abs, pairwise_sum, pairwise_sum_c, Real, C};

use super::atom::{Atom, AtomicSeries};

/// Which weight the cell measures use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    /// `β = b − n − 1`.
    Concave,
    /// `β = α`, with each coefficient multiplied by `(c_{b−n−1}/c_α)(1−|a|²)^{b−n−1−α}`
    /// so the operator still approximates the identity.
    Convex,
}

/// The sampling operator `Sf(z) = Σ μ_{kj} f(a_{kj}) (1 − ⟨z, a_{kj}⟩)^{-b}` of a joint lattice.
#[derive(Clone, Debug)]
pub struct SamplingOperator<T> {
    pub centers: Vec<BallPoint<T>>,
    /// `ν_β(D_kj)` by quadrature over the nodes assigned to each cell.
    pub cell_measures: Vec<T>,
    /// Coefficient factor per center: the cell measure, corrected in convex mode.
    pub weights: Vec<T>,
    pub b: T,
    pub beta: T,
    pub alpha: T,
    pub mode: BetaMode,
    pub dim: usize,
    pub truncation_radius: T,
    /// Total rule weight of `{|z| ≤ R}`, which the cells partition.
    pub truncated_measure: T,
}

impl<T: Real> SamplingOperator<T> {
    pub fn new(joint: &JointLattice<T>, b: T, mode: BetaMode, alpha: T, resolution: usize) -> Result<Self> {
        let n = joint.coarse.dim;
        let reproducing = b - T::nat(n + 1);
        if !(reproducing > -T::one()) {
            return Err(Error::domain(format!("exponent b = {b} must exceed n = {n}")));
        }
        let beta = match mode {
            BetaMode::Concave => reproducing,
            BetaMode::Convex => alpha,
        };
        let r = joint.coarse.truncation_radius;
        let rule = RuleSpec::new(beta, n, resolution).with_cells(r).build()?;
        let owners = joint.assign_fine_cells(rule.nodes());
        let m = joint.fine_len();
        let mut per_cell: Vec<Vec<T>> = vec![Vec::new(); m];
        let mut inside = Vec::new();
        for (i, o) in owners.iter().enumerate() {
            if let Some(j) = o {
                per_cell[*j].push(rule.weights()[i]);
                inside.push(rule.weights()[i]);
            }
        }
        if let Some(cell) = per_cell.iter().position(Vec::is_empty) {
            return Err(Error::EmptyCell { cell });
        }
        let cell_measures: Vec<T> = per_cell.iter().map(|w| pairwise_sum(w)).collect();
        let centers = joint.fine_centers();
        let weights = match mode {
            BetaMode::Concave => cell_measures.clone(),
            BetaMode::Convex => {
                let ratio = c_alpha(reproducing, n) / c_alpha(alpha, n);
                centers
                    .iter()
                    .zip(&cell_measures)
                    .map(|(a, &mu)| mu * ratio * (T::one() - a.norm_sq()).powf(reproducing - alpha))
                    .collect()
            }
        };
        Ok(SamplingOperator {
            centers,
            cell_measures,
            weights,
            b,
            beta,
            alpha,
            mode,
            dim: n,
            truncation_radius: r,
            truncated_measure: pairwise_sum(&inside),
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Series coefficients `μ_j x_j` for values `x_j` at the centers.
    pub fn coefficients(&self, values: &[C<T>]) -> Vec<C<T>> {
        values.iter().zip(&self.weights).map(|(&x, &w)| x * w).collect()
    }

    /// `Σ_j μ_j x_j (1 − ⟨z, a_j⟩)^{-b}`.
    pub fn eval_with(&self, coefficients: &[C<T>], z: &BallPoint<T>) -> C<T> {
        let one = C::new(T::one(), T::zero());
        let terms: Vec<C<T>> = coefficients
            .iter()
            .zip(&self.centers)
            .map(|(&c, a)| c * inv_pow(one - z.inner(a), self.b))
            .collect();
        pairwise_sum_c(&terms)
    }

    pub fn eval_many(&self, coefficients: &[C<T>], zs: &[BallPoint<T>]) -> Vec<C<T>> {
        zs.par_iter().map(|z| self.eval_with(coefficients, z)).collect()
    }

    pub fn sample(&self, f: &dyn BallFunction<T>) -> Result<Vec<C<T>>> {
        let vals: Vec<C<T>> = self.centers.par_iter().map(|a| f.eval(a)).collect();
        if let Some(i) = vals.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            let z = self.centers[i].z1();
            return Err(Error::NonFiniteNode { index: i, re: z.re.f64(), im: z.im.f64() });
        }
        Ok(vals)
    }

    /// The atomic series of `S` applied to values at the centers.
    pub fn series_from_values(&self, values: &[C<T>], phi: &GrowthFunction<T>) -> Result<AtomicSeries<T>> {
        let atoms = self
            .centers
            .iter()
            .zip(self.coefficients(values))
            .map(|(a, c)| Atom { center: *a, coefficient: c, exponent: self.b })
            .collect();
        AtomicSeries::new(atoms, self.alpha, phi.clone(), self.dim, self.b)
    }

    pub fn apply(&self, f: &dyn BallFunction<T>, phi: &GrowthFunction<T>) -> Result<AtomicSeries<T>> {
        self.series_from_values(&self.sample(f)?, phi)
    }
}

/// `S f` for a freshly built operator.
#[allow(clippy::too_many_arguments)]
pub fn apply_s<T: Real>(
    f: &dyn BallFunction<T>,
    joint: &JointLattice<T>,
    b: T,
    mode: BetaMode,
    alpha: T,
    phi: &GrowthFunction<T>,
    resolution: usize,
) -> Result<AtomicSeries<T>> {
    SamplingOperator::new(joint, b, mode, alpha, resolution)?.apply(f, phi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeumannConfig<T> {
    pub max_iters: usize,
    pub tol: T,
    /// Starting values at the centers; defaults to `f` itself.
    pub initial: Option<Vec<C<T>>>,
    /// Return the last iterate instead of [`Error::NotConverged`] when `max_iters` runs out.
    pub keep_unconverged: bool,
}

impl<T: Real> Default for NeumannConfig<T> {
    fn default() -> Self {
        NeumannConfig { max_iters: 40, tol: T::of(1e-4), initial: None, keep_unconverged: false }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct Decomposition<T> {
    pub series: AtomicSeries<T>,
    /// `∫_{|z|≤r} Φ(|f − S g_m|) dν_α` per iterate, `r = 2R − 1`.
    pub residual_history: Vec<T>,
    /// Largest successive ratio over the second half of the history.
    pub contraction: Option<T>,
    pub tail_decreasing: bool,
    pub iterations: usize,
    /// Whether the residual reached `tol`.
    pub converged: bool,
    /// Sup of `|f − Sg|` over the interior test grid.
    pub reconstruction_error: T,
    pub interior_radius: T,
    pub coefficient_modular: T,
    /// `∫Φ(|f|) dν_α` over the whole ball.
    pub function_modular: T,
    pub ratio: T,
}

/// `ρ*` and whether every ratio in the second half of the history is below 1.
pub fn tail_contraction<T: Real>(history: &[T]) -> (Option<T>, bool) {
    if history.len() < 2 {
        return (None, true);
    }
    let ratios: Vec<T> = history.windows(2).map(|w| w[1] / w[0]).collect();
    let tail = &ratios[ratios.len() / 2..];
    let rho = tail.iter().copied().fold(T::zero(), T::max);
    (Some(rho), tail.iter().all(|&r| r < T::one()))
}

/// Deterministic grid of about a thousand points in `{|z| ≤ r}`.
pub fn interior_grid<T: Real>(r: T, n: usize) -> Vec<BallPoint<T>> {
    let two_pi = T::of(2.0) * T::PI();
    let mut out = Vec::new();
    if n == 1 {
        out.push(BallPoint::origin(1));
        for i in 1..=25 {
            let s = r * T::nat(i) / T::nat(25);
            for j in 0..40 {
                let th = two_pi * (T::nat(j) + T::of(0.5) * T::nat(i % 2)) / T::nat(40);
                out.push(BallPoint::raw1(C::from_polar(s, th)));
            }
        }
    } else {
        for i in 1..=10 {
            let s = r * T::nat(i) / T::nat(10);
            for k in 0..10 {
                let u = (T::nat(k) + T::of(0.5)) / T::nat(10);
                for j in 0..10 {
                    let p = two_pi * T::nat(j) / T::nat(10);
                    let z1 = C::from_polar(s * u.sqrt(), p);
                    let z2 = C::from_polar(s * (T::one() - u).sqrt(), p * T::of(3.0) + T::of(0.7));
                    out.push(BallPoint::raw2(z1, z2));
                }
            }
        }
    }
    out
}

/// Neumann-series inversion of `S` on the centers: `x_{m+1} = x_m + f(a) − (S x_m)(a)`.
///
/// Stops at the first iterate whose interior residual modular is at most `tol`.
pub fn neumann_decompose<T: Real>(
    f: &dyn BallFunction<T>,
    op: &SamplingOperator<T>,
    phi: &GrowthFunction<T>,
    rule: &QuadratureRule<T>,
    cfg: &NeumannConfig<T>,
) -> Result<Decomposition<T>> {
    if (rule.alpha() - op.alpha).abs() > T::of(1e-12) * (T::one() + op.alpha.abs()) {
        return Err(Error::domain("residual rule weight does not match the operator's alpha"));
    }
    let r_in = (T::of(2.0) * op.truncation_radius - T::one()).max(T::zero());
    let interior = rule.indices_within(r_in);
    let zs: Vec<BallPoint<T>> = interior.iter().map(|&i| rule.nodes()[i]).collect();
    let ws: Vec<T> = interior.iter().map(|&i| rule.weights()[i]).collect();
    let f_in: Vec<C<T>> = zs.par_iter().map(|z| f.eval(z)).collect();
    let fc = op.sample(f)?;
    let mut x = match &cfg.initial {
        Some(v) if v.len() == op.len() => v.clone(),
        Some(v) => return Err(Error::domain(format!("initial vector has {} entries, expected {}", v.len(), op.len()))),
        None => fc.clone(),
    };
    let mut history = Vec::new();
    let mut iters = 0;
    let mut converged = true;
    loop {
        let coef = op.coefficients(&x);
        let s_in = op.eval_many(&coef, &zs);
        let terms: Vec<T> = (0..zs.len()).map(|i| ws[i] * phi.value((f_in[i] - s_in[i]).norm())).collect();
        let res = pairwise_sum(&terms);
        if !res.is_finite() {
            return Err(Error::NonFinite { what: "residual modular".into(), t: res.f64() });
        }
        history.push(res);
        if res <= cfg.tol {
            break;
        }
        if iters == cfg.max_iters {
            if cfg.keep_unconverged {
                converged = false;
                break;
            }
            return Err(Error::NotConverged {
                tol: cfg.tol.f64(),
                iters,
                last: res.f64(),
                history: history.iter().map(|h| h.f64()).collect(),
            });
        }
        let sx = op.eval_many(&coef, &op.centers);
        x = (0..x.len()).map(|j| x[j] + fc[j] - sx[j]).collect();
        iters += 1;
    }
    let series = op.series_from_values(&x, phi)?;
    let grid = interior_grid(r_in, op.dim);
    let sup = grid
        .par_iter()
        .map(|z| (f.eval(z) - series.eval(z)).norm())
        .reduce(T::zero, T::max);
    let function_modular = modular(f, phi, rule)?;
    let (contraction, tail_decreasing) = tail_contraction(&history);
    let cm = series.coefficient_modular;
    Ok(Decomposition {
        series,
        residual_history: history,
        contraction,
        tail_decreasing,
        iterations: iters,
        converged,
        reconstruction_error: sup,
        interior_radius: r_in,
        coefficient_modular: cm,
        function_modular,
        ratio: cm / function_modular,
    })
}

/// `Tf(z) = ∫ f(w) / |1 − ⟨z, w⟩|^b dν_β(w)` with `β = b − n − 1`, sampled on a rule for `ν_β`.
#[derive(Clone, Debug)]
pub struct OperatorT<'a, T> {
    pub b: T,
    rule: &'a QuadratureRule<T>,
    values: Vec<C<T>>,
}

pub fn apply_t<'a, T: Real>(f: &dyn BallFunction<T>, b: T, rule: &'a QuadratureRule<T>) -> Result<OperatorT<'a, T>> {
    let beta = b - T::nat(rule.dim() + 1);
    if !(beta > -T::one()) {
        return Err(Error::domain(format!("b = {b} gives beta = {beta} <= -1")));
    }
    if (rule.alpha() - beta).abs() > T::of(1e-12) * (T::one() + beta.abs()) {
        return Err(Error::domain(format!("rule weight {} does not equal beta = {beta}", rule.alpha())));
    }
    let values = rule.nodes().par_iter().map(|w| f.eval(w)).collect();
    Ok(OperatorT { b, rule, values })
}

impl<T: Real> OperatorT<'_, T> {
    pub fn eval(&self, z: &BallPoint<T>) -> C<T> {
        let one = C::new(T::one(), T::zero());
        let terms: Vec<C<T>> = self
            .rule
            .nodes()
            .iter()
            .zip(self.rule.weights())
            .zip(&self.values)
            .map(|((w, &wt), &v)| v * (wt * inv_pow_abs(one - z.inner(w), self.b)))
            .collect();
        pairwise_sum_c(&terms)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct DominationReport<T> {
    /// `max_z Σ|c_k|/|1−⟨z,a_k⟩|^b / TF(z)` over the test points.
    pub constant: T,
    pub worst: Option<BallPoint<T>>,
}

/// Compares `Σ|c_k|/|1−⟨z,a_k⟩|^b` with `TF` for `F = Σ|c_k|(1−|a_k|²)^{-b} χ_{D(a_k, r/2)}`.
///
/// Each indicator is integrated with a rule on its own Bergman ball.
pub fn domination_constant<T: Real>(
    series: &AtomicSeries<T>,
    r: T,
    resolution: usize,
    points: &[BallPoint<T>],
) -> Result<DominationReport<T>> {
    let b = series.exponent;
    let beta = b - T::nat(series.dim + 1);
    if !(beta > -T::one()) {
        return Err(Error::domain(format!("b = {b} gives beta = {beta} <= -1")));
    }
    let balls: Vec<(T, BallRule<T>)> = series
        .atoms
        .iter()
        .filter(|a| a.coefficient.norm() > T::zero())
        .map(|a| Ok((a.height(), BallRule::new(&a.center, r * T::of(0.5), beta, resolution)?)))
        .collect::<Result<_>>()?;
    let one = C::new(T::one(), T::zero());
    let ratios: Vec<T> = points
        .par_iter()
        .map(|z| {
            let lhs = series.eval_abs(z);
            let tf: Vec<T> = balls
                .iter()
                .map(|(h, br)| *h * br.integrate(|w| inv_pow_abs(one - z.inner(w), b)))
                .collect();
            lhs / pairwise_sum(&tf)
        })
        .collect();
    let mut best = (T::zero(), None);
    for (z, &q) in points.iter().zip(&ratios) {
        if q > best.0 {
            best = (q, Some(*z));
        }
    }
    Ok(DominationReport { constant: best.0, worst: best.1 })
}

/// `max_a |g(a)|^p ν_α(D(a,1)) / ∫_{D(a,1)} |g|^p dν_α` over the given points.
pub fn mean_value_constant<T: Real>(
    g: &dyn BallFunction<T>,
    points: &[BallPoint<T>],
    p: T,
    alpha: T,
    resolution: usize,
) -> Result<T> {
    let ratios: Vec<T> = points
        .par_iter()
        .map(|a| {
            let br = BallRule::new(a, T::one(), alpha, resolution)?;
            let avg = br.integrate(|w| g.eval(w).norm().powf(p)) / br.measure();
            Ok(g.eval(a).norm().powf(p) / avg)
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::build_rule;

    fn joint() -> JointLattice<f64> {
        JointLattice::build(0.25, 0.9, 1).unwrap()
    }

    #[test]
    fn cells_partition_the_truncated_ball() {
        let j = joint();
        let op = SamplingOperator::new(&j, 8.0, BetaMode::Concave, 0.0, 16).unwrap();
        let total: f64 = op.cell_measures.iter().sum();
        assert!((total - op.truncated_measure).abs() < 1e-8 * total);
        // ν_6(|z| ≤ 0.9) = 1 − (1 − 0.81)^7, up to the node boundary layer
        let closed = 1.0 - 0.19f64.powi(7);
        assert!((total - closed).abs() < 1e-3, "{total} vs {closed}");
    }

    #[test]
    fn zero_function_gives_zero_series() {
        let j = joint();
        let op = SamplingOperator::new(&j, 8.0, BetaMode::Concave, 0.0, 16).unwrap();
        let s = op.apply(&|_: &BallPoint<f64>| C::new(0.0, 0.0), &GrowthFunction::power(1.0)).unwrap();
        assert_eq!(s.coefficient_modular, 0.0);
        assert!(s.atoms.iter().all(|a| a.coefficient == C::new(0.0, 0.0)));
    }

    #[test]
    fn t_of_constant_at_origin() {
        let rule = build_rule::<f64>(6.0, 1, 12).unwrap();
        let t = apply_t(&|_: &BallPoint<f64>| C::new(1.0, 0.0), 8.0, &rule).unwrap();
        assert!((t.eval(&BallPoint::origin(1)) - C::new(1.0, 0.0)).norm() < 1e-13);
        assert!(apply_t(&|_: &BallPoint<f64>| C::new(1.0, 0.0), 8.0, &build_rule::<f64>(0.0, 1, 4).unwrap()).is_err());
        let r1 = build_rule::<f64>(-0.5, 1, 4).unwrap();
        assert!(apply_t(&|_: &BallPoint<f64>| C::new(1.0, 0.0), 1.4, &r1).is_err());
    }

    #[test]
    fn tail_contraction_reads_second_half() {
        let (rho, dec) = tail_contraction(&[1.0, 0.5, 0.4, 0.1, 0.05]);
        assert_eq!(rho, Some(0.5));
        assert!(dec);
        assert_eq!(tail_contraction::<f64>(&[1.0]), (None, true));
    }

    #[test]
    fn warm_start_at_fixed_point() {
        let j = joint();
        let op = SamplingOperator::new(&j, 8.0, BetaMode::Concave, 0.0, 16).unwrap();
        let rule = build_rule::<f64>(0.0, 1, 16).unwrap();
        let phi = GrowthFunction::power(1.0);
        // f = S g for g = 1 on the centers; starting from g the residual is zero.
        let g = vec![C::new(1.0, 0.0); op.len()];
        let coef = op.coefficients(&g);
        let opc = op.clone();
        let f = move |z: &BallPoint<f64>| opc.eval_with(&coef, z);
        let cfg = NeumannConfig { max_iters: 2, tol: 1e-12, initial: Some(g), keep_unconverged: false };
        let d = neumann_decompose(&f, &op, &phi, &rule, &cfg).unwrap();
        assert!(d.iterations == 0 && d.residual_history[0] < 1e-12);
    }
}
