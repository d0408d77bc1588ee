use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::atoms::{check_exponent, Atom, AtomEstimate, AtomicSeries};
use crate::atoms::interior_grid;
use crate::error::{Error, Result};
use crate::geometry::{involution, BallPoint};
use crate::growth::{GrowthFunction, Kind};
use crate::quad::{luxembourg_norm_fast, modular, QuadratureRule, RuleSpec};
use crate::scalar::{inv_pow, log_grid, pairwise_sum, Real, C};

use super::bloch::{bloch_norm, BlochFunction, BlochKind, BLOCH_GRID};

impl<T: Real> Serialize for BlochFunction<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(1))?;
        match &self.kind {
            BlochKind::Constant(c) => m.serialize_entry("constant", &[c.re, c.im])?,
            BlochKind::LogAtom { center, scale } => {
                #[derive(Serialize)]
                #[serde(bound(serialize = "T: Real"))]
                struct L<'a, T> {
                    center: &'a BallPoint<T>,
                    scale: T,
                }
                m.serialize_entry("log_atom", &L { center, scale: *scale })?
            }
            BlochKind::General { label, .. } => m.serialize_entry("general", label)?,
        }
        m.end()
    }
}

/// The first factor of a pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", bound(serialize = "T: Real"))]
pub enum LeftFactor<T> {
    Atom(Atom<T>),
    /// `atom / (1 + scale · log(4 / (1 − ⟨z, a⟩)))`.
    LogWeighted { atom: Atom<T>, scale: T },
}

impl<T: Real> LeftFactor<T> {
    pub fn eval(&self, z: &BallPoint<T>) -> C<T> {
        match self {
            LeftFactor::Atom(a) => a.eval(z),
            LeftFactor::LogWeighted { atom, scale } => atom.eval(z) / theta_of(atom, *scale).eval(z),
        }
    }

    pub fn center(&self) -> BallPoint<T> {
        match self {
            LeftFactor::Atom(a) | LeftFactor::LogWeighted { atom: a, .. } => a.center,
        }
    }
}

fn theta_of<T: Real>(atom: &Atom<T>, scale: T) -> BlochFunction<T> {
    BlochFunction::log_atom(atom.center, scale)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case", bound(serialize = "T: Real"))]
pub enum RightFactor<T> {
    Bloch(BlochFunction<T>),
    Atom(Atom<T>),
}

impl<T: Real> RightFactor<T> {
    pub fn eval(&self, z: &BallPoint<T>) -> C<T> {
        match self {
            RightFactor::Bloch(b) => b.eval(z),
            RightFactor::Atom(a) => a.eval(z),
        }
    }
}

/// Which branch of the Bloch splitting an atom fell into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlochCase {
    /// `|c|(1−|a|²)^{−b} ≤ 4`.
    SmallHeight,
    /// `|a|² ≤ 1 − η`.
    Interior,
    /// Divided by a log atom.
    LogSplit,
}

/// One factorized term `h = g · θ` (or `g · h`) with its measured norms.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct FactorPair<T> {
    /// The atom being factorized.
    pub target: Atom<T>,
    pub left: LeftFactor<T>,
    pub right: RightFactor<T>,
    pub case: Option<BlochCase>,
    /// `sup |g·θ − h| / max(|h|, 1)` over the test grid.
    pub product_residual: T,
    pub left_norm: T,
    pub right_norm: T,
    /// `∫Φ(|g|) dν_α`, with `Φ` the left factor's growth function.
    pub left_modular: T,
    /// Closed-form size of each factor, when one is known.
    pub left_formula: Option<T>,
    pub right_formula: Option<T>,
}

impl<T: Real> FactorPair<T> {
    pub fn eval(&self, z: &BallPoint<T>) -> C<T> {
        self.left.eval(z) * self.right.eval(z)
    }
}

/// Points spread over the ball plus a hyperbolic neighbourhood of `a`.
pub fn residual_grid<T: Real>(a: &BallPoint<T>) -> Vec<BallPoint<T>> {
    let n = a.dim();
    let mut out = interior_grid(T::of(0.99), n);
    for u in interior_grid(T::of(0.95), n).iter().step_by(3) {
        if let Ok(w) = involution(a, u) {
            out.push(w);
        }
    }
    out
}

fn residual<T: Real>(pair_eval: impl Fn(&BallPoint<T>) -> C<T> + Sync, target: &Atom<T>) -> T {
    residual_grid(&target.center)
        .par_iter()
        .map(|z| {
            let h = target.eval(z);
            (pair_eval(z) - h).norm() / h.norm().max(T::one())
        })
        .reduce(|| T::zero(), T::max)
}

fn check_rule_alpha<T: Real>(rule: &QuadratureRule<T>, alpha: T) -> Result<()> {
    if (rule.alpha() - alpha).abs() > T::of(1e-12) * (T::one() + alpha.abs()) {
        return Err(Error::domain(format!("rule weight alpha = {} does not match alpha = {alpha}", rule.alpha())));
    }
    Ok(())
}

pub const ETA_THRESHOLD: f64 = 0.1;

/// `δ = |log|c|| / (b |log(1−|a|²)|)`.
pub fn log_split_delta<T: Real>(atom: &Atom<T>) -> T {
    atom.coefficient.norm().ln().abs() / (atom.exponent * atom.defect().ln().abs())
}

/// Splits one atom as `g · θ` with `θ` in the Bloch space.
///
/// Norms of `g` are taken in `A^Φ_α` on `rule`, which should be graded toward the atom center.
pub fn factor_atom_bloch<T: Real>(
    atom: &Atom<T>,
    phi: &GrowthFunction<T>,
    alpha: T,
    eta_threshold: T,
    rule: &QuadratureRule<T>,
) -> Result<FactorPair<T>> {
    check_exponent(atom.exponent, phi, alpha, atom.dim())?;
    check_rule_alpha(rule, alpha)?;
    if !(eta_threshold > T::zero() && eta_threshold < T::one()) {
        return Err(Error::domain(format!("eta_threshold = {eta_threshold} must lie in (0, 1)")));
    }
    let case = if atom.height() <= T::of(4.0) {
        BlochCase::SmallHeight
    } else if atom.center.norm_sq() <= T::one() - eta_threshold {
        BlochCase::Interior
    } else {
        BlochCase::LogSplit
    };
    let (left, theta, residual) = match case {
        BlochCase::SmallHeight | BlochCase::Interior => (LeftFactor::Atom(*atom), BlochFunction::one(), T::zero()),
        BlochCase::LogSplit => {
            let c = atom.coefficient.norm();
            if c >= T::one() {
                return Err(Error::Normalization(format!("|c| = {c} ≥ 1 near the boundary")));
            }
            let delta = log_split_delta(atom);
            if !(delta >= T::zero() && delta < T::one()) {
                return Err(Error::Normalization(format!("split exponent δ = {delta} outside [0, 1)")));
            }
            let scale = T::one() - delta;
            let left = LeftFactor::LogWeighted { atom: *atom, scale };
            let theta = theta_of(atom, scale);
            let res = {
                let (l, t) = (&left, &theta);
                residual(|z| l.eval(z) * t.eval(z), atom)
            };
            (left, theta, res)
        }
    };
    let left_norm = {
        let l = &left;
        luxembourg_norm_fast(&|z: &BallPoint<T>| l.eval(z), phi, rule)?.luxembourg_norm
    };
    let left_modular = {
        let l = &left;
        modular(&|z: &BallPoint<T>| l.eval(z), phi, rule)?
    };
    let right_norm = bloch_norm(&theta, atom.dim(), BLOCH_GRID)?.value;
    Ok(FactorPair {
        target: *atom,
        left,
        right: RightFactor::Bloch(theta),
        case: Some(case),
        product_residual: residual,
        left_norm,
        right_norm,
        left_modular,
        left_formula: None,
        right_formula: None,
    })
}

/// Rule graded toward every atom center of `atoms`.
pub fn rule_for_atoms<T: Real>(atoms: &[Atom<T>], alpha: T, n: usize, resolution: usize) -> Result<QuadratureRule<T>> {
    RuleSpec::new(alpha, n, resolution).with_foci(atoms.iter().map(|a| a.center)).build()
}

/// Bloch factorization of a whole series with the totals of the two-sided estimate.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct BlochFactorization<T> {
    pub pairs: Vec<FactorPair<T>>,
    /// `Σ ‖f_k‖_{Φ,α} ‖b_k‖_ℬ`.
    pub sum_norm_products: T,
    /// `Σ ∫Φ(|f_k|) dν_α · ‖b_k‖_ℬ`.
    pub sum_modular_products: T,
    /// `Σ ∫Ψ(|f_k b_k|) dν_α`.
    pub sum_psi_products: T,
    /// `∫Ψ(|f|) dν_α`.
    pub psi_modular: T,
    /// `‖f‖_{Ψ,α}`.
    pub psi_norm: T,
    /// `Σ‖f_k‖‖b_k‖ / ‖f‖_{Ψ,α}`.
    pub norm_ratio: T,
    /// `∫Ψ(|f|) / Σ∫Ψ(|f_k b_k|)`.
    pub ratio_psi_to_products: T,
    /// `Σ∫Ψ(|f_k b_k|) / Σ∫Φ(|f_k|)‖b_k‖`.
    pub ratio_products_to_modular: T,
    /// `∫Ψ(|f|) / Σ∫Φ(|f_k|)‖b_k‖`.
    pub ratio_psi_to_modular: T,
    pub max_product_residual: T,
    /// `sup |Σ f_k b_k − f| / max(|f|, 1)` on the test grid.
    pub reconstruction_residual: T,
}

fn is_power_log_of<T: Real>(psi: &GrowthFunction<T>, phi: &GrowthFunction<T>) -> bool {
    matches!(&psi.kind, Kind::PowerLog(base) if **base == *phi)
}

fn nonzero_atoms<T: Real>(series: &AtomicSeries<T>) -> Vec<Atom<T>> {
    series.atoms.iter().copied().filter(|a| a.coefficient.norm() > T::zero()).collect()
}

fn reconstruction<T: Real>(series: &AtomicSeries<T>, pairs: &[FactorPair<T>]) -> T {
    let mut grid = interior_grid(T::of(0.99), series.dim);
    for p in pairs {
        grid.extend(residual_grid(&p.target.center).into_iter().step_by(5));
    }
    grid.par_iter()
        .map(|z| {
            let f = series.eval(z);
            let vals: Vec<C<T>> = pairs.iter().map(|p| p.eval(z)).collect();
            let s = crate::scalar::pairwise_sum_c(&vals);
            (s - f).norm() / f.norm().max(T::one())
        })
        .reduce(|| T::zero(), T::max)
}

/// Applies [`factor_atom_bloch`] to every nonzero atom of a series whose growth function is
/// `Ψ = PowerLog(Φ)`.
pub fn factor_series_bloch<T: Real>(
    series: &AtomicSeries<T>,
    phi: &GrowthFunction<T>,
    alpha: T,
    eta_threshold: T,
    resolution: usize,
) -> Result<BlochFactorization<T>> {
    if !is_power_log_of(&series.phi, phi) {
        return Err(Error::precondition("the series growth function must be PowerLog of phi"));
    }
    if (series.alpha - alpha).abs() > T::of(1e-12) * (T::one() + alpha.abs()) {
        return Err(Error::domain("series alpha differs from alpha"));
    }
    let atoms = nonzero_atoms(series);
    let psi = &series.phi;
    // each pair is measured on a rule graded toward its own center only
    let per_atom: Vec<(FactorPair<T>, T)> = atoms
        .par_iter()
        .map(|a| {
            let rule = rule_for_atoms(&[*a], alpha, series.dim, resolution)?;
            let pair = factor_atom_bloch(a, phi, alpha, eta_threshold, &rule)?;
            let psi_term = modular(&|z: &BallPoint<T>| a.eval(z), psi, &rule)?;
            Ok((pair, psi_term))
        })
        .collect::<Result<_>>()?;
    let (pairs, psi_terms): (Vec<FactorPair<T>>, Vec<T>) = per_atom.into_iter().unzip();
    let rule = rule_for_atoms(&atoms, alpha, series.dim, resolution)?;
    let sum_norm_products = pairwise_sum(&pairs.iter().map(|p| p.left_norm * p.right_norm).collect::<Vec<_>>());
    let sum_modular_products = pairwise_sum(&pairs.iter().map(|p| p.left_modular * p.right_norm).collect::<Vec<_>>());
    let sum_psi_products = pairwise_sum(&psi_terms);
    let f = |z: &BallPoint<T>| series.eval(z);
    let psi_modular = modular(&f, psi, &rule)?;
    let psi_norm = luxembourg_norm_fast(&f, psi, &rule)?.luxembourg_norm;
    let max_product_residual = pairs.iter().map(|p| p.product_residual).fold(T::zero(), T::max);
    let reconstruction_residual = reconstruction(series, &pairs);
    Ok(BlochFactorization {
        sum_norm_products,
        sum_modular_products,
        sum_psi_products,
        psi_modular,
        psi_norm,
        norm_ratio: sum_norm_products / psi_norm,
        ratio_psi_to_products: psi_modular / sum_psi_products,
        ratio_products_to_modular: sum_psi_products / sum_modular_products,
        ratio_psi_to_modular: psi_modular / sum_modular_products,
        max_product_residual,
        reconstruction_residual,
        pairs,
    })
}

/// `∫Φ(|g|)` for `g = λ / ((1−⟨z,a⟩)^b log(4/(1−⟨z,a⟩)))` against
/// `(1−|a|²)^{n+1+α} Φ(|λ| / ((1−|a|²)^b log(4/(1−|a|²))))`.
pub fn log_weighted_atom_estimate<T: Real>(
    center: &BallPoint<T>,
    lambda: C<T>,
    b: T,
    phi: &GrowthFunction<T>,
    alpha: T,
    rule: &QuadratureRule<T>,
) -> Result<AtomEstimate<T>> {
    let n = center.dim();
    check_exponent(b, phi, alpha, n)?;
    check_rule_alpha(rule, alpha)?;
    let one = C::new(T::one(), T::zero());
    let four = C::new(T::of(4.0), T::zero());
    let g = |z: &BallPoint<T>| {
        let w = one - z.inner(center);
        inv_pow(w, b) * lambda / (four / w).ln()
    };
    let computed = modular(&g, phi, rule)?;
    let d = T::one() - center.norm_sq();
    let formula = d.powf(T::nat(n + 1) + alpha) * phi.value(lambda.norm() / (d.powf(b) * (T::of(4.0) / d).ln()));
    Ok(AtomEstimate { computed, formula, ratio: computed / formula })
}

/// Worst relative mismatch of `Φ₁⁻¹(u) Φ₂⁻¹(u)` against `Φ⁻¹(u)` on a log grid.
pub fn check_inverse_product<T: Real>(phi: &GrowthFunction<T>, phi1: &GrowthFunction<T>, phi2: &GrowthFunction<T>) -> Result<T> {
    let mut worst = (T::zero(), T::one());
    for u in log_grid(T::of(1e-8), T::of(1e8), 161) {
        let want = phi.inverse(u);
        let got = phi1.inverse(u) * phi2.inverse(u);
        let m = (got - want).abs() / want;
        if !(m <= worst.0) {
            worst = (m, u);
        }
    }
    if !(worst.0 <= T::of(1e-6)) {
        return Err(Error::Hypothesis { u: worst.1.f64(), mismatch: worst.0.f64() });
    }
    Ok(worst.0)
}

/// `Φ₁⁻¹(Φ(X)) / Φ₁⁻¹((1−|a|²)^{−(n+1+α)})` with `X = |c|/(1−|a|²)^b`.
fn factor_formula<T: Real>(atom: &Atom<T>, phi: &GrowthFunction<T>, phi_k: &GrowthFunction<T>, alpha: T) -> T {
    let base = T::nat(atom.dim() + 1) + alpha;
    phi_k.inverse(phi.value(atom.height())) / phi_k.inverse(atom.defect().powf(-base))
}

/// Splits one atom of `A^Φ_α` as a product of atoms of `A^{Φ₁}_α` and `A^{Φ₂}_α`.
pub fn factor_atom_two_orlicz<T: Real>(
    atom: &Atom<T>,
    phi: &GrowthFunction<T>,
    phi1: &GrowthFunction<T>,
    phi2: &GrowthFunction<T>,
    s: T,
    alpha: T,
    rule: &QuadratureRule<T>,
) -> Result<FactorPair<T>> {
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::domain(format!("split s = {s} must lie in (0, 1)")));
    }
    if atom.coefficient.norm() == T::zero() {
        return Err(Error::domain("zero atoms are not factorized"));
    }
    check_rule_alpha(rule, alpha)?;
    check_inverse_product(phi, phi1, phi2)?;
    let n = atom.dim();
    let (bs, bt) = (atom.exponent * s, atom.exponent * (T::one() - s));
    check_exponent(bs, phi1, alpha, n)?;
    check_exponent(bt, phi2, alpha, n)?;
    let u = phi.value(atom.height());
    let d = atom.defect();
    let phase = C::from_polar(T::one(), atom.coefficient.arg());
    let g = Atom::new(atom.center, phase * (d.powf(bs) * phi1.inverse(u)), bs)?;
    let h = Atom::new(atom.center, C::new(d.powf(bt) * phi2.inverse(u), T::zero()), bt)?;
    let product_residual = residual(|z| g.eval(z) * h.eval(z), atom);
    let left_norm = luxembourg_norm_fast(&|z: &BallPoint<T>| g.eval(z), phi1, rule)?.luxembourg_norm;
    let right_norm = luxembourg_norm_fast(&|z: &BallPoint<T>| h.eval(z), phi2, rule)?.luxembourg_norm;
    let left_modular = modular(&|z: &BallPoint<T>| g.eval(z), phi1, rule)?;
    Ok(FactorPair {
        target: *atom,
        left: LeftFactor::Atom(g),
        right: RightFactor::Atom(h),
        case: None,
        product_residual,
        left_norm,
        right_norm,
        left_modular,
        left_formula: Some(factor_formula(atom, phi, phi1, alpha)),
        right_formula: Some(factor_formula(atom, phi, phi2, alpha)),
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct TwoOrliczFactorization<T> {
    pub pairs: Vec<FactorPair<T>>,
    /// `Σ ‖g_k‖_{Φ₁,α} ‖h_k‖_{Φ₂,α}`.
    pub sum_norm_products: T,
    /// `‖f‖_{Φ,α}`.
    pub norm: T,
    pub ratio: T,
    /// `d_k = (1−|a_k|²)^{n+1+α} Φ(|c_k|/(1−|a_k|²)^b)`.
    pub d: Vec<T>,
    /// `max Φ⁻¹(d_k v) / (d_k Φ⁻¹(v))` over sampled `v`, for `d_k ≤ 1`.
    pub d_inequality: T,
    pub max_product_residual: T,
    pub reconstruction_residual: T,
}

/// Two-Orlicz factorization of a series in `A^Φ_α`, `Φ` of finite lower type `p ≤ 1`.
pub fn factor_series_two_orlicz<T: Real>(
    series: &AtomicSeries<T>,
    phi1: &GrowthFunction<T>,
    phi2: &GrowthFunction<T>,
    s: T,
    resolution: usize,
) -> Result<TwoOrliczFactorization<T>> {
    let phi = &series.phi;
    if !matches!(phi.lower_type, Some(p) if p > T::zero() && p <= T::one()) {
        return Err(Error::precondition("series growth function needs a declared lower type p ≤ 1"));
    }
    let alpha = series.alpha;
    let atoms = nonzero_atoms(series);
    let pairs: Vec<FactorPair<T>> = atoms
        .par_iter()
        .map(|a| factor_atom_two_orlicz(a, phi, phi1, phi2, s, alpha, &rule_for_atoms(&[*a], alpha, series.dim, resolution)?))
        .collect::<Result<_>>()?;
    let rule = rule_for_atoms(&atoms, alpha, series.dim, resolution)?;
    let sum_norm_products = pairwise_sum(&pairs.iter().map(|p| p.left_norm * p.right_norm).collect::<Vec<_>>());
    let norm = luxembourg_norm_fast(&|z: &BallPoint<T>| series.eval(z), phi, &rule)?.luxembourg_norm;
    let base = T::nat(series.dim + 1) + alpha;
    let d: Vec<T> = atoms.iter().map(|a| a.defect().powf(base) * phi.value(a.height())).collect();
    let mut d_inequality = T::zero();
    for &dk in d.iter().filter(|&&dk| dk <= T::one() && dk > T::zero()) {
        for v in log_grid(T::of(1e-6), T::of(1e6), 61) {
            d_inequality = d_inequality.max(phi.inverse(dk * v) / (dk * phi.inverse(v)));
        }
    }
    let max_product_residual = pairs.iter().map(|p| p.product_residual).fold(T::zero(), T::max);
    let reconstruction_residual = reconstruction(series, &pairs);
    Ok(TwoOrliczFactorization {
        sum_norm_products,
        norm,
        ratio: sum_norm_products / norm,
        d,
        d_inequality,
        max_product_residual,
        reconstruction_residual,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(x: f64, c: f64, b: f64) -> Atom<f64> {
        Atom::new(BallPoint::real(x, 1).unwrap(), C::new(c, 0.0), b).unwrap()
    }

    fn rule(a: &Atom<f64>, alpha: f64) -> QuadratureRule<f64> {
        rule_for_atoms(&[*a], alpha, 1, 12).unwrap()
    }

    #[test]
    fn bloch_cases() {
        let phi = GrowthFunction::power(1.0);
        let b = 8.0;
        let x = 0.999f64.sqrt();
        let d = 1.0 - x * x;
        let small = atom(x, d.powf(b), b);
        let p = factor_atom_bloch(&small, &phi, 0.0, 0.1, &rule(&small, 0.0)).unwrap();
        assert_eq!(p.case, Some(BlochCase::SmallHeight));
        assert_eq!(p.product_residual, 0.0);
        assert_eq!(p.right_norm, 1.0);

        let center = atom(0.0, 10.0, b);
        let p = factor_atom_bloch(&center, &phi, 0.0, 0.5, &rule(&center, 0.0)).unwrap();
        assert_eq!(p.case, Some(BlochCase::Interior));

        let big = atom(x, d.powf(b - 1.0), b);
        let p = factor_atom_bloch(&big, &phi, 0.0, 0.1, &rule(&big, 0.0)).unwrap();
        assert_eq!(p.case, Some(BlochCase::LogSplit));
        assert!(p.product_residual <= 1e-12, "{}", p.product_residual);
        let delta = log_split_delta(&big);
        assert!(((1.0 - delta) - 1.0 / b).abs() < 1e-12);
        let lo = 1.0 + (1.0 - delta) * 4f64.ln();
        assert!(p.right_norm >= lo && p.right_norm <= lo + 2.0 * (1.0 - delta));

        let unnormalized = atom(x, 2.0, b);
        assert!(matches!(
            factor_atom_bloch(&unnormalized, &phi, 0.0, 0.1, &rule(&unnormalized, 0.0)),
            Err(Error::Normalization(_))
        ));
        assert!(matches!(
            factor_atom_bloch(&atom(0.5, 1.0, 2.0), &phi, 0.0, 0.1, &rule(&small, 0.0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn two_orlicz_power_pair_closed_form() {
        let (phi, half) = (GrowthFunction::power(1.0), GrowthFunction::power(2.0));
        let a = atom(0.9, 0.3, 8.0);
        let r = rule(&a, 0.0);
        let p = factor_atom_two_orlicz(&a, &phi, &half, &half, 0.5, 0.0, &r).unwrap();
        assert!(p.product_residual <= 1e-12);
        // ∫|1−⟨z,a⟩|^{-8} dν_0 = (1−x)^{-6}(1 + 2x + x²/3), x = |a|²
        let x: f64 = 0.81;
        let j = (1.0 + 2.0 * x + x * x / 3.0) / (1.0 - x).powi(6);
        let exact = (0.3 * j).sqrt();
        assert!((p.left_norm / exact - 1.0).abs() < 1e-6, "{} vs {exact}", p.left_norm);
        assert!((p.right_norm / exact - 1.0).abs() < 1e-6);
        assert!(matches!(
            factor_atom_two_orlicz(&a, &phi, &half, &GrowthFunction::power(3.0), 0.5, 0.0, &r),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn series_with_zero_atom() {
        let phi = GrowthFunction::power(0.5);
        let atoms = vec![atom(0.5, 0.01, 8.0), atom(0.7, 0.0, 8.0)];
        let s = AtomicSeries::new(atoms, 0.0, phi, 1, 8.0).unwrap();
        let one = GrowthFunction::power(1.0);
        let f = factor_series_two_orlicz(&s, &one, &one, 0.5, 8).unwrap();
        assert_eq!(f.pairs.len(), 1);
        assert!(f.reconstruction_residual < 1e-12);
        assert!(f.d_inequality <= 1.0 + 1e-12);
    }
}
