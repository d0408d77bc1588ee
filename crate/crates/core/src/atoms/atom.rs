use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::BallPoint;
use crate::growth::GrowthFunction;
use crate::quad::{modular, QuadratureRule};
use crate::scalar::{inv_pow, pairwise_sum, pairwise_sum_c, Real, C};

/// `c / (1 − ⟨z, a⟩)^b` on the principal branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct Atom<T> {
    pub center: BallPoint<T>,
    pub coefficient: C<T>,
    pub exponent: T,
}

impl<T: Real> Atom<T> {
    pub fn new(center: BallPoint<T>, coefficient: C<T>, exponent: T) -> Result<Self> {
        if !(exponent > T::zero()) {
            return Err(Error::domain(format!("atom exponent b = {exponent} must be positive")));
        }
        if !(coefficient.re.is_finite() && coefficient.im.is_finite()) {
            return Err(Error::domain("atom coefficient is not finite"));
        }
        Ok(Atom { center, coefficient, exponent })
    }

    #[inline]
    pub fn kernel(&self, z: &BallPoint<T>) -> C<T> {
        inv_pow(C::new(T::one(), T::zero()) - z.inner(&self.center), self.exponent)
    }

    #[inline]
    pub fn eval(&self, z: &BallPoint<T>) -> C<T> {
        self.coefficient * self.kernel(z)
    }

    /// `1 − |a|²`.
    pub fn defect(&self) -> T {
        T::one() - self.center.norm_sq()
    }

    /// `|c| / (1 − |a|²)^b`, the size of the atom at its center up to a constant.
    pub fn height(&self) -> T {
        self.coefficient.norm() / self.defect().powf(self.exponent)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }
}

/// Smallest admissible exponent: `(n+1+α)/p` for a declared lower type `p`, `n+1+α` otherwise.
pub fn min_exponent<T: Real>(phi: &GrowthFunction<T>, alpha: T, n: usize) -> T {
    let base = T::nat(n + 1) + alpha;
    match phi.lower_type {
        Some(p) if p > T::zero() && p <= T::one() => base / p,
        _ => base,
    }
}

pub fn check_exponent<T: Real>(b: T, phi: &GrowthFunction<T>, alpha: T, n: usize) -> Result<()> {
    let need = min_exponent(phi, alpha, n);
    if b > need {
        Ok(())
    } else {
        Err(Error::precondition(format!("exponent b = {b} must exceed {need} for this growth function")))
    }
}

/// `Σ_k (1−|a_k|²)^{n+1+α} Φ(|c_k| / (λ (1−|a_k|²)^b))`.
pub fn coefficient_modular<T: Real>(atoms: &[Atom<T>], alpha: T, phi: &GrowthFunction<T>, lambda: T) -> T {
    let terms: Vec<T> = atoms
        .iter()
        .map(|a| {
            let d = a.defect();
            d.powf(T::nat(a.dim() + 1) + alpha) * phi.value(a.height() / lambda)
        })
        .collect();
    pairwise_sum(&terms)
}

/// A finite atomic series with a common exponent.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct AtomicSeries<T> {
    pub atoms: Vec<Atom<T>>,
    pub alpha: T,
    #[serde(skip)]
    pub phi: GrowthFunction<T>,
    pub dim: usize,
    pub exponent: T,
    pub coefficient_modular: T,
}

impl<T: Real> AtomicSeries<T> {
    /// Validates the common exponent and its type condition; stores the coefficient modular.
    pub fn new(atoms: Vec<Atom<T>>, alpha: T, phi: GrowthFunction<T>, dim: usize, exponent: T) -> Result<Self> {
        if let Some(bad) = atoms.iter().find(|a| a.exponent != exponent || a.dim() != dim) {
            return Err(Error::domain(format!(
                "atom with exponent {} in dimension {} does not match the series ({exponent}, {dim})",
                bad.exponent,
                bad.dim()
            )));
        }
        check_exponent(exponent, &phi, alpha, dim)?;
        let m = coefficient_modular(&atoms, alpha, &phi, T::one());
        if !m.is_finite() {
            return Err(Error::NonFinite { what: "coefficient modular".into(), t: m.f64() });
        }
        Ok(AtomicSeries { atoms, alpha, phi, dim, exponent, coefficient_modular: m })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Fixed-order sum of the atoms at `z`.
    pub fn eval(&self, z: &BallPoint<T>) -> C<T> {
        let vals: Vec<C<T>> = self.atoms.iter().map(|a| a.eval(z)).collect();
        pairwise_sum_c(&vals)
    }

    /// `Σ |c_k| / |1 − ⟨z, a_k⟩|^b`.
    pub fn eval_abs(&self, z: &BallPoint<T>) -> T {
        let vals: Vec<T> = self.atoms.iter().map(|a| a.eval(z).norm()).collect();
        pairwise_sum(&vals)
    }

    pub fn eval_many(&self, zs: &[BallPoint<T>]) -> Vec<C<T>> {
        zs.par_iter().map(|z| self.eval(z)).collect()
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        let atoms = self.atoms.iter().map(|a| Atom { coefficient: a.coefficient * s, ..*a }).collect();
        Self::new(atoms, self.alpha, self.phi.clone(), self.dim, self.exponent)
    }
}

pub fn evaluate_series<T: Real>(series: &AtomicSeries<T>, z: &BallPoint<T>) -> C<T> {
    series.eval(z)
}

/// Sequence quasi-norm and per-atom terms of the coefficient modular at the optimal scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceNorm<T> {
    pub value: T,
    pub terms: Vec<T>,
}

const BRACKET_RTOL: f64 = 1e-12;

/// `inf{λ > 0 : Σ_k (1−|a_k|²)^{n+1+α} Φ(|c_k| / (λ(1−|a_k|²)^b)) ≤ 1}` by bisection on `log λ`.
pub fn sequence_quasinorm<T: Real>(series: &AtomicSeries<T>) -> Result<SequenceNorm<T>> {
    let (atoms, alpha, phi) = (&series.atoms, series.alpha, &series.phi);
    let peak = atoms.iter().map(|a| a.height()).fold(T::zero(), T::max);
    if peak == T::zero() {
        return Ok(SequenceNorm { value: T::zero(), terms: vec![T::zero(); atoms.len()] });
    }
    let m = |lam: T| coefficient_modular(atoms, alpha, phi, lam);
    let ten = T::of(10.0);
    let (lmin, lmax) = (T::of(1e-300).max(T::min_positive_value()), T::max_value() / ten);
    let (mut lo, mut hi) = (peak, peak);
    while m(hi) > T::one() {
        lo = hi;
        hi = hi * ten;
        if hi > lmax {
            return Err(Error::NoBracket { lo: lmin.f64(), hi: lmax.f64() });
        }
    }
    if lo == hi {
        while m(lo) <= T::one() {
            hi = lo;
            lo = lo / ten;
            if lo < lmin {
                return Err(Error::NoBracket { lo: lmin.f64(), hi: lmax.f64() });
            }
        }
    }
    while hi - lo > T::of(BRACKET_RTOL) * hi {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if m(mid) > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let terms = atoms
        .iter()
        .map(|a| a.defect().powf(T::nat(a.dim() + 1) + alpha) * phi.value(a.height() / hi))
        .collect();
    Ok(SequenceNorm { value: hi, terms })
}

/// Computed modular of a single atom against `Φ(|c|/(1−|a|²)^b)(1−|a|²)^{n+1+α}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AtomEstimate<T> {
    pub computed: T,
    pub formula: T,
    pub ratio: T,
}

pub fn atom_modular_estimate<T: Real>(
    atom: &Atom<T>,
    phi: &GrowthFunction<T>,
    alpha: T,
    rule: &QuadratureRule<T>,
) -> Result<AtomEstimate<T>> {
    check_exponent(atom.exponent, phi, alpha, atom.dim())?;
    let a = *atom;
    let computed = modular(&move |z: &BallPoint<T>| a.eval(z), phi, rule)?;
    let d = atom.defect();
    let formula = phi.value(atom.height()) * d.powf(T::nat(atom.dim() + 1) + alpha);
    Ok(AtomEstimate { computed, formula, ratio: computed / formula })
}

/// `|c| / ((1−|a|²)^b Φ⁻¹((1−|a|²)^{−(n+1+α)}))`.
pub fn atom_norm_formula<T: Real>(atom: &Atom<T>, phi: &GrowthFunction<T>, alpha: T) -> T {
    let d = atom.defect();
    atom.height() / phi.inverse(d.powf(-(T::nat(atom.dim() + 1) + alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::build_rule;

    fn atom(x: f64, c: f64, b: f64) -> Atom<f64> {
        Atom::new(BallPoint::real(x, 1).unwrap(), C::new(c, 0.0), b).unwrap()
    }

    fn series(atoms: Vec<Atom<f64>>, phi: GrowthFunction<f64>) -> AtomicSeries<f64> {
        AtomicSeries::new(atoms, 0.0, phi, 1, 8.0).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let phi = GrowthFunction::power(1.0);
        let z = BallPoint::disc(C::new(0.2, -0.3)).unwrap();
        assert_eq!(series(vec![], phi.clone()).eval(&z), C::new(0.0, 0.0));
        let a = atom(0.5, 2.0, 8.0);
        let s = series(vec![a], phi.clone());
        assert_eq!(s.eval(&z), a.eval(&z));
        let expect = C::new(2.0, 0.0) / (C::new(1.0, 0.0) - z.z1() * 0.5).powi(8);
        assert!((a.eval(&z) - expect).norm() < 1e-12 * expect.norm());
        let b = atom(0.5, -2.0, 8.0);
        assert!(series(vec![a, b], phi).eval(&z).norm() == 0.0);
    }

    #[test]
    fn series_rejects_small_exponent() {
        let r = AtomicSeries::new(vec![atom(0.1, 1.0, 3.0)], 0.0, GrowthFunction::power(0.5), 1, 3.0);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = AtomicSeries::new(vec![atom(0.1, 1.0, 3.0)], 0.0, GrowthFunction::power(0.5), 1, 8.0);
        assert!(r.is_err());
    }

    #[test]
    fn quasinorm_power_closed_form_and_single_atom() {
        let p = 0.5;
        let phi = GrowthFunction::power(p);
        let atoms = vec![atom(0.3, 1.0, 8.0), atom(-0.7, 0.02, 8.0), atom(0.95, 1e-9, 8.0)];
        let s = series(atoms.clone(), phi.clone());
        let closed: f64 =
            atoms.iter().map(|a| a.defect().powf(2.0 - 8.0 * p) * a.coefficient.norm().powf(p)).sum::<f64>().powf(1.0 / p);
        let q = sequence_quasinorm(&s).unwrap();
        assert!((q.value - closed).abs() < 1e-10 * closed);
        assert!((q.terms.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let scaled = sequence_quasinorm(&s.scaled(7.5).unwrap()).unwrap();
        assert!((scaled.value - 7.5 * q.value).abs() < 1e-8 * scaled.value);

        for phi in [GrowthFunction::power_log(GrowthFunction::power(1.0)), GrowthFunction::exp_minus_one()] {
            let a = atom(0.9, 1e-5, 8.0);
            let s = AtomicSeries::new(vec![a], 0.0, phi.clone(), 1, 8.0).unwrap();
            let q = sequence_quasinorm(&s).unwrap();
            let f = atom_norm_formula(&a, &phi, 0.0);
            assert!((q.value - f).abs() < 1e-8 * f, "{} vs {f}", q.value);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_norm() {
        let s = series(vec![atom(0.3, 0.0, 8.0)], GrowthFunction::power(1.0));
        assert_eq!(sequence_quasinorm(&s).unwrap().value, 0.0);
    }

    #[test]
    fn centered_atom_estimate_is_exact() {
        let rule = build_rule::<f64>(0.0, 1, 8).unwrap();
        let est = atom_modular_estimate(&atom(0.0, 3.0, 8.0), &GrowthFunction::power(0.5), 0.0, &rule).unwrap();
        assert!((est.ratio - 1.0).abs() < 1e-12);
        let small = atom_modular_estimate(&atom(0.0, 3.0, 2.0), &GrowthFunction::power(0.5), 0.0, &rule);
        assert!(small.is_err());
    }
}
