//! Reference Gauss rules on `[-1, 1]`, converted to the working scalar.

use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gauss–Legendre nodes and weights, sorted by node.
pub fn legendre<T: Real>(q: usize) -> Vec<(T, T)> {
    let q = NonZeroUsize::new(q.max(1)).expect("nonzero");
    let rule = GaussLegendre::new(q);
    sorted(rule.as_node_weight_pairs())
}

/// Gauss–Jacobi rule for the weight `(1 − x)^a (1 + x)^b`.
pub fn jacobi<T: Real>(q: usize, a: f64, b: f64) -> Result<Vec<(T, T)>> {
    let q = NonZeroUsize::new(q.max(1)).expect("nonzero");
    let fa = FiniteAboveNegOneF64::new(a).ok_or_else(|| Error::domain(format!("Jacobi exponent {a} must exceed -1")))?;
    let fb = FiniteAboveNegOneF64::new(b).ok_or_else(|| Error::domain(format!("Jacobi exponent {b} must exceed -1")))?;
    Ok(sorted(GaussJacobi::new(q, fa, fb).as_node_weight_pairs()))
}

fn sorted<T: Real>(pairs: &[(f64, f64)]) -> Vec<(T, T)> {
    let mut v: Vec<(f64, f64)> = pairs.to_vec();
    v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    v.into_iter().map(|(x, w)| (T::of(x), T::of(w))).collect()
}
