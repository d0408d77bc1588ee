//! Bloch functions and the two weak factorizations.

mod bloch;
mod product;
mod split;

pub use bloch::{bloch_exponential_check, bloch_grid, bloch_norm, BlochFunction, BlochKind, BlochNorm, ExpClassReport, BLOCH_GRID};
pub use product::{product_norm_check, product_norm_check_bloch, ProductRatio};
pub use split::{
    check_inverse_product, factor_atom_bloch, factor_atom_two_orlicz, factor_series_bloch, factor_series_two_orlicz,
    log_split_delta, log_weighted_atom_estimate, residual_grid, rule_for_atoms, BlochCase, BlochFactorization, FactorPair,
    LeftFactor, RightFactor, TwoOrliczFactorization, ETA_THRESHOLD,
};
