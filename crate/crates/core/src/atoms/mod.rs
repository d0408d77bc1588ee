//! Atoms, atomic series, the sampling operator and its Neumann inversion.

mod atom;
mod family;
mod sampling;

pub use atom::{
    atom_modular_estimate, atom_norm_formula, check_exponent, coefficient_modular, evaluate_series, min_exponent,
    sequence_quasinorm, Atom, AtomEstimate, AtomicSeries, SequenceNorm,
};
pub use family::{Rational, TestFunction};
pub use sampling::{
    apply_s, apply_t, domination_constant, interior_grid, mean_value_constant, neumann_decompose, tail_contraction,
    BetaMode, Decomposition, DominationReport, NeumannConfig, OperatorT, SamplingOperator,
};
