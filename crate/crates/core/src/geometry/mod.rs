//! Points of the disc and of the ball in ℂ², the Bergman metric, and lattices.

mod index;
pub mod lattice;
pub mod metric;
mod point;

pub use lattice::{ring_grid, JointLattice, JointStats, Lattice, LatticeStats};
pub use metric::{bergman_distance, distance_from_origin, involution, one_minus_phi_sq, pseudo_distance, EuclidDisc};
pub use point::BallPoint;
