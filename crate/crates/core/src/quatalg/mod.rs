//! Definite quaternion algebras, Eichler orders and their ideal classes.

pub mod algebra;
pub mod ideals;
pub mod order;

pub use algebra::{
    algebra_for_ramification, hilbert_symbol, ramified_primes, sigma_l, Place, Quat,
    QuaternionAlgebra,
};
pub use ideals::{
    classes_with_prime, eichler_mass, equivalence, neighbors, right_ideal_classes, unit_count,
    units, IdealClassSet,
};
pub use order::{eichler_order, maximal_order, right_order, two_sided_ideal, QuaternionOrder};
