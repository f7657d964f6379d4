//! Exact theta lifts of definite quaternionic modular forms over the rationals,
//! with a numerical check of the explicit central value formula relating their
//! coefficients to `L(1/2, g⊗χ^l)·L(1/2, g⊗χ^D)`.
//!
//! The crate is organised bottom-up: [`arith`] and [`quatalg`] provide the
//! arithmetic, [`weightfn`] the local weight functions, [`brandt`] the space of
//! quaternionic forms, [`thetalift`] the coefficient tables, [`specialpts`] an
//! independent route to the same coefficients, and [`lvalues`] the analytic side.

pub mod arith;
pub mod brandt;
pub mod cache;
pub mod enumerate;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod lvalues;
pub mod pipeline;
pub mod quatalg;
pub mod specialpts;
pub mod thetalift;
pub mod weightfn;

pub use arith::{FundamentalPair, Rational};
pub use brandt::{FormSpace, HarmonicSpace, HeckeMatrix, QuaternionicForm};
pub use cache::Cache;
pub use error::{Error, Result};
pub use lvalues::{EigenSystem, RatioReport};
pub use pipeline::RunConfig;
pub use quatalg::{IdealClassSet, QuaternionAlgebra, QuaternionOrder};
pub use specialpts::{QuadFieldData, SpecialPoint};
pub use thetalift::{CoefficientTable, LiftConfig};
pub use weightfn::{AdelicWeight, LocalWeightTable, TernaryLattice};
