//! The space `M_k(R)` of quaternionic forms with its Hecke and Atkin–Lehner operators.

pub mod forms;
pub mod harmonic;
pub mod hecke;

pub use forms::{conjugation_matrix, EigenRecord, FormSpace, QuaternionicForm};
pub use harmonic::HarmonicSpace;
pub use hecke::{
    al_sign, al_signs, atkin_lehner_apply, brandt_matrix, eigenforms, eigenvalue_of,
    eigenvalues_from_theta, row_theta, HeckeMatrix,
};
