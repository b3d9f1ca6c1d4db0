//! Exact construction and verification of mutually unbiased maximally
//! entangled bases in C^q ⊗ C^q for q = 2^s.
//!
//! The bases are generated by unitaries V_A indexed by A ∈ SL(2, GF(2^s)),
//! whose entries are values of the additive character of the Galois ring
//! GR(4, 4^s). Two such bases are unbiased when the relative trace of A and
//! B is nonzero, so large families come from trace-zero excluded subsets of
//! SL(2, GF(2^s)). All arithmetic is exact.

pub mod error;
pub mod field;
pub mod matrix;
pub mod ring;
pub mod scaled;
pub mod search;
pub mod sl2;
pub mod unitary;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Field, FieldDescriptor, FieldElem};
pub use matrix::ExactMatrix;
pub use ring::{GaloisRing, I4Phase, RingElem, TeichIndex};
pub use scaled::{Dyadic, ScaledGaussian};
pub use sl2::{ExcludedSubset, FamilyKind, Mat2F};
