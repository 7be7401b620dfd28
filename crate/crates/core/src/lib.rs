//! Pure multimode quantum states in Fock space, for distinguishable particles,
//! bosons and fermions, together with a classifier deciding whether a state is
//! a product over field modes and/or a product over particles.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`]: single-particle vectors, n-particle tensors and graded Fock
//!   states with an orthonormal occupation-number basis.
//! * [`tensor`]: the ⊗, ∨ and ∧ products, (anti)symmetrization and matrix
//!   flattenings.
//! * [`ladder`]: creation and annihilation operators, monomials and
//!   single-mode series.
//! * [`decomp`]: Schmidt, Takagi and Slater decompositions, rank-one tensor
//!   fitting and one-particle reduced density matrices.
//! * [`classify`]: the verdict engine producing a [`classify::Report`].
//! * [`gallery`]: named constructors for the reference example states.

mod combin;
mod linalg;
pub mod classify;
pub mod decomp;
pub mod error;
pub mod fock;
pub mod gallery;
pub mod ladder;
pub mod tensor;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use error::{FockError, Result};
pub use fock::{Occupation, SinglePartVec, Statistics, Symmetry, NTensor, FockState, C64};
