//! Width-two word-map factorizations in the compact classical groups.
//!
//! Given two non-trivial free-group words `w1`, `w2` and an element `g` of
//! SU(n), Sp(n) or K(2n), this crate produces witness tuples `A`, `B` with
//! `w1(A) * w2(B) = g` up to a certified residual, by combining
//!
//! * torus-normalizing elements whose adjoint action on the maximal torus
//!   has no fixed vectors (so every torus element is a commutator),
//! * principal SU(2) embeddings built from symmetric powers, and
//! * numerical preimage searches for root-of-unity targets inside SU(2).
//!
//! Exact cyclotomic arithmetic backs every identity that can be checked
//! symbolically (characteristic polynomials, two-square central
//! decompositions, discriminant squares), and exhaustive enumeration of
//! SL2 over small prime fields provides an independent finite ground truth.

// index-driven loops mirror the matrix formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod exact;
pub mod factorize;
pub mod family;
pub mod goto;
pub mod group;
pub mod matnum;
pub mod oracle;
pub mod principal;
pub mod search;
pub mod word;

pub use exact::{CycScalar, ExactMatrix, Rat};
pub use factorize::{FactorizationCert, Pipeline};
pub use family::{lookup_family, registry, CompactFamily};
pub use group::{GroupCtx, TorusPoint};
pub use matnum::CMatrix;
pub use word::Word;
