//! Exact intersection theory and minimal model programs for projective
//! normal surfaces.
//!
//! A surface is represented by a finite curve catalog: the symmetric
//! rational pairing over the basis (K, C_1, ..., C_n) plus a few declarative
//! flags. On top of that sit the Mumford pullback solves, discrepancy
//! computation and singularity classification on resolution dual graphs, the
//! one-curve contraction engine with its induced pairing, the minimal model
//! program driver with end-state classification and theorem-level
//! validators, nef-boundary polytopes with exact vertex enumeration, and
//! divisor-level certificates.
//!
//! All arithmetic is exact arbitrary-precision rational; there is no
//! floating point anywhere. Every value is immutable after construction and
//! every operation is a pure function, so the whole crate is thread-safe by
//! construction.
//!
//! The engine works relative to the declared catalog: it certifies the
//! classes the caller named, it does not prove statements about curves that
//! were never written down.

pub mod analysis;
pub mod error;
pub mod lattice;
pub mod mmp;
pub mod model;
pub mod polytope;
pub mod rational;
pub mod report;
pub mod singularities;
pub mod surface;

pub use error::{Error, Result};
pub use lattice::{CoeffVector, PairingMatrix};
pub use rational::Rational;
pub use surface::{Boundary, BoundaryMode, CurveRecord, DivisorClass, FieldTag, SurfaceModel};
