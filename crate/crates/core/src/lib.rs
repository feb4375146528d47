//! Exact algebra of torsion slopes on elliptic curves and the quadric models
//! of `X(ℓ)` they produce.

// The field handle caches a non-residue in a OnceLock; Hash and Eq ignore it.
#![allow(clippy::mutable_key_type)]

pub mod analytic;
pub mod curve;
pub mod error;
pub mod exactfield;
pub mod hecke;
pub mod identities;
pub mod modelbuild;
pub mod pairing;
pub mod series;

pub use error::{Error, Result};
