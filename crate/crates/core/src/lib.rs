//! Generalized first-passage percolation on `Z^d`.
//!
//! Edge weights follow `F_p = pF + (1-p)δ∞` and are generated by a stateless
//! counter-based function, so every quantity in this crate is a deterministic
//! function of a seed and a finite window. The crate needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod animals;
pub mod environment;
pub mod estimators;
pub mod error;
pub mod lattice;
pub mod law;
pub mod passage;
pub mod percolation;
pub mod radius;
pub mod replicate;
pub mod rng;
pub mod stats;

pub use environment::{lambda_for, CoupledEnvironment, EnvironmentParams};
pub use error::{Error, Result};
pub use lattice::{AnnulusRegion, BoxRegion, Cuboid, Edge, Point};
pub use law::WeightLaw;
