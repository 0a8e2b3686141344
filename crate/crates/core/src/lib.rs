//! Locality-sensitive hashing for the angular distance built on random
//! projections.
//!
//! A minhash projects a vector with a Johnson–Lindenstrauss style matrix and
//! reads a bucket off the result: the largest coordinate ([`families::argmax_of`]),
//! the sign pattern ([`families::sign_of`]) or the nearest cross-polytope
//! vertex ([`families::cross_polytope_of`]). Besides the dense Gaussian and ±1
//! projections, the crate provides feature hashing, a sparse projection that
//! needs only `d·k` additions and subtractions per vector.
//!
//! Modules, bottom up:
//!
//! - [`vector`], [`seed`], [`sample`]: vectors, distances, seeded sampling.
//! - [`projections`]: dense and feature-hashing projections.
//! - [`families`]: the six minhash families.
//! - [`amplify`]: AND/OR amplification and the `(r, b)` solver.
//! - [`index`]: the multi-table index and its binary snapshot.
//! - [`harness`]: experiments, data files and CSV artifacts.
//! - [`cli`]: the `jl-lsh` command line.

pub mod amplify;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod families;
pub mod harness;
pub mod index;
pub mod ops;
pub mod projections;
pub mod sample;
pub mod seed;
pub mod vector;

pub use error::{LshError, Result};
