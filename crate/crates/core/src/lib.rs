//! Single-copy probabilistic entanglement detection.
//!
//! The crate simulates randomized local-measurement protocols on target and
//! separable sources and computes certificates bounding how often a
//! separable input could have passed.
//!
//! * [`dense`] and [`stabilizer`] are the two simulation engines, wrapped by
//!   [`source::StateHandle`].
//! * [`partitions`] enumerates and samples regular cluster partitions.
//! * [`protocols`] implements the singlet-pair and cluster-state schemes.
//! * [`hamiltonian`] implements the local-Hamiltonian scheme.
//! * [`bounds`] holds the Chernoff, McDiarmid and Chebyshev certificates.
//! * [`sep_oracle`] maximizes expectations over product states.
//! * [`noise`] covers separable-noise mixtures.
//! * [`runner`] drives seeded campaigns and record export.

// `!(x > 0.0)` is used so that NaN fails argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dense;
pub mod error;
pub mod hamiltonian;
pub mod noise;
pub mod partitions;
pub mod pauli;
pub mod protocols;
pub mod rng;
pub mod runner;
pub mod sep_oracle;
pub mod source;
pub mod stabilizer;

pub use error::{Error, Result};
