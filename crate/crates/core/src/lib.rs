//! Computational lab for `L^p`-`L^q` Fourier and spectral multipliers on
//! unimodular groups.
//!
//! The crate builds finite models of `Z_N`, `T^d`, SU(2), the Heisenberg
//! group (spectral side only) and radial `R^n`, computes generalised
//! singular numbers and noncommutative Lorentz norms of invariant operators,
//! and checks Hausdorff-Young-Paley, Nikolskii, Hörmander, Lizorkin-type and
//! heat-decay estimates numerically.

pub mod error;
pub mod fourier;
pub mod group_models;
pub mod lab;
pub mod multiplier;
pub mod numerics;
pub mod singular_values;
pub mod spectral;

pub use error::{LabError, Result};
