//! No-signalling conditional probability boxes, finite de Finetti mixtures
//! for symmetric boxes and separable quantum states, and distinguishability
//! distances between boxes.
//!
//! Parties, inputs and outputs are 0-based throughout the library.

pub mod boxes;
pub mod catalog;
pub mod cli;
pub mod definetti;
pub mod distance;
pub mod error;
pub mod quantum;
pub mod sampling;
pub mod urn;

pub use boxes::{CondBox, Measurement, Permutation, ValidationReport, DEFAULT_TOL};
pub use definetti::{
    box_definetti_bound, definetti_approximation, lemma2_decompose, mixture_to_box,
    realized_distance, reconstruct, DeFinettiMixture, SeparableDecomposition,
};
pub use distance::{
    adaptive_distance, general_distance, individual_distance, AdaptiveDistance, Effect,
    GeneralDistance,
};
pub use error::{Error, Result};
pub use quantum::{
    definetti_quantum, definetti_quantum_distance, reduced_state, trace_norm_distance,
    DensityMatrix, SymmetricSeparableSpec,
};
pub use urn::{df_bound, Urn};
