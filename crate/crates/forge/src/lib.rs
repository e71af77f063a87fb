//! Finite gadget constructions and exhaustive verification kernels for
//! embeddability-type relations.
//!
//! The crate builds, at desk scale, a chain of reductions between
//! combinatorial comparison relations and verifies every equivalence the
//! constructions admit on enumerated finite corpora:
//!
//! - [`graph`]: finite simple graphs with exact search kernels (induced
//!   embedding, isomorphism, automorphism groups, epimorphisms);
//! - [`trees`]: bounded normal trees, the comparability quasi-order and its
//!   injective witness refinement, plus corpus enumeration;
//! - [`gadget`]: rigid combinatorial trees encoding normal trees, where
//!   equality becomes isomorphism and comparability becomes structured
//!   embeddability;
//! - [`epi`]: quantifier-free type codes and block gadgets that turn graph
//!   embedding into epimorphic-image comparisons;
//! - [`colored`]: colored sums of omega powers with an exact embedding
//!   decider and its enumeration oracle;
//! - [`metric`]: discrete geodesic spaces, ultrametric branch spaces with
//!   fork indices, isometric-embedding search and ball structures;
//! - [`norm`]: graph-induced polyhedral norms with exact arithmetic, signed
//!   isometric embeddings and strongly-extreme-point certificates;
//! - [`actions`]: permutation-group stabilizers, coset selectors and the
//!   saturation-by-uniqueness engine;
//! - [`suites`] and [`cli`]: the deterministic verification suites,
//!   certificates and the command-line surface.
//!
//! The `examples/` directory walks through each capability; the acceptance
//! suite in `tests/` pins the end-to-end guarantees.

pub mod actions;
pub mod cert;
pub mod cli;
pub mod colored;
pub mod epi;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod hash;
pub mod metric;
pub mod norm;
pub mod suites;
pub mod trees;

pub use error::{Error, Result};
