//! Finite posets whose automorphism group is a prescribed finite group.
//!
//! The crate provides Cayley-table groups, finite posets with their Hasse
//! diagrams, an individualization-refinement automorphism engine, explicit
//! constructions of realizing posets, and an exhaustive search for the
//! smallest realizer of a small group.

pub mod aut;
pub mod beta;
pub mod constructions;
pub mod error;
pub mod group;
pub mod perm;
pub mod poset;
pub mod verify;

pub use aut::{automorphism_group, canonical_form, isomorphism, AutConfig, CanonicalForm};
pub use constructions::ConstructedRealization;
pub use error::{Error, Result};
pub use group::{FiniteGroup, GeneratingSequence};
pub use perm::{Perm, PermGroup};
pub use poset::{Graph, Label, Poset};
pub use verify::{verify_realization, RealizationCertificate};
