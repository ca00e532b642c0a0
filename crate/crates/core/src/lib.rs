//! Preference aggregation over amino-acid interaction classes.
//!
//! The pipeline runs in two steps. Each protein structure yields its own
//! preference over interaction classes (internal aggregation), and a rule
//! combines those preferences into one global preference (external
//! aggregation). The [`axiom_audit`] module checks rules against the usual
//! social-choice axioms by exhaustive or sampled search and reports concrete
//! counterexamples.

pub mod amino;
pub mod axiom_audit;
pub mod contacts;
pub mod domain_restrict;
pub mod external_agg;
pub mod internal_agg;
pub mod order;
pub mod profiles;
pub mod rng;
pub mod structure_io;
pub mod universe;

pub use amino::AminoAcid;
pub use contacts::{ContactConfig, InteractionClass, InteractionInstance, Scorer};
pub use external_agg::{AggregationOutcome, NamedRule};
pub use internal_agg::{Combine, RankingWithTies, UtilityVector};
pub use order::WeakOrder;
pub use profiles::Profile;
pub use structure_io::{DistanceMode, ProteinStructure};
pub use universe::Universe;
