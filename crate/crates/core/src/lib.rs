//! Classes of principled arguments (CoPAs) for debate motions.
//!
//! The crate is organised bottom-up:
//!
//! - [`kb`] holds the domain model: motions, CoPAs, the match relation, dataset
//!   loading, descriptive statistics and claim instantiation.
//! - [`text_sim`] provides the similarity primitives: embeddings, tf-idf,
//!   set-to-set similarity and hypergeometric title enrichment.
//! - [`features`] builds the 17-dimensional (motion, CoPA) feature vector.
//! - [`classifiers`] implements the matching methods and the max-ensemble.
//! - [`eval`] runs leave-one-motion-out evaluation and computes curves.

pub mod classifiers;
pub mod error;
pub mod eval;
pub mod features;
pub mod kb;
pub mod text_sim;

pub use error::{Error, Result};
