//! Survey item linking: detect sentences in publications that mention
//! survey items, then rank knowledge-base items for each such sentence.
//!
//! The crate covers the annotated corpus model, the survey-item knowledge
//! base, lexical and dense retrieval, ranking metrics, the two-stage
//! pipeline with its diagnostic evaluation, and generation of
//! pseudo-labeled sentence pairs.

pub mod corpus;
pub mod detection;
pub mod error;
pub mod features;
pub mod kb;
pub mod metrics;
pub mod pairs;
pub mod pipeline;
pub mod retrieval;
pub mod synth;

pub use error::{Error, Result};
