//! Weighted eventuality knowledge graphs from dependency-parsed text.
//!
//! The crate covers extraction ([`ingest`], [`extract`], [`discourse`]),
//! aggregation and persistence ([`store`]), generalization ([`concept`])
//! and the analyses run over a built graph ([`infer`], [`rules`],
//! [`metapath`]). [`pipeline`] wires the stages together.

pub mod concept;
pub mod discourse;
pub mod extract;
pub mod hash;
pub mod infer;
pub mod ingest;
pub mod label;
pub mod lexicon;
pub mod metapath;
pub mod pattern;
pub mod pipeline;
pub mod relation;
pub mod rules;
pub mod store;

pub use relation::RelationType;
