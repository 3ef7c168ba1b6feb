//! MATRAG: a multi-agent recommendation pipeline over knowledge-graph-augmented
//! retrieval, with hybrid scoring, evidence-linked reasoning chains, grounded
//! explanation generation, and quantitative transparency scoring.
//!
//! All model calls go through the [`backend::Backend`] trait; the bundled
//! deterministic mock backend makes every pipeline run reproducible offline,
//! while the HTTP backend adapts any JSON model server.
//!
//! Module map:
//! - [`corpus`]: interaction ingestion, per-user histories, temporal splits
//! - [`kg`]: triple store, entity linking, k-hop subgraph extraction
//! - [`index`]: embeddings, exact top-K cosine retrieval, vector persistence
//! - [`backend`]: completion / embedding / entailment / coherence abstraction
//! - [`agents`]: user modeling, item analysis, hybrid reasoning, explanation
//! - [`transparency`]: faithfulness, coherence, personalization, composite
//! - [`orchestrator`]: request classification, dispatch, response assembly
//! - [`evalharness`]: HR@K / NDCG@K / MRR / BLEU-4 and the 1+N eval protocol
//! - [`config`]: pipeline configuration and ablation switches

pub mod agents;
pub mod backend;
pub mod config;
pub mod corpus;
pub mod error;
pub mod evalharness;
pub mod index;
pub mod kg;
pub mod orchestrator;
pub mod synthetic;
pub mod text;
pub mod transparency;

pub use error::{Error, Result};
