//! The four specialized agents: user profile construction, KG-grounded item
//! analysis, hybrid-score reasoning with evidence chains, and explanation
//! generation.

mod attributes;
mod chain;
mod constraints;
mod explain;
mod item;
mod profile;
mod scoring;

pub use attributes::ItemAttributes;
pub use chain::{
    build_reasoning_chain, render_evidence, render_tagged_subgraphs, retained_triple_ids,
    ChainContext, ComponentScores, EvidenceId, ReasoningChain, ReasoningStep, StepKind,
};
pub use constraints::Constraint;
pub use explain::{generate_explanation, Explanation, ExplanationMode};
pub use item::{analyze_item, slice_vector_key, ItemAnalysisContext, ItemEvidence};
pub use profile::{build_profile, FacetSource, PreferenceFacet, ProfileOptions, UserProfile};
pub use scoring::{
    hybrid_score, matched_facets, parse_preference, score_cb, score_cf, score_llm, LlmScore,
    ScoreWeights, TrainMatrix,
};
