//! Evaluation harness: HR@K, NDCG@K, MRR, BLEU-4, and the leave-one-out 1+N
//! ranking protocol with seeded negative sampling.

mod bleu;
mod evaluate;
mod metrics;

pub use bleu::bleu4;
pub use evaluate::{
    evaluate, CandidateScorer, EvalOptions, EvalReport, EvalRow, ExplanationSummary, RandomScorer,
};
pub use metrics::{hit_rate, mrr, ndcg, RankedList};
