//! Ranking metrics over a single ranked list with one ground-truth item.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A ranked candidate list for one test case.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RankedList {
    pub user_id: String,
    pub items: Vec<String>,
    pub truth: String,
}

impl RankedList {
    /// Build a ranked list, enforcing a non-empty, duplicate-free item list.
    pub fn new(
        user_id: impl Into<String>,
        items: Vec<String>,
        truth: impl Into<String>,
    ) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Validation("ranked list must be non-empty".into()));
        }
        let mut seen = HashSet::new();
        for item in &items {
            if !seen.insert(item.as_str()) {
                return Err(Error::Validation(format!(
                    "ranked list contains duplicate item {item:?}"
                )));
            }
        }
        Ok(RankedList {
            user_id: user_id.into(),
            items,
            truth: truth.into(),
        })
    }

    /// 1-based rank of the ground-truth item, if present.
    pub fn truth_rank(&self) -> Option<usize> {
        self.items
            .iter()
            .position(|i| *i == self.truth)
            .map(|p| p + 1)
    }
}

/// 1 iff the ground-truth item appears within the first K positions.
pub fn hit_rate(ranked: &RankedList, k: usize) -> u8 {
    match ranked.truth_rank() {
        Some(rank) if rank <= k => 1,
        _ => 0,
    }
}

/// Single-relevant-item NDCG@K: `1 / log2(rank + 1)` when the truth ranks
/// within K, else 0. With one relevant item the ideal DCG is 1.
pub fn ndcg(ranked: &RankedList, k: usize) -> f64 {
    match ranked.truth_rank() {
        Some(rank) if rank <= k => 1.0 / ((rank as f64) + 1.0).log2(),
        _ => 0.0,
    }
}

/// Reciprocal rank of the ground-truth item; 0 when absent.
pub fn mrr(ranked: &RankedList) -> f64 {
    match ranked.truth_rank() {
        Some(rank) => 1.0 / rank as f64,
        None => 0.0,
    }
}
