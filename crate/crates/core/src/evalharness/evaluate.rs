//! The leave-one-out 1+N evaluation protocol: each test interaction's true
//! item is ranked against N sampled negatives (uniform over items the user
//! never interacted with, seeded per row), metrics are aggregated over rows,
//! and a configurable fraction of rows also gets its top recommendation
//! explained and transparency-scored.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::metrics::{hit_rate, mrr, ndcg, RankedList};
use crate::agents::Explanation;
use crate::corpus::{InteractionStore, SplitAssignment, SplitPart};
use crate::error::{Error, Result};
use crate::text::{stable_hash, unit_f64};
use crate::transparency::TransparencyScore;

/// A pluggable scoring path for the protocol.
pub trait CandidateScorer {
    fn name(&self) -> &str;

    /// Score each candidate item for the user; higher ranks earlier.
    fn score_candidates(&mut self, user_id: &str, items: &[String]) -> Result<Vec<f64>>;

    /// Explain the top-ranked item of a row, if this scorer supports it.
    fn explain_top(
        &mut self,
        _user_id: &str,
        _item_id: &str,
    ) -> Result<Option<(Explanation, TransparencyScore)>> {
        Ok(None)
    }
}

/// Seeded uniform-random scorer: the calibration baseline for the 1+N
/// protocol (HR@10 expectation is K / (1 + N)).
pub struct RandomScorer {
    pub seed: u64,
}

impl CandidateScorer for RandomScorer {
    fn name(&self) -> &str {
        "random"
    }

    fn score_candidates(&mut self, user_id: &str, items: &[String]) -> Result<Vec<f64>> {
        Ok(items
            .iter()
            .map(|item| unit_f64(stable_hash(self.seed, &[user_id, item])))
            .collect())
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EvalOptions {
    /// Negatives sampled per positive.
    pub negatives: usize,
    /// Cutoffs for HR@K and NDCG@K.
    pub k_values: Vec<usize>,
    pub seed: u64,
    /// Fraction of rows whose top item gets explained and scored.
    pub explanation_fraction: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            negatives: 99,
            k_values: vec![5, 10],
            seed: 42,
            explanation_fraction: 0.0,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EvalRow {
    pub user_id: String,
    /// Interaction position of the test case.
    pub position: usize,
    pub truth: String,
    pub truth_rank: Option<usize>,
    pub metrics: BTreeMap<String, f64>,
}

/// Mean transparency over the sampled explanations.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct ExplanationSummary {
    pub count: usize,
    pub faithfulness: f64,
    pub coherence: f64,
    pub personalization: f64,
    pub composite: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EvalReport {
    pub scorer: String,
    pub options: EvalOptions,
    pub rows: Vec<EvalRow>,
    /// Test rows skipped because the user had no train history.
    pub skipped: usize,
    pub means: BTreeMap<String, f64>,
    pub explanation: Option<ExplanationSummary>,
}

impl EvalReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Human-readable summary table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "scorer={} rows={} skipped={} negatives={} seed={}\n",
            self.scorer,
            self.rows.len(),
            self.skipped,
            self.options.negatives,
            self.options.seed
        ));
        out.push_str(&format!("{:<12} {:>10}\n", "metric", "mean"));
        for (metric, mean) in &self.means {
            out.push_str(&format!("{metric:<12} {mean:>10.4}\n"));
        }
        if let Some(e) = &self.explanation {
            out.push_str(&format!(
                "explanations n={} faith={:.4} coher={:.4} pers={:.4} trans={:.4}\n",
                e.count, e.faithfulness, e.coherence, e.personalization, e.composite
            ));
        }
        out
    }

    /// Per-row lines: `<user>\t<metric>\t<value>`.
    pub fn rows_tsv(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            for (metric, value) in &row.metrics {
                out.push_str(&format!("{}\t{}\t{:.6}\n", row.user_id, metric, value));
            }
        }
        out
    }

    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.means.get(metric).copied()
    }
}

/// Sample `count` distinct elements from `pool` with a seeded partial
/// Fisher-Yates shuffle.
fn sample_distinct(pool: &mut [String], count: usize, rng: &mut ChaCha20Rng) -> Vec<String> {
    let take = count.min(pool.len());
    for i in 0..take {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool[..take].to_vec()
}

/// Run the protocol over every test interaction.
pub fn evaluate(
    scorer: &mut dyn CandidateScorer,
    store: &InteractionStore,
    split: &SplitAssignment,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let test_positions = split.positions(SplitPart::Test);
    if test_positions.is_empty() {
        return Err(Error::Validation("test split is empty".into()));
    }
    let all_items: Vec<String> = store.item_ids().map(String::from).collect();

    let mut rows = Vec::new();
    let mut skipped = 0usize;
    let mut expl = ExplanationSummary::default();

    for pos in test_positions {
        let interaction = store.get(pos).expect("test position exists");
        let user_id = interaction.user_id.clone();
        let truth = interaction.item_id.clone();

        if store
            .user_positions(&user_id, Some((split, SplitPart::Train)))
            .is_empty()
        {
            skipped += 1; // protocol requires train history
            continue;
        }

        let interacted: BTreeSet<&str> = store
            .user_history(&user_id, None)
            .iter()
            .map(|it| it.item_id.as_str())
            .collect();
        let mut eligible: Vec<String> = all_items
            .iter()
            .filter(|item| !interacted.contains(item.as_str()))
            .cloned()
            .collect();
        let mut rng =
            ChaCha20Rng::seed_from_u64(stable_hash(opts.seed, &["negatives", &pos.to_string()]));
        let negatives = sample_distinct(&mut eligible, opts.negatives, &mut rng);

        let mut candidates = Vec::with_capacity(1 + negatives.len());
        candidates.push(truth.clone());
        candidates.extend(negatives);

        let scores = scorer.score_candidates(&user_id, &candidates)?;
        if scores.len() != candidates.len() {
            return Err(Error::Scoring(format!(
                "scorer returned {} scores for {} candidates",
                scores.len(),
                candidates.len()
            )));
        }
        let mut scored: Vec<(String, f64)> = candidates.into_iter().zip(scores).collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("scores are finite")
                .then_with(|| a.0.cmp(&b.0))
        });
        let ranked = RankedList::new(
            user_id.clone(),
            scored.into_iter().map(|(item, _)| item).collect(),
            truth.clone(),
        )?;

        let mut metrics = BTreeMap::new();
        for &k in &opts.k_values {
            metrics.insert(format!("hr@{k}"), f64::from(hit_rate(&ranked, k)));
            metrics.insert(format!("ndcg@{k}"), ndcg(&ranked, k));
        }
        metrics.insert("mrr".to_string(), mrr(&ranked));

        if opts.explanation_fraction > 0.0
            && unit_f64(stable_hash(opts.seed, &["explain", &pos.to_string()]))
                < opts.explanation_fraction
        {
            if let Some((_, transparency)) = scorer.explain_top(&user_id, &ranked.items[0])? {
                expl.count += 1;
                expl.faithfulness += transparency.faithfulness;
                expl.coherence += transparency.coherence;
                expl.personalization += transparency.personalization;
                expl.composite += transparency.composite;
            }
        }

        rows.push(EvalRow {
            user_id,
            position: pos,
            truth,
            truth_rank: ranked.truth_rank(),
            metrics,
        });
    }

    let mut means = BTreeMap::new();
    if !rows.is_empty() {
        for key in rows[0].metrics.keys() {
            let sum: f64 = rows.iter().map(|r| r.metrics[key]).sum();
            means.insert(key.clone(), sum / rows.len() as f64);
        }
    }
    let explanation = if expl.count > 0 {
        let n = expl.count as f64;
        Some(ExplanationSummary {
            count: expl.count,
            faithfulness: expl.faithfulness / n,
            coherence: expl.coherence / n,
            personalization: expl.personalization / n,
            composite: expl.composite / n,
        })
    } else {
        None
    };

    Ok(EvalReport {
        scorer: scorer.name().to_string(),
        options: opts.clone(),
        rows,
        skipped,
        means,
        explanation,
    })
}
