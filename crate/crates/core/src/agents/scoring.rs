//! Reasoning Agent scoring: collaborative, content-based, and model
//! preference signals combined by a convex hybrid.
//!
//! The collaborative score is the mean item-item cosine between binarized
//! train-interaction columns of the candidate and the user's recent items: a
//! training-free estimator that stays checkable on toy matrices.

use std::collections::{BTreeSet, HashMap};

use super::attributes::ItemAttributes;
use super::profile::{PreferenceFacet, UserProfile};
use crate::backend::{prompts, Backend, CompletionRequest};
use crate::corpus::{InteractionStore, SplitAssignment, SplitPart};
use crate::error::{Error, Result};

/// Binarized train matrix: item -> set of users who interacted with it in
/// train, plus each user's train items in (timestamp, item_id) order.
#[derive(Debug, Clone, Default)]
pub struct TrainMatrix {
    item_users: HashMap<String, BTreeSet<String>>,
    user_items: HashMap<String, Vec<String>>,
}

impl TrainMatrix {
    pub fn build(store: &InteractionStore, split: &SplitAssignment) -> Self {
        let mut item_users: HashMap<String, BTreeSet<String>> = HashMap::new();
        let mut user_items: HashMap<String, Vec<String>> = HashMap::new();
        for user in store.user_ids().map(str::to_string).collect::<Vec<_>>() {
            for pos in store.user_positions(&user, Some((split, SplitPart::Train))) {
                let it = store.get(pos).expect("indexed position");
                item_users
                    .entry(it.item_id.clone())
                    .or_default()
                    .insert(user.clone());
                user_items
                    .entry(user.clone())
                    .or_default()
                    .push(it.item_id.clone());
            }
        }
        TrainMatrix {
            item_users,
            user_items,
        }
    }

    pub fn users_of(&self, item_id: &str) -> Option<&BTreeSet<String>> {
        self.item_users.get(item_id)
    }

    /// The last `recent` train items of a user, oldest first.
    pub fn recent_items(&self, user_id: &str, recent: usize) -> &[String] {
        match self.user_items.get(user_id) {
            None => &[],
            Some(items) => &items[items.len().saturating_sub(recent)..],
        }
    }

    pub fn interaction_count(&self, item_id: &str) -> usize {
        self.item_users.get(item_id).map_or(0, BTreeSet::len)
    }
}

/// Collaborative-filtering score: mean cosine between the binarized user
/// columns of `item_id` and each of the user's last `recent` train items.
/// Empty history or an item unseen in training scores 0.
pub fn score_cf(train: &TrainMatrix, user_id: &str, item_id: &str, recent: usize) -> f64 {
    let history = train.recent_items(user_id, recent);
    if history.is_empty() {
        return 0.0;
    }
    let Some(candidate_users) = train.users_of(item_id) else {
        return 0.0;
    };
    if candidate_users.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for past in history {
        let Some(past_users) = train.users_of(past) else {
            continue;
        };
        let overlap = candidate_users.intersection(past_users).count() as f64;
        let denom = ((candidate_users.len() * past_users.len()) as f64).sqrt();
        if denom > 0.0 {
            total += overlap / denom;
        }
    }
    total / history.len() as f64
}

/// Content-based score: matched facet weight over total facet weight.
pub fn score_cb(profile: &UserProfile, item_attributes: &[(String, String)]) -> f64 {
    let total: f64 = profile.facets.iter().map(|f| f.weight).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let attr_set: BTreeSet<(&str, &str)> = item_attributes
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    let matched: f64 = profile
        .facets
        .iter()
        .filter(|f| attr_set.contains(&(f.key.as_str(), f.value.as_str())))
        .map(|f| f.weight)
        .sum();
    matched / total
}

/// Facets whose (key, value) appears among the item's attributes.
pub fn matched_facets<'a>(
    profile: &'a UserProfile,
    attrs: &ItemAttributes,
    item_id: &str,
) -> Vec<&'a PreferenceFacet> {
    let attr_set = attrs.attr_set(item_id);
    profile
        .facets
        .iter()
        .filter(|f| attr_set.contains(&(f.key.as_str(), f.value.as_str())))
        .collect()
}

/// Outcome of the model preference prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlmScore {
    pub value: f64,
    /// Set when the backend failed or its reply had no parseable preference;
    /// the value is then the neutral 0.5 so the hybrid sum stays meaningful.
    pub degraded: bool,
}

/// First decimal token of `reply` lying in [0, 1], if any.
pub fn parse_preference(reply: &str) -> Option<f64> {
    for token in reply.split(|c: char| c.is_whitespace() || c == ':' || c == '=' || c == ',') {
        let token = token.trim_matches(|c: char| !c.is_ascii_digit() && c != '.' && c != '-');
        if token.is_empty() {
            continue;
        }
        if let Ok(v) = token.parse::<f64>() {
            if (0.0..=1.0).contains(&v) {
                return Some(v);
            }
        }
    }
    None
}

/// Model preference for an item, predicted from the profile and verbalized
/// retrieved evidence. Never fails: unparseable or erroring backends yield a
/// flagged neutral 0.5.
pub fn score_llm(
    backend: &dyn Backend,
    profile: &UserProfile,
    item_id: &str,
    evidence_text: &str,
    seed: u64,
) -> LlmScore {
    let prompt = prompts::score_prompt(item_id, &profile.render_text(), evidence_text);
    match backend.complete(&CompletionRequest::new(prompt, seed)) {
        Ok(reply) => match parse_preference(&reply) {
            Some(value) => LlmScore {
                value,
                degraded: false,
            },
            None => LlmScore {
                value: 0.5,
                degraded: true,
            },
        },
        Err(e) => {
            log::warn!("llm scoring degraded for {item_id}: {e}");
            LlmScore {
                value: 0.5,
                degraded: true,
            }
        }
    }
}

/// Convex combination weights for the hybrid score.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScoreWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        // the KG-grounded model signal is weighted slightly higher
        ScoreWeights {
            alpha: 0.3,
            beta: 0.3,
            gamma: 0.4,
        }
    }
}

impl ScoreWeights {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 0.0 || self.beta < 0.0 || self.gamma < 0.0 {
            return Err(Error::Validation(
                "hybrid weights must be non-negative".into(),
            ));
        }
        let sum = self.alpha + self.beta + self.gamma;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "hybrid weights must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// `alpha * cf + beta * cb + gamma * llm` under validated weights.
pub fn hybrid_score(cf: f64, cb: f64, llm: f64, weights: &ScoreWeights) -> Result<f64> {
    weights.validate()?;
    Ok(weights.alpha * cf + weights.beta * cb + weights.gamma * llm)
}
