//! User Modeling Agent: builds a structured preference profile from
//! interaction histories and textual feedback.
//!
//! The profile has four facet channels: explicit facets parsed from a backend
//! completion over review texts, implicit facets inferred from positively
//! rated items' attributes, temporal facets re-weighting the implicit ones by
//! exponential recency decay, and contextual facets parsed from interaction
//! metadata (the bundled formats carry none, so that channel stays empty).

use std::collections::BTreeMap;

use super::attributes::ItemAttributes;
use crate::backend::{prompts, Backend, CompletionRequest};
use crate::corpus::Interaction;

/// Where a preference facet came from.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum FacetSource {
    Explicit,
    Implicit,
    Contextual,
    Temporal,
}

/// One preference signal.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PreferenceFacet {
    pub key: String,
    pub value: String,
    /// In [0, 1].
    pub weight: f64,
    pub source: FacetSource,
}

/// A user's structured preference profile. Facets are unique per
/// (key, value, source) and sorted by (source, key, value).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct UserProfile {
    pub user_id: String,
    pub facets: Vec<PreferenceFacet>,
    pub built_at: i64,
    pub history_length: usize,
    /// Set when the backend failed and only behavior-derived facets remain.
    pub degraded: bool,
}

impl UserProfile {
    pub fn empty(user_id: impl Into<String>, built_at: i64) -> Self {
        UserProfile {
            user_id: user_id.into(),
            facets: Vec::new(),
            built_at,
            history_length: 0,
            degraded: false,
        }
    }

    /// Facets rendered as `key=value` lines: the canonical text form used for
    /// retrieval queries and personalization scoring.
    pub fn render_text(&self) -> String {
        self.facets
            .iter()
            .map(|f| format!("{}={}", f.key, f.value))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Knobs for [`build_profile`].
#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    /// Reference time for recency decay (seconds since epoch).
    pub now: i64,
    /// Recency half-life in seconds.
    pub half_life_secs: f64,
    /// Ratings at or above this count as positive.
    pub positive_threshold: f64,
    /// Seed passed to backend completions.
    pub seed: u64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            now: 0,
            half_life_secs: 90.0 * 86_400.0,
            positive_threshold: 4.0,
            seed: 0,
        }
    }
}

/// Build a user profile from history.
///
/// Backend failure degrades rather than aborts: the profile keeps its
/// implicit/temporal facets and sets the `degraded` flag.
pub fn build_profile(
    backend: &dyn Backend,
    user_id: &str,
    history: &[&Interaction],
    attrs: &ItemAttributes,
    opts: &ProfileOptions,
) -> UserProfile {
    let mut facets: BTreeMap<(FacetSource, String, String), f64> = BTreeMap::new();
    let mut add = |source: FacetSource, key: &str, value: &str, weight: f64| {
        let slot = facets
            .entry((source, key.to_string(), value.to_string()))
            .or_insert(0.0);
        if weight > *slot {
            *slot = weight;
        }
    };

    // implicit: attribute frequency over positively rated items, max-normalized
    let mut counts: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut decayed: BTreeMap<(String, String), f64> = BTreeMap::new();
    for it in history {
        if it.rating < opts.positive_threshold {
            continue;
        }
        let age = (opts.now - it.timestamp).max(0) as f64;
        let decay = if opts.half_life_secs > 0.0 {
            0.5_f64.powf(age / opts.half_life_secs)
        } else {
            0.0
        };
        for (key, value) in attrs.get(&it.item_id) {
            *counts.entry((key.clone(), value.clone())).or_insert(0.0) += 1.0;
            *decayed.entry((key.clone(), value.clone())).or_insert(0.0) += decay;
        }
    }
    let max_count = counts.values().cloned().fold(0.0_f64, f64::max);
    if max_count > 0.0 {
        for ((key, value), count) in &counts {
            add(FacetSource::Implicit, key, value, count / max_count);
        }
    }
    let max_decayed = decayed.values().cloned().fold(0.0_f64, f64::max);
    if max_decayed > 0.0 {
        for ((key, value), sum) in &decayed {
            add(FacetSource::Temporal, key, value, sum / max_decayed);
        }
    }

    // explicit: backend completion over concatenated review texts
    let mut degraded = false;
    let texts: Vec<&str> = history
        .iter()
        .filter_map(|it| it.text.as_deref())
        .filter(|t| !t.trim().is_empty())
        .collect();
    if !texts.is_empty() {
        let req = CompletionRequest::new(prompts::profile_prompt(&texts.join("\n")), opts.seed);
        match backend.complete(&req) {
            Ok(reply) => {
                for line in reply.lines() {
                    if let Some((key, value)) = line.split_once('=') {
                        let (key, value) = (key.trim(), value.trim());
                        if !key.is_empty() && !value.is_empty() {
                            add(FacetSource::Explicit, key, value, 1.0);
                        }
                    }
                }
            }
            Err(e) => {
                log::warn!("profile extraction degraded for {user_id}: {e}");
                degraded = true;
            }
        }
    }

    // contextual: the bundled interaction format carries no metadata, so this
    // channel is plumbed but empty

    UserProfile {
        user_id: user_id.to_string(),
        facets: facets
            .into_iter()
            .map(|((source, key, value), weight)| PreferenceFacet {
                key,
                value,
                weight,
                source,
            })
            .collect(),
        built_at: opts.now,
        history_length: history.len(),
        degraded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::MockBackend;
    use crate::error::{Error, Result};

    fn interaction(item: &str, rating: f64, ts: i64, text: Option<&str>) -> Interaction {
        Interaction {
            user_id: "u1".into(),
            item_id: item.into(),
            rating,
            timestamp: ts,
            text: text.map(String::from),
        }
    }

    fn attrs(lines: &str) -> ItemAttributes {
        ItemAttributes::parse(lines, "test").unwrap()
    }

    #[test]
    fn empty_history_yields_zero_facets() {
        let p = build_profile(
            &MockBackend::new(1, 8),
            "u1",
            &[],
            &ItemAttributes::default(),
            &ProfileOptions::default(),
        );
        assert!(p.facets.is_empty());
        assert!(!p.degraded);
        assert_eq!(p.history_length, 0);
    }

    #[test]
    fn implicit_facets_are_frequency_normalized() {
        // two positive interactions both carrying genre=comedy -> weight 1.0
        let a = interaction("i1", 5.0, 100, None);
        let b = interaction("i2", 4.0, 200, None);
        let table = attrs("i1\tgenre=comedy\ni2\tgenre=comedy\n");
        let p = build_profile(
            &MockBackend::new(1, 8),
            "u1",
            &[&a, &b],
            &table,
            &ProfileOptions {
                now: 300,
                ..Default::default()
            },
        );
        let implicit: Vec<_> = p
            .facets
            .iter()
            .filter(|f| f.source == FacetSource::Implicit)
            .collect();
        assert_eq!(implicit.len(), 1);
        assert_eq!(implicit[0].key, "genre");
        assert_eq!(implicit[0].value, "comedy");
        assert!((implicit[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_ratings_contribute_no_implicit_facets() {
        let a = interaction("i1", 2.0, 100, None);
        let table = attrs("i1\tgenre=comedy\n");
        let p = build_profile(
            &MockBackend::new(1, 8),
            "u1",
            &[&a],
            &table,
            &ProfileOptions::default(),
        );
        assert!(p.facets.is_empty());
    }

    #[test]
    fn explicit_facets_come_from_the_mock_keyword_table() {
        let a = interaction("i1", 3.0, 100, Some("loved the sci-fi plot"));
        let p = build_profile(
            &MockBackend::new(1, 8),
            "u1",
            &[&a],
            &ItemAttributes::default(),
            &ProfileOptions::default(),
        );
        let explicit: Vec<_> = p
            .facets
            .iter()
            .filter(|f| f.source == FacetSource::Explicit)
            .collect();
        assert_eq!(explicit.len(), 1);
        assert_eq!(
            (explicit[0].key.as_str(), explicit[0].value.as_str()),
            ("genre", "sci-fi")
        );
        assert_eq!(explicit[0].weight, 1.0);
    }

    #[test]
    fn temporal_weights_decay_with_age() {
        // two identical-attribute positives at different ages: the older one
        // must contribute strictly less
        let recent = interaction("i1", 5.0, 1_000_000, None);
        let old = interaction("i2", 5.0, 0, None);
        let table = attrs("i1\tgenre=comedy\ni2\tgenre=drama\n");
        let opts = ProfileOptions {
            now: 1_000_000,
            half_life_secs: 500_000.0,
            ..Default::default()
        };
        let p = build_profile(
            &MockBackend::new(1, 8),
            "u1",
            &[&recent, &old],
            &table,
            &opts,
        );
        let weight_of = |value: &str| {
            p.facets
                .iter()
                .find(|f| f.source == FacetSource::Temporal && f.value == value)
                .map(|f| f.weight)
                .unwrap()
        };
        assert!(
            (weight_of("comedy") - 1.0).abs() < 1e-12,
            "newest normalizes to 1"
        );
        assert!(weight_of("drama") < weight_of("comedy"));
        // decay 0.5^(1_000_000 / 500_000) = 0.25
        assert!((weight_of("drama") - 0.25).abs() < 1e-12);
    }

    #[test]
    fn facets_are_sorted_and_deduplicated() {
        let a = interaction("i1", 5.0, 100, Some("funny comedy stuff"));
        let table = attrs("i1\tgenre=comedy\n");
        let p = build_profile(
            &MockBackend::new(1, 8),
            "u1",
            &[&a],
            &table,
            &ProfileOptions {
                now: 100,
                ..Default::default()
            },
        );
        // explicit genre=comedy (lexicon hits "comedy" and "funny" but they
        // deduplicate), implicit genre=comedy, temporal genre=comedy
        assert_eq!(p.facets.len(), 3);
        let sources: Vec<FacetSource> = p.facets.iter().map(|f| f.source).collect();
        let mut sorted = sources.clone();
        sorted.sort();
        assert_eq!(sources, sorted);
    }

    struct FailingBackend;
    impl Backend for FailingBackend {
        fn complete(&self, _: &CompletionRequest) -> Result<String> {
            Err(Error::Backend("down".into()))
        }
        fn embed(&self, _: &str) -> Result<crate::index::Vector> {
            Err(Error::Backend("down".into()))
        }
        fn nli_entails(&self, _: &str, _: &str) -> Result<bool> {
            Err(Error::Backend("down".into()))
        }
        fn judge_coherence(&self, _: &str, _: bool) -> Result<u8> {
            Err(Error::Backend("down".into()))
        }
    }

    #[test]
    fn backend_failure_degrades_to_behavioral_facets() {
        let a = interaction("i1", 5.0, 100, Some("loved the comedy"));
        let table = attrs("i1\tgenre=comedy\n");
        let p = build_profile(
            &FailingBackend,
            "u1",
            &[&a],
            &table,
            &ProfileOptions {
                now: 100,
                ..Default::default()
            },
        );
        assert!(p.degraded);
        assert!(p.facets.iter().all(|f| f.source != FacetSource::Explicit));
        assert!(p.facets.iter().any(|f| f.source == FacetSource::Implicit));
    }

    #[test]
    fn render_text_lists_key_value_lines() {
        let a = interaction("i1", 5.0, 100, None);
        let table = attrs("i1\tgenre=comedy\tbrand=acme\n");
        let p = build_profile(
            &MockBackend::new(1, 8),
            "u1",
            &[&a],
            &table,
            &ProfileOptions {
                now: 100,
                ..Default::default()
            },
        );
        let text = p.render_text();
        assert!(text.contains("genre=comedy"));
        assert!(text.contains("brand=acme"));
    }
}
