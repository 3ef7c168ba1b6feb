//! Deterministic mock backend.
//!
//! Every operation is a pure function of its arguments plus the configured
//! seed, so a full pipeline run with the mock is byte-reproducible. The
//! completion rule table:
//!
//! - profile prompts: a keyword lexicon maps review phrases to `key=value`
//!   facet lines;
//! - explanation prompts: a template filler emits sentences citing exactly
//!   the `[E:<id>]` tags present in the prompt;
//! - rerank prompts: candidates are echoed in their given order (stable
//!   order by similarity then key);
//! - scoring prompts: preference = 0.8 * (facet-token overlap with the
//!   evidence section) + 0.2 * seeded hash jitter, so the prediction actually
//!   depends on retrieved knowledge;
//! - claim prompts: the embedded explanation split by the sentence rule;
//! - coherence prompts: the rubric score (start at 5; -1 for a verbatim
//!   repeated sentence; -1 if a detailed explanation has fewer than two
//!   sentences; -1 if any sentence lacks a terminal period; floor 1).

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::{prompts, Backend, CompletionRequest};
use crate::error::Result;
use crate::index::Vector;
use crate::text::{
    extract_tags, fnv1a64, mix64, segment_sentences, stable_hash, strip_tags, tokens, unit_f64,
};

/// Keyword lexicon for profile extraction: (phrase, facet key, facet value).
/// Phrases are matched case-folded at word boundaries.
pub const FACET_LEXICON: &[(&str, &str, &str)] = &[
    ("sci-fi", "genre", "sci-fi"),
    ("science fiction", "genre", "sci-fi"),
    ("comedy", "genre", "comedy"),
    ("funny", "genre", "comedy"),
    ("drama", "genre", "drama"),
    ("horror", "genre", "horror"),
    ("scary", "genre", "horror"),
    ("action", "genre", "action"),
    ("romance", "genre", "romance"),
    ("romantic", "genre", "romance"),
    ("thriller", "genre", "thriller"),
    ("documentary", "genre", "documentary"),
    ("fantasy", "genre", "fantasy"),
    ("animation", "genre", "animation"),
    ("animated", "genre", "animation"),
    ("space", "theme", "space"),
    ("magic", "theme", "magic"),
    ("sports", "theme", "sports"),
    ("crime", "theme", "crime"),
    ("travel", "theme", "travel"),
    ("cooking", "theme", "cooking"),
    ("music", "theme", "music"),
    ("nature", "theme", "nature"),
    ("history", "theme", "history"),
    ("robots", "theme", "robots"),
    ("cheap", "price", "low"),
    ("affordable", "price", "low"),
    ("bargain", "price", "low"),
    ("expensive", "price", "high"),
    ("premium", "price", "high"),
    ("overpriced", "price", "high"),
];

/// Seeded, rule-based backend for offline runs and tests.
#[derive(Debug, Clone)]
pub struct MockBackend {
    seed: u64,
    dim: usize,
}

impl MockBackend {
    pub fn new(seed: u64, dim: usize) -> Self {
        MockBackend {
            seed,
            dim: dim.max(1),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn profile_reply(prompt: &str) -> String {
        let reviews = prompts::section(prompt, "Reviews:").unwrap_or("");
        let folded = reviews.to_lowercase();
        let mut lines = Vec::new();
        let mut seen = HashSet::new();
        for (phrase, key, value) in FACET_LEXICON {
            if crate::text::contains_word(&folded, phrase) {
                let line = format!("{key}={value}");
                if seen.insert(line.clone()) {
                    lines.push(line);
                }
            }
        }
        lines.join("\n")
    }

    fn rerank_reply(prompt: &str) -> String {
        let listing = prompts::section(prompt, "Candidates:").unwrap_or("");
        listing
            .lines()
            .filter_map(|line| line.strip_prefix("- "))
            .map(|entry| entry.split(" :: ").next().unwrap_or(entry).trim())
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn score_reply(&self, req: &CompletionRequest) -> String {
        let profile = prompts::section(&req.prompt, "Profile facets:").unwrap_or("");
        let evidence = prompts::section(&req.prompt, "Evidence:").unwrap_or("");
        let facet_tokens: HashSet<String> = profile
            .lines()
            .filter_map(|line| line.split_once('='))
            .flat_map(|(_, value)| tokens(value))
            .collect();
        let evidence_tokens: HashSet<String> = tokens(evidence).into_iter().collect();
        let overlap = if facet_tokens.is_empty() {
            0.0
        } else {
            facet_tokens.intersection(&evidence_tokens).count() as f64 / facet_tokens.len() as f64
        };
        let jitter = unit_f64(stable_hash(req.seed, &[&req.prompt]));
        format!("preference: {:.4}", 0.8 * overlap + 0.2 * jitter)
    }

    fn explanation_reply(req: &CompletionRequest) -> String {
        let tags = extract_tags(&req.prompt);
        if tags.is_empty() {
            return "This item is a reasonable match for your recent activity.".to_string();
        }
        let context_of = |id: &str| -> String {
            let needle = crate::text::tag(id);
            let line = req
                .prompt
                .lines()
                .find(|line| line.contains(&needle))
                .unwrap_or("");
            let stripped = strip_tags(line);
            // keep only the first sentence: a citing sentence must not embed
            // further terminators or the claim segmentation would cut it
            let first = segment_sentences(&stripped)
                .into_iter()
                .next()
                .unwrap_or_default();
            let ctx = first
                .trim_start_matches("- ")
                .trim_end_matches(['.', ';', ' '])
                .trim()
                .to_string();
            if ctx.is_empty() {
                "the cited evidence".to_string()
            } else {
                ctx
            }
        };
        let mut sentences = Vec::new();
        for (i, id) in tags.iter().take(4).enumerate() {
            let ctx = context_of(id);
            let t = crate::text::tag(id);
            let sentence = match i % 3 {
                0 => format!("This pick is supported by {ctx} {t}."),
                1 => format!("Your preferences align with {ctx} {t}."),
                _ => format!("Additional support comes from {ctx} {t}."),
            };
            sentences.push(sentence);
        }
        sentences.push(format!(
            "Overall, the cited evidence makes this a strong match {}.",
            crate::text::tag(&tags[0])
        ));
        // honor the character budget at sentence granularity, keeping at
        // least one sentence so the reply is never empty
        let mut out = String::new();
        for s in &sentences {
            if !out.is_empty() && out.len() + s.len() + 1 > req.max_length {
                break;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(s);
        }
        out
    }

    fn claims_reply(prompt: &str) -> String {
        let explanation = prompts::section(prompt, "Explanation:").unwrap_or("");
        segment_sentences(explanation).join("\n")
    }

    fn coherence_reply(prompt: &str) -> String {
        let explanation = prompts::section(prompt, "Explanation:").unwrap_or("");
        let detailed = prompts::section(prompt, "Mode:")
            .map(|m| m.trim() == "detailed")
            .unwrap_or(false);
        format!("score: {}", coherence_rubric(explanation, detailed))
    }
}

/// The mock coherence rubric.
pub fn coherence_rubric(text: &str, detailed: bool) -> u8 {
    let sentences = segment_sentences(text);
    let mut score: i32 = 5;
    let mut seen = HashSet::new();
    if sentences.iter().any(|s| !seen.insert(s.trim())) {
        score -= 1;
    }
    if detailed && sentences.len() < 2 {
        score -= 1;
    }
    if sentences.iter().any(|s| !s.trim_end().ends_with('.')) {
        score -= 1;
    }
    score.max(1) as u8
}

impl Backend for MockBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        req.validate()?;
        let p = &req.prompt;
        let reply = if p.starts_with(prompts::USER_MODELING_ROLE) {
            Self::profile_reply(p)
        } else if p.starts_with(prompts::ITEM_ANALYSIS_ROLE) {
            Self::rerank_reply(p)
        } else if p.starts_with(prompts::REASONING_ROLE) {
            self.score_reply(req)
        } else if p.starts_with(prompts::EXPLANATION_ROLE) {
            Self::explanation_reply(req)
        } else if p.starts_with(prompts::CLAIM_EXTRACTION_ROLE) {
            Self::claims_reply(p)
        } else if p.starts_with(prompts::COHERENCE_ROLE) {
            Self::coherence_reply(p)
        } else {
            format!("mock:{:016x}", stable_hash(req.seed, &[p]))
        };
        Ok(reply)
    }

    fn embed(&self, text: &str) -> Result<Vector> {
        let mut seed_bytes = [0u8; 32];
        let mut state = self.seed ^ fnv1a64(text.as_bytes());
        for chunk in seed_bytes.chunks_mut(8) {
            state = mix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha20Rng::from_seed(seed_bytes);
        let mut comps: Vec<f64> = (0..self.dim)
            .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
            .collect();
        let norm = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            comps[0] = 1.0;
        } else {
            for c in &mut comps {
                *c /= norm;
            }
        }
        Vector::new(comps)
    }

    fn nli_entails(&self, claim: &str, evidence: &str) -> Result<bool> {
        let claim_tags = extract_tags(claim);
        if claim_tags.is_empty() {
            return Ok(false);
        }
        let evidence_tags: HashSet<String> = extract_tags(evidence).into_iter().collect();
        Ok(claim_tags.iter().all(|t| evidence_tags.contains(t)))
    }

    fn judge_coherence(&self, explanation: &str, detailed: bool) -> Result<u8> {
        Ok(coherence_rubric(explanation, detailed))
    }
}
