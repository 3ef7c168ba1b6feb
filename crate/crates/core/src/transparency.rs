//! Transparency scoring: faithfulness (entailed-claim fraction), coherence
//! (normalized judge score), personalization (clamped profile-explanation
//! cosine), and their weighted composite.

use crate::agents::{render_evidence, Explanation, ExplanationMode, ReasoningChain, UserProfile};
use crate::backend::{prompts, Backend, CompletionRequest};
use crate::error::{Error, Result};
use crate::index::{cosine, embed_text, ScoredSubgraph};
use crate::kg::KnowledgeGraph;
use crate::text::{segment_sentences, strip_tags};

/// One checkable claim extracted from an explanation.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Claim {
    pub text: String,
    pub entailed: Option<bool>,
}

/// Split an explanation into claims.
///
/// The default segmentation splits on sentence terminators outside bracketed
/// tags. With a backend, claims come from a completion and are re-validated
/// to be substrings (modulo whitespace) of the explanation; violators are
/// dropped, and backend failure falls back to the default segmentation.
pub fn extract_claims(explanation: &Explanation, backend: Option<&dyn Backend>) -> Vec<Claim> {
    let default = || {
        segment_sentences(&explanation.text)
            .into_iter()
            .map(|text| Claim {
                text,
                entailed: None,
            })
            .collect::<Vec<_>>()
    };
    let Some(backend) = backend else {
        return default();
    };
    let prompt = prompts::claims_prompt(&explanation.text);
    match backend.complete(&CompletionRequest::new(prompt, 0)) {
        Ok(reply) => {
            let squash = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
            let haystack = squash(&explanation.text);
            reply
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .filter(|l| haystack.contains(&squash(l)))
                .map(|text| Claim {
                    text: text.to_string(),
                    entailed: None,
                })
                .collect()
        }
        Err(_) => default(),
    }
}

/// Faithfulness outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Faithfulness {
    pub score: f64,
    /// Set when the explanation produced zero claims; the score is then 0.0
    /// (an explanation with no checkable claims earns no credit).
    pub no_claims: bool,
}

/// Entailed-claim fraction against a raw evidence string.
///
/// Backend failures propagate: faithfulness is never silently defaulted.
/// Each claim's `entailed` field is filled in place.
pub fn faithfulness_against_text(
    claims: &mut [Claim],
    evidence: &str,
    backend: &dyn Backend,
) -> Result<Faithfulness> {
    if claims.is_empty() {
        return Ok(Faithfulness {
            score: 0.0,
            no_claims: true,
        });
    }
    let mut entailed_count = 0usize;
    for claim in claims.iter_mut() {
        let entailed = backend
            .nli_entails(&claim.text, evidence)
            .map_err(|e| Error::Scoring(format!("faithfulness entailment failed: {e}")))?;
        claim.entailed = Some(entailed);
        if entailed {
            entailed_count += 1;
        }
    }
    Ok(Faithfulness {
        score: entailed_count as f64 / claims.len() as f64,
        no_claims: false,
    })
}

/// Entailed-claim fraction against the chain plus retained subgraphs.
pub fn faithfulness(
    claims: &mut [Claim],
    kg: &KnowledgeGraph,
    chain: &ReasoningChain,
    subgraphs: &[ScoredSubgraph],
    backend: &dyn Backend,
) -> Result<Faithfulness> {
    if claims.is_empty() {
        return Ok(Faithfulness {
            score: 0.0,
            no_claims: true,
        });
    }
    let evidence = render_evidence(kg, chain, subgraphs)?;
    faithfulness_against_text(claims, &evidence, backend)
}

/// Judge-scored coherence normalized from 1..=5 to [0, 1].
pub fn coherence(explanation: &Explanation, backend: &dyn Backend) -> Result<f64> {
    if explanation.text.trim().is_empty() {
        return Err(Error::Validation(
            "coherence requires a non-empty explanation".into(),
        ));
    }
    let detailed = explanation.mode != ExplanationMode::Concise;
    let judged = backend
        .judge_coherence(&explanation.text, detailed)
        .map_err(|e| Error::Scoring(format!("coherence judging failed: {e}")))?;
    Ok((f64::from(judged.clamp(1, 5)) - 1.0) / 4.0)
}

/// Personalization outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Personalization {
    pub score: f64,
    /// Set when the profile has no facets (score is then 0.0).
    pub empty_profile: bool,
}

/// Clamped cosine between the tag-stripped explanation embedding and the
/// rendered-profile embedding. A negatively-aligned explanation is "not
/// personalized", not anti-scored, so the similarity clamps at 0.
pub fn personalization(
    explanation: &Explanation,
    profile: &UserProfile,
    backend: &dyn Backend,
) -> Result<Personalization> {
    if profile.facets.is_empty() {
        return Ok(Personalization {
            score: 0.0,
            empty_profile: true,
        });
    }
    let text = strip_tags(&explanation.text);
    if text.trim().is_empty() {
        return Ok(Personalization {
            score: 0.0,
            empty_profile: false,
        });
    }
    let e_text = embed_text(backend, &text)
        .map_err(|e| Error::Scoring(format!("explanation embedding failed: {e}")))?;
    let e_profile = embed_text(backend, &profile.render_text())
        .map_err(|e| Error::Scoring(format!("profile embedding failed: {e}")))?;
    let sim = cosine(&e_text, &e_profile)?;
    Ok(Personalization {
        score: sim.max(0.0),
        empty_profile: false,
    })
}

/// The quantified transparency of one explanation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TransparencyScore {
    pub faithfulness: f64,
    pub coherence: f64,
    pub personalization: f64,
    pub composite: f64,
    pub weights: (f64, f64, f64),
}

impl TransparencyScore {
    /// Report line: `<item>\t<faith>\t<coher>\t<pers>\t<trans>`, 4-decimal
    /// fixed point.
    pub fn report_line(&self, item_id: &str) -> String {
        format!(
            "{item_id}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
            self.faithfulness, self.coherence, self.personalization, self.composite
        )
    }
}

/// Weighted composite of the three scores.
pub fn composite(
    faith: f64,
    coher: f64,
    pers: f64,
    weights: (f64, f64, f64),
) -> Result<TransparencyScore> {
    let (w1, w2, w3) = weights;
    if w1 < 0.0 || w2 < 0.0 || w3 < 0.0 {
        return Err(Error::Validation(
            "transparency weights must be non-negative".into(),
        ));
    }
    if (w1 + w2 + w3 - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "transparency weights must sum to 1, got {}",
            w1 + w2 + w3
        )));
    }
    for (name, value) in [
        ("faithfulness", faith),
        ("coherence", coher),
        ("personalization", pers),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Validation(format!(
                "{name} score {value} outside [0,1]"
            )));
        }
    }
    Ok(TransparencyScore {
        faithfulness: faith,
        coherence: coher,
        personalization: pers,
        composite: w1 * faith + w2 * coher + w3 * pers,
        weights,
    })
}
