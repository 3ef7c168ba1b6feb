//! Explanation Agent: turns a reasoning chain and retained evidence into a
//! grounded natural-language explanation with machine-checkable citations.

use std::collections::HashSet;
use std::fmt;

use super::chain::{render_tagged_subgraphs, ReasoningChain};
use super::profile::UserProfile;
use crate::backend::{prompts, Backend, CompletionRequest};
use crate::error::{Error, Result};
use crate::index::ScoredSubgraph;
use crate::kg::KnowledgeGraph;
use crate::text::{extract_tags, segment_sentences, strip_tags, tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExplanationMode {
    /// One-sentence justification of the primary rationale.
    Concise,
    /// Multi-sentence coverage of the reasoning aspects.
    Detailed,
    /// Contrasts the recommendation with the top alternative.
    Comparative,
}

impl fmt::Display for ExplanationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExplanationMode::Concise => write!(f, "concise"),
            ExplanationMode::Detailed => write!(f, "detailed"),
            ExplanationMode::Comparative => write!(f, "comparative"),
        }
    }
}

impl std::str::FromStr for ExplanationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "concise" => Ok(ExplanationMode::Concise),
            "detailed" => Ok(ExplanationMode::Detailed),
            "comparative" => Ok(ExplanationMode::Comparative),
            other => Err(Error::Validation(format!(
                "unknown explanation mode {other:?}"
            ))),
        }
    }
}

/// A generated explanation. `cited_evidence` is exactly the set of tag ids
/// present in `text`, in order of first appearance.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Explanation {
    pub item_id: String,
    pub mode: ExplanationMode,
    pub text: String,
    pub cited_evidence: Vec<String>,
}

impl Explanation {
    /// Construct directly from text, extracting citations. Used by the
    /// no-backend fallback path (chain rendered as the explanation).
    pub fn from_text(item_id: &str, mode: ExplanationMode, text: String) -> Self {
        let cited_evidence = extract_tags(&text);
        Explanation {
            item_id: item_id.to_string(),
            mode,
            text,
            cited_evidence,
        }
    }
}

/// Remove tags whose id is not in `allowed`, tidying leftover whitespace.
fn strip_foreign_tags(text: &str, allowed: &HashSet<String>) -> (String, Vec<String>) {
    let mut stripped = Vec::new();
    let mut out = text.to_string();
    for id in extract_tags(text) {
        if !allowed.contains(&id) {
            out = out.replace(&tag(&id), "");
            stripped.push(id);
        }
    }
    if !stripped.is_empty() {
        let mut tidy = String::with_capacity(out.len());
        let mut last_space = false;
        for ch in out.chars() {
            if ch == ' ' {
                if !last_space {
                    tidy.push(ch);
                }
                last_space = true;
            } else {
                tidy.push(ch);
                last_space = false;
            }
        }
        out = tidy.replace(" .", ".").trim().to_string();
    }
    (out, stripped)
}

/// Generate an explanation for the recommendation carried by `chain`.
///
/// The prompt carries the rendered chain, the tagged verbalized subgraphs,
/// and the profile; comparative mode additionally includes the top
/// alternative's chain with its tags stripped, so the output can only cite
/// this item's evidence. Foreign tags in the completion are stripped and
/// logged. Concise mode keeps the first sentence.
#[allow(clippy::too_many_arguments)]
pub fn generate_explanation(
    backend: &dyn Backend,
    kg: &KnowledgeGraph,
    chain: &ReasoningChain,
    subgraphs: &[ScoredSubgraph],
    profile: &UserProfile,
    mode: ExplanationMode,
    alternatives: &[&ReasoningChain],
    seed: u64,
) -> Result<Explanation> {
    if mode == ExplanationMode::Comparative && alternatives.is_empty() {
        return Err(Error::Validation(
            "comparative mode requires at least one alternative".into(),
        ));
    }
    let evidence = render_tagged_subgraphs(kg, subgraphs)?;
    let alt_text = if mode == ExplanationMode::Comparative {
        Some(strip_tags(&alternatives[0].render_text()))
    } else {
        None
    };
    let prompt = prompts::explanation_prompt(
        &chain.item_id,
        &mode.to_string(),
        &profile.render_text(),
        &chain.render_text(),
        &evidence,
        alt_text.as_deref(),
    );
    let allowed: HashSet<String> = extract_tags(&prompt).into_iter().collect();
    let raw = backend.complete(&CompletionRequest::new(prompt, seed))?;

    let (mut text, stripped) = strip_foreign_tags(&raw, &allowed);
    if !stripped.is_empty() {
        log::warn!(
            "explanation for {} cited foreign evidence {:?}; stripped",
            chain.item_id,
            stripped
        );
    }
    if mode == ExplanationMode::Concise {
        if let Some(first) = segment_sentences(&text).into_iter().next() {
            text = first;
        }
    }
    let cited_evidence = extract_tags(&text);
    Ok(Explanation {
        item_id: chain.item_id.clone(),
        mode,
        text,
        cited_evidence,
    })
}
