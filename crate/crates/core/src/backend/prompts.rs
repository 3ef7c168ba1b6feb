//! Default prompt templates for the agent roles.
//!
//! The role sentence at the head of each prompt doubles as the dispatch key
//! for the mock backend's rule table, and the section markers (`Reviews:`,
//! `Profile facets:`, `Evidence:`, `Candidates:`, `Explanation:`) are the
//! parse anchors the mock relies on. Changing a marker here requires updating
//! the mock in lockstep.

pub const USER_MODELING_ROLE: &str = "You are a User Modeling Agent.";
pub const ITEM_ANALYSIS_ROLE: &str = "You are an Item Analysis Agent.";
pub const REASONING_ROLE: &str = "You are a Reasoning Agent.";
pub const EXPLANATION_ROLE: &str = "You are an Explanation Agent.";
pub const CLAIM_EXTRACTION_ROLE: &str = "You are a Claim Extraction Agent.";
pub const COHERENCE_ROLE: &str = "You are a Coherence Judge.";

/// Extract explicit preference signals from review text.
pub fn profile_prompt(reviews: &str) -> String {
    format!(
        "{USER_MODELING_ROLE} Analyze the user's review text and extract stated \
         preference signals.\n\nReviews:\n{reviews}\n\nRespond with one `key=value` \
         preference per line."
    )
}

/// Rerank retrieved evidence subgraphs for a user.
pub fn rerank_prompt(profile: &str, query: &str, candidates: &[(String, String)]) -> String {
    let listing: String = candidates
        .iter()
        .map(|(key, summary)| format!("- {key} :: {summary}\n"))
        .collect();
    format!(
        "{ITEM_ANALYSIS_ROLE} Order the candidate evidence subgraphs from most to \
         least relevant to the user.\n\nUser profile:\n{profile}\n\nQuery: {query}\n\n\
         Candidates:\n{listing}\nRespond with the candidate keys in preferred order, \
         one per line."
    )
}

/// Predict user preference for an item from profile and retrieved evidence.
pub fn score_prompt(item_id: &str, profile: &str, evidence: &str) -> String {
    format!(
        "{REASONING_ROLE} Estimate how well the candidate item matches the user.\n\n\
         Item: {item_id}\n\nProfile facets:\n{profile}\n\nEvidence:\n{evidence}\n\n\
         Respond with `preference: <value between 0 and 1>`."
    )
}

/// Generate a grounded explanation citing `[E:<id>]` evidence tags.
pub fn explanation_prompt(
    item_id: &str,
    mode: &str,
    profile: &str,
    chain: &str,
    evidence: &str,
    alternative: Option<&str>,
) -> String {
    let alt_block = match alternative {
        Some(alt) => format!("\n\nAlternative considered:\n{alt}"),
        None => String::new(),
    };
    format!(
        "{EXPLANATION_ROLE} Write a grounded explanation for the recommendation, \
         citing the bracketed evidence tags that appear in the material below. \
         Be honest about the rationale and connect it to the user's preferences.\n\n\
         Recommended item: {item_id}\nMode: {mode}\n\nUser profile:\n{profile}\n\n\
         Reasoning chain:\n{chain}\n\nEvidence:\n{evidence}{alt_block}\n\n\
         Respond with the explanation text only."
    )
}

/// Split an explanation into atomic claims.
pub fn claims_prompt(explanation: &str) -> String {
    format!(
        "{CLAIM_EXTRACTION_ROLE} List the atomic factual claims made by the \
         explanation, one per line, reusing the exact wording.\n\n\
         Explanation:\n{explanation}\n\nRespond with the claims only."
    )
}

/// Judge explanation coherence on a 1-5 scale.
pub fn coherence_prompt(explanation: &str, detailed: bool) -> String {
    let mode = if detailed { "detailed" } else { "concise" };
    format!(
        "{COHERENCE_ROLE} Rate the logical coherence of the explanation on a 1-5 \
         scale: consistent logic, no contradictions, comprehensible ordering.\n\n\
         Mode: {mode}\n\nExplanation:\n{explanation}\n\nRespond with `score: <1-5>`."
    )
}

/// Slice the section of `prompt` between `marker` (exclusive) and the next
/// blank line (or end). Used by the mock and useful for server-side adapters.
pub fn section<'a>(prompt: &'a str, marker: &str) -> Option<&'a str> {
    let start = prompt.find(marker)? + marker.len();
    let rest = &prompt[start..];
    let rest = rest.strip_prefix('\n').unwrap_or(rest);
    match rest.find("\n\n") {
        Some(end) => Some(&rest[..end]),
        None => Some(rest),
    }
}
