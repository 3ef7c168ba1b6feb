//! Shared text utilities: label normalization, tokenization, sentence
//! segmentation, evidence-tag handling, and stable hashing.
//!
//! Evidence tags use the syntax `[E:<id>]` where `<id>` is `t<k>` for a
//! knowledge-graph triple or `h<k>` for an interaction-history reference.
//! The tag is the machine-checkable citation currency for faithfulness
//! scoring, so every function here treats a tag as an atomic token.

/// Normalize an entity/item label: case-fold, trim, collapse internal
/// whitespace, strip punctuation.
pub fn normalize_label(s: &str) -> String {
    let lowered = s.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    let mut pending_space = false;
    for ch in lowered.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
        } else if ch.is_alphanumeric() {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(ch);
        }
        // punctuation and symbols are dropped
    }
    out
}

/// Case-folded alphanumeric tokens of `s`.
pub fn tokens(s: &str) -> Vec<String> {
    s.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_string())
        .collect()
}

/// Whether `haystack` contains `phrase` bounded by non-alphanumeric characters
/// on both sides. Both inputs are compared case-folded.
pub fn contains_word(haystack: &str, phrase: &str) -> bool {
    let hay = haystack.to_lowercase();
    let needle = phrase.to_lowercase();
    if needle.is_empty() {
        return false;
    }
    let mut start = 0;
    while let Some(idx) = hay[start..].find(&needle) {
        let at = start + idx;
        let before_ok = hay[..at]
            .chars()
            .next_back()
            .is_none_or(|c| !c.is_alphanumeric());
        let after_ok = hay[at + needle.len()..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
        if before_ok && after_ok {
            return true;
        }
        start = at + needle.len();
    }
    false
}

/// Split text into sentences on `.`, `!`, `?`.
///
/// Terminators inside bracketed tags do not split, and a `.` between two
/// digits is treated as a decimal point (reasoning-chain aggregation
/// statements carry 3-decimal scores). Each returned sentence keeps its
/// terminator and is trimmed; empty segments are dropped.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut current = String::new();
    let mut bracket_depth = 0usize;
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '[' => bracket_depth += 1,
            ']' => bracket_depth = bracket_depth.saturating_sub(1),
            _ => {}
        }
        current.push(ch);
        let is_terminator = matches!(ch, '.' | '!' | '?');
        if is_terminator && bracket_depth == 0 {
            let decimal = ch == '.'
                && i > 0
                && chars[i - 1].is_ascii_digit()
                && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit());
            if !decimal {
                let trimmed = current.trim();
                if !trimmed.is_empty() {
                    sentences.push(trimmed.to_string());
                }
                current.clear();
            }
        }
    }
    let trimmed = current.trim();
    if !trimmed.is_empty() {
        sentences.push(trimmed.to_string());
    }
    sentences
}

/// Evidence ids cited in `text` via `[E:<id>]` tags, deduplicated in order of
/// first appearance. Returns the bare ids (e.g. `t3`, `h12`).
pub fn extract_tags(text: &str) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find("[E:") {
        let after = &rest[start + 3..];
        match after.find(']') {
            Some(end) => {
                let id = after[..end].trim();
                if !id.is_empty() && seen.insert(id.to_string()) {
                    out.push(id.to_string());
                }
                rest = &after[end + 1..];
            }
            None => break,
        }
    }
    out
}

/// Render an evidence id as its inline tag.
pub fn tag(id: &str) -> String {
    format!("[E:{id}]")
}

/// Remove every `[E:...]` tag from `text`, collapsing the whitespace the tags
/// leave behind.
pub fn strip_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("[E:") {
        out.push_str(&rest[..start]);
        match rest[start..].find(']') {
            Some(end) => rest = &rest[start + end + 1..],
            None => {
                rest = "";
                break;
            }
        }
    }
    out.push_str(rest);
    // collapse "a  b" runs introduced by tag removal
    let mut collapsed = String::with_capacity(out.len());
    let mut last_space = false;
    for ch in out.chars() {
        if ch == ' ' {
            if !last_space {
                collapsed.push(ch);
            }
            last_space = true;
        } else {
            collapsed.push(ch);
            last_space = false;
        }
    }
    collapsed.replace(" .", ".").trim().to_string()
}

/// FNV-1a 64-bit hash. Stable across processes and platforms.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// splitmix64 step, used to expand hash values into seed material.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a seed plus string parts.
pub fn stable_hash(seed: u64, parts: &[&str]) -> u64 {
    let mut h = mix64(seed);
    for p in parts {
        h = mix64(h ^ fnv1a64(p.as_bytes()));
    }
    h
}

/// Map a 64-bit hash to the unit interval [0, 1).
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_folds_trims_and_strips() {
        assert_eq!(normalize_label("  The Matrix  "), "the matrix");
        assert_eq!(normalize_label("Sci-Fi!"), "scifi");
        assert_eq!(normalize_label("a   b\tc"), "a b c");
        assert_eq!(normalize_label(""), "");
    }

    #[test]
    fn tokens_split_on_non_alphanumeric() {
        assert_eq!(tokens("Sci-Fi plot"), vec!["sci", "fi", "plot"]);
        assert!(tokens("--").is_empty());
    }

    #[test]
    fn word_boundaries_respected() {
        assert!(contains_word("loved the sci-fi plot", "sci-fi"));
        assert!(contains_word("Loved the COMEDY.", "comedy"));
        assert!(!contains_word("scifiction", "sci"));
        assert!(!contains_word("", "x"));
    }

    #[test]
    fn sentences_split_on_terminators() {
        assert_eq!(segment_sentences("A. B!"), vec!["A.", "B!"]);
        assert!(segment_sentences("").is_empty());
        assert_eq!(
            segment_sentences("Rated [E:t1]. Great."),
            vec!["Rated [E:t1].", "Great."]
        );
    }

    #[test]
    fn sentences_keep_decimals_together() {
        assert_eq!(
            segment_sentences("Scores cf=0.300 cb=0.750."),
            vec!["Scores cf=0.300 cb=0.750."]
        );
    }

    #[test]
    fn trailing_text_without_terminator_is_a_sentence() {
        assert_eq!(segment_sentences("One. and more"), vec!["One.", "and more"]);
    }

    #[test]
    fn tags_extract_in_order_without_duplicates() {
        assert_eq!(extract_tags("x [E:t1] y [E:h2] z [E:t1]"), vec!["t1", "h2"]);
        assert!(extract_tags("no tags").is_empty());
        assert!(extract_tags("[E:").is_empty());
    }

    #[test]
    fn strip_removes_tags_and_tidies_spaces() {
        assert_eq!(strip_tags("good match [E:t1]."), "good match.");
        assert_eq!(strip_tags("[E:t1] leading"), "leading");
        assert_eq!(strip_tags("plain"), "plain");
    }

    #[test]
    fn hashing_is_stable() {
        // frozen value guards against accidental algorithm changes, which
        // would silently break cross-process reproducibility
        assert_eq!(fnv1a64(b"matrag"), 0x694c_fb5b_d1c1_9049);
        assert_eq!(stable_hash(7, &["a", "b"]), stable_hash(7, &["a", "b"]));
        assert_ne!(stable_hash(7, &["a", "b"]), stable_hash(8, &["a", "b"]));
        assert_ne!(stable_hash(7, &["a", "b"]), stable_hash(7, &["ab"]));
        let u = unit_f64(stable_hash(1, &["x"]));
        assert!((0.0..1.0).contains(&u));
    }
}
