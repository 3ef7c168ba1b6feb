//! Sentence BLEU-4: modified n-gram precision with clipping over 1-4 grams at
//! uniform weights, multiplied by the brevity penalty `exp(1 - r/c)` for
//! candidates shorter than the closest reference.
//!
//! No smoothing: a zero n-gram precision zeroes the score. This matters on
//! short texts, where smoothed and unsmoothed BLEU differ materially.
//! Tokenization is case-fold + whitespace split after stripping evidence
//! tags.

use std::collections::HashMap;

use crate::text::strip_tags;

fn tokenize(text: &str) -> Vec<String> {
    strip_tags(text)
        .to_lowercase()
        .split_whitespace()
        .map(String::from)
        .collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts: HashMap<&[String], usize> = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU-4 of a candidate against one or more references. Empty candidates,
/// empty reference lists, and candidates shorter than 4 tokens score 0.0.
pub fn bleu4(candidate: &str, references: &[&str]) -> f64 {
    let cand = tokenize(candidate);
    if cand.is_empty() || references.is_empty() {
        return 0.0;
    }
    let refs: Vec<Vec<String>> = references.iter().map(|r| tokenize(r)).collect();

    let mut log_precision_sum = 0.0;
    for n in 1..=4 {
        let cand_counts = ngram_counts(&cand, n);
        let total: usize = cand_counts.values().sum();
        if total == 0 {
            return 0.0; // candidate too short for an n-gram at this order
        }
        let mut clipped = 0usize;
        for (gram, &count) in &cand_counts {
            let max_ref = refs
                .iter()
                .map(|r| ngram_counts(r, n).get(gram).copied().unwrap_or(0))
                .max()
                .unwrap_or(0);
            clipped += count.min(max_ref);
        }
        if clipped == 0 {
            return 0.0; // unsmoothed: zero precision zeroes the score
        }
        log_precision_sum += (clipped as f64 / total as f64).ln();
    }

    let c = cand.len() as f64;
    // effective reference length: closest to c, ties to the shorter
    let r = refs
        .iter()
        .map(|r| r.len())
        .min_by(|&a, &b| {
            let da = (a as f64 - c).abs();
            let db = (b as f64 - c).abs();
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        })
        .unwrap_or(0) as f64;
    let brevity_penalty = if c < r { (1.0 - r / c).exp() } else { 1.0 };

    brevity_penalty * (0.25 * log_precision_sum).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_candidate_scores_one() {
        assert_eq!(
            bleu4("the cat sat on the mat", &["the cat sat on the mat"]),
            1.0
        );
        // case-fold applies before matching
        assert_eq!(
            bleu4("The Cat Sat On The Mat", &["the cat sat on the mat"]),
            1.0
        );
    }

    #[test]
    fn disjoint_candidate_scores_zero() {
        assert_eq!(
            bleu4("alpha beta gamma delta", &["one two three four"]),
            0.0
        );
    }

    #[test]
    fn degenerate_inputs_score_zero() {
        assert_eq!(bleu4("", &["a reference here now"]), 0.0);
        assert_eq!(bleu4("a candidate", &[]), 0.0);
        // shorter than 4 tokens cannot form a 4-gram
        assert_eq!(bleu4("just three words", &["just three words"]), 0.0);
    }

    #[test]
    fn worksheet_case_without_brevity_penalty() {
        // by-hand worksheet, cand "the cat sat on the mat" vs
        // ref "the cat sat on a mat":
        //   p1 = 5/6, p2 = 3/5, p3 = 2/4, p4 = 1/3, BP = 1 (c = r = 6)
        //   BLEU = (5/6 * 3/5 * 1/2 * 1/3)^(1/4) = (1/12)^(1/4)
        let got = bleu4("the cat sat on the mat", &["the cat sat on a mat"]);
        assert!((got - 0.537284965911771).abs() < 1e-6, "got {got}");
    }

    #[test]
    fn worksheet_case_with_brevity_penalty() {
        // cand "the cat sat on the" (c=5) vs ref "the cat sat on a mat" (r=6):
        //   p1 = 4/5, p2 = 3/4, p3 = 2/3, p4 = 1/2, BP = exp(1 - 6/5)
        let got = bleu4("the cat sat on the", &["the cat sat on a mat"]);
        assert!((got - 0.5475182535069453).abs() < 1e-6, "got {got}");
    }

    #[test]
    fn evidence_tags_are_stripped_before_matching() {
        let got = bleu4(
            "the cat [E:t1] sat on the mat [E:h2]",
            &["the cat sat on the mat"],
        );
        assert_eq!(got, 1.0);
    }

    #[test]
    fn multiple_references_clip_per_gram() {
        // the best match per n-gram may come from different references
        let got = bleu4(
            "the cat sat on the mat",
            &["the cat sat quietly today", "a dog sat on the mat"],
        );
        assert!(got > 0.0 && got < 1.0, "got {got}");
    }

    proptest! {
        /// For candidates of >= 4 tokens, BLEU is 1.0 iff the token sequence
        /// equals some reference token sequence of the same length.
        #[test]
        fn perfect_score_iff_exact_token_match(
            tokens in proptest::collection::vec("[a-d]{1,3}", 4..9),
            others in proptest::collection::vec("[a-d]{1,3}", 4..9),
        ) {
            let cand = tokens.join(" ");
            let same = bleu4(&cand, &[cand.as_str()]);
            prop_assert_eq!(same, 1.0);

            let other = others.join(" ");
            let score = bleu4(&cand, &[other.as_str()]);
            if tokens == others {
                prop_assert_eq!(score, 1.0);
            } else {
                prop_assert!(score < 1.0);
            }
        }

        #[test]
        fn bleu_stays_in_unit_interval(
            a in "[a-e ]{0,40}",
            b in "[a-e ]{1,40}",
        ) {
            let s = bleu4(&a, &[b.as_str()]);
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
