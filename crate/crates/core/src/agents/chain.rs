//! Reasoning chains: ordered steps pairing a statement with the evidence ids
//! backing it. Chains are the substrate explanations are grounded in, so
//! their rendered form is shared verbatim between the explanation prompt and
//! the faithfulness evidence string.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::attributes::ItemAttributes;
use super::profile::{FacetSource, PreferenceFacet};
use crate::corpus::InteractionStore;
use crate::error::Result;
use crate::index::{verbalize_triple, ScoredSubgraph};
use crate::kg::{KnowledgeGraph, TripleId};
use crate::text::{tag, tokens};

/// Reference to a piece of evidence: a KG triple (`t<k>`) or an interaction
/// position (`h<k>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvidenceId {
    Triple(u32),
    Interaction(usize),
}

impl fmt::Display for EvidenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvidenceId::Triple(k) => write!(f, "t{k}"),
            EvidenceId::Interaction(k) => write!(f, "h{k}"),
        }
    }
}

impl serde::Serialize for EvidenceId {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl EvidenceId {
    /// Parse a bare id like `t3` or `h12`.
    pub fn parse(s: &str) -> Option<EvidenceId> {
        let (kind, num) = s.split_at(1.min(s.len()));
        match kind {
            "t" => num.parse().ok().map(EvidenceId::Triple),
            "h" => num.parse().ok().map(EvidenceId::Interaction),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Facet,
    Collaborative,
    Aggregation,
}

/// One reasoning step. Only aggregation steps may carry empty evidence.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ReasoningStep {
    pub statement: String,
    pub evidence: Vec<EvidenceId>,
    pub kind: StepKind,
}

impl ReasoningStep {
    /// Rendered line: statement, inline tags, terminal period.
    pub fn render(&self) -> String {
        if self.evidence.is_empty() {
            format!("{}.", self.statement)
        } else {
            let tags: String = self.evidence.iter().map(|e| tag(&e.to_string())).collect();
            format!("{} {tags}.", self.statement)
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ReasoningChain {
    pub item_id: String,
    pub steps: Vec<ReasoningStep>,
}

impl ReasoningChain {
    /// One rendered line per step.
    pub fn render_text(&self) -> String {
        self.steps
            .iter()
            .map(ReasoningStep::render)
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Every evidence id cited by any step, in order of first citation.
    pub fn evidence_ids(&self) -> Vec<EvidenceId> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for step in &self.steps {
            for &id in &step.evidence {
                if seen.insert(id) {
                    out.push(id);
                }
            }
        }
        out
    }

    /// Check chain soundness: triple evidence must be retained, interaction
    /// evidence must be a valid store position, and non-aggregation steps
    /// must cite something.
    pub fn validate(&self, retained: &BTreeSet<TripleId>, store_len: usize) -> Result<()> {
        for step in &self.steps {
            if step.evidence.is_empty() && step.kind != StepKind::Aggregation {
                return Err(crate::error::Error::Integrity(format!(
                    "non-aggregation step without evidence: {}",
                    step.statement
                )));
            }
            for id in &step.evidence {
                match id {
                    EvidenceId::Triple(k) => {
                        if !retained.contains(&TripleId(*k)) {
                            return Err(crate::error::Error::Integrity(format!(
                                "step cites unretained triple t{k}"
                            )));
                        }
                    }
                    EvidenceId::Interaction(k) => {
                        if *k >= store_len {
                            return Err(crate::error::Error::Integrity(format!(
                                "step cites out-of-range interaction h{k}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Triple ids retained across a set of scored subgraphs, in slice order with
/// duplicates removed.
pub fn retained_triple_ids(subgraphs: &[ScoredSubgraph]) -> Vec<TripleId> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for sg in subgraphs {
        for &t in &sg.subgraph.triples {
            if seen.insert(t) {
                out.push(t);
            }
        }
    }
    out
}

/// Verbalize retained subgraphs with one tagged line per triple:
/// `<head> <relation> <tail> [E:t<k>]`. No-evidence subgraphs render a
/// tag-free placeholder line.
pub fn render_tagged_subgraphs(
    kg: &KnowledgeGraph,
    subgraphs: &[ScoredSubgraph],
) -> Result<String> {
    let mut lines = Vec::new();
    let mut seen = HashSet::new();
    for sg in subgraphs {
        if sg.subgraph.center.is_none() && sg.subgraph.triples.is_empty() {
            lines.push("(no knowledge-graph evidence)".to_string());
            continue;
        }
        for &t in &sg.subgraph.triples {
            if seen.insert(t) {
                lines.push(format!(
                    "{} {}",
                    verbalize_triple(kg, t)?,
                    tag(&format!("t{}", t.0))
                ));
            }
        }
    }
    Ok(lines.join("\n"))
}

/// The combined evidence string for faithfulness scoring: rendered chain
/// plus tagged subgraph verbalization.
pub fn render_evidence(
    kg: &KnowledgeGraph,
    chain: &ReasoningChain,
    subgraphs: &[ScoredSubgraph],
) -> Result<String> {
    let subs = render_tagged_subgraphs(kg, subgraphs)?;
    if subs.is_empty() {
        Ok(chain.render_text())
    } else {
        Ok(format!("{}\n{}", chain.render_text(), subs))
    }
}

/// Component scores feeding the aggregation step.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComponentScores {
    pub cf: f64,
    pub cb: f64,
    pub llm: f64,
}

/// Read-only context for chain construction.
pub struct ChainContext<'a> {
    pub kg: &'a KnowledgeGraph,
    pub attrs: &'a ItemAttributes,
    pub store: &'a InteractionStore,
    pub positive_threshold: f64,
}

const MAX_EVIDENCE_PER_STEP: usize = 4;

/// Build the reasoning chain for one candidate: one step per matched facet
/// (deduplicated by key=value) citing supporting triples and contributing
/// interactions, a collaborative step citing the history interactions behind
/// the CF score, and a final aggregation step carrying the component scores
/// at 3 decimals.
#[allow(clippy::too_many_arguments)]
pub fn build_reasoning_chain(
    ctx: &ChainContext,
    item_id: &str,
    scores: &ComponentScores,
    matched: &[&PreferenceFacet],
    retained: &[TripleId],
    train_positions: &[usize],
    cf_positions: &[usize],
) -> ReasoningChain {
    let mut steps = Vec::new();
    let mut covered: HashSet<(&str, &str)> = HashSet::new();

    for facet in matched {
        if !covered.insert((facet.key.as_str(), facet.value.as_str())) {
            continue;
        }
        let facet_tokens: HashSet<String> = tokens(&facet.key)
            .into_iter()
            .chain(tokens(&facet.value))
            .collect();
        let mut evidence: Vec<EvidenceId> = Vec::new();
        for &tid in retained {
            if evidence.len() >= MAX_EVIDENCE_PER_STEP {
                break;
            }
            let triple = match ctx.kg.triple(tid) {
                Ok(t) => t,
                Err(_) => continue,
            };
            let mut triple_tokens = tokens(ctx.kg.relation_label(triple.relation));
            triple_tokens.extend(tokens(ctx.kg.entity_label(triple.tail)));
            if triple_tokens.iter().any(|t| facet_tokens.contains(t)) {
                evidence.push(EvidenceId::Triple(tid.0));
            }
        }
        let mut interactions = 0usize;
        for &pos in train_positions {
            if interactions >= MAX_EVIDENCE_PER_STEP {
                break;
            }
            let Some(it) = ctx.store.get(pos) else {
                continue;
            };
            let contributes = match facet.source {
                FacetSource::Implicit | FacetSource::Temporal => {
                    it.rating >= ctx.positive_threshold
                        && ctx
                            .attrs
                            .get(&it.item_id)
                            .iter()
                            .any(|(k, v)| k == &facet.key && v == &facet.value)
                }
                FacetSource::Explicit | FacetSource::Contextual => {
                    it.text.as_deref().is_some_and(|t| !t.trim().is_empty())
                }
            };
            if contributes {
                evidence.push(EvidenceId::Interaction(pos));
                interactions += 1;
            }
        }
        if evidence.is_empty() {
            continue; // a facet step may not stand without evidence
        }
        let source = match facet.source {
            FacetSource::Explicit => "stated",
            FacetSource::Implicit => "behavioral",
            FacetSource::Contextual => "contextual",
            FacetSource::Temporal => "recent",
        };
        steps.push(ReasoningStep {
            statement: format!(
                "{item_id} matches your {source} preference {}={}",
                facet.key, facet.value
            ),
            evidence,
            kind: StepKind::Facet,
        });
    }

    if scores.cf > 0.0 && !cf_positions.is_empty() {
        steps.push(ReasoningStep {
            statement: format!(
                "items consumed recently alongside similar users point to {item_id}"
            ),
            evidence: cf_positions
                .iter()
                .take(MAX_EVIDENCE_PER_STEP)
                .map(|&p| EvidenceId::Interaction(p))
                .collect(),
            kind: StepKind::Collaborative,
        });
    }

    steps.push(ReasoningStep {
        statement: format!(
            "component scores: collaborative={:.3} content={:.3} model={:.3}",
            scores.cf, scores.cb, scores.llm
        ),
        evidence: Vec::new(),
        kind: StepKind::Aggregation,
    });

    ReasoningChain {
        item_id: item_id.to_string(),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_interactions, IngestOptions};
    use crate::kg::parse_triples;

    fn ctx_fixtures() -> (KnowledgeGraph, ItemAttributes, InteractionStore) {
        let kg = parse_triples("i1\thas_genre\tcomedy\ni1\thas_theme\tspace\n", "t").unwrap();
        let attrs = ItemAttributes::parse("i1\tgenre=comedy\nh1\tgenre=comedy\n", "t").unwrap();
        let store = parse_interactions(
            "u1\th1\t5.0\t100\tloved the comedy\nu1\th2\t4.0\t200\n",
            "t",
            IngestOptions::default(),
        )
        .unwrap();
        (kg, attrs, store)
    }

    fn facet(key: &str, value: &str, source: FacetSource) -> PreferenceFacet {
        PreferenceFacet {
            key: key.into(),
            value: value.into(),
            weight: 1.0,
            source,
        }
    }

    #[test]
    fn facet_step_cites_matching_triple_first() {
        let (kg, attrs, store) = ctx_fixtures();
        let ctx = ChainContext {
            kg: &kg,
            attrs: &attrs,
            store: &store,
            positive_threshold: 4.0,
        };
        let f = facet("genre", "comedy", FacetSource::Implicit);
        let chain = build_reasoning_chain(
            &ctx,
            "i1",
            &ComponentScores {
                cf: 0.0,
                cb: 1.0,
                llm: 0.5,
            },
            &[&f],
            &[TripleId(0), TripleId(1)],
            &[0, 1],
            &[],
        );
        assert_eq!(chain.steps.len(), 2); // facet + aggregation
        assert_eq!(chain.steps[0].kind, StepKind::Facet);
        assert_eq!(chain.steps[0].evidence[0], EvidenceId::Triple(0));
        // h1 carries genre=comedy positively, so it contributes too
        assert!(chain.steps[0]
            .evidence
            .contains(&EvidenceId::Interaction(0)));
    }

    #[test]
    fn chain_without_facets_keeps_collaborative_and_aggregation() {
        let (kg, attrs, store) = ctx_fixtures();
        let ctx = ChainContext {
            kg: &kg,
            attrs: &attrs,
            store: &store,
            positive_threshold: 4.0,
        };
        let chain = build_reasoning_chain(
            &ctx,
            "i1",
            &ComponentScores {
                cf: 0.4,
                cb: 0.0,
                llm: 0.5,
            },
            &[],
            &[],
            &[0, 1],
            &[0, 1],
        );
        let kinds: Vec<StepKind> = chain.steps.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![StepKind::Collaborative, StepKind::Aggregation]);
        assert_eq!(
            chain.steps[0].evidence,
            vec![EvidenceId::Interaction(0), EvidenceId::Interaction(1)]
        );
    }

    #[test]
    fn aggregation_statement_renders_three_decimals() {
        let (kg, attrs, store) = ctx_fixtures();
        let ctx = ChainContext {
            kg: &kg,
            attrs: &attrs,
            store: &store,
            positive_threshold: 4.0,
        };
        let chain = build_reasoning_chain(
            &ctx,
            "i1",
            &ComponentScores {
                cf: 0.5,
                cb: 0.75,
                llm: 0.82,
            },
            &[],
            &[],
            &[],
            &[],
        );
        let agg = chain.steps.last().unwrap();
        assert!(agg.statement.contains("0.500"));
        assert!(agg.statement.contains("0.750"));
        assert!(agg.statement.contains("0.820"));
        assert!(agg.evidence.is_empty());
    }

    #[test]
    fn rendering_keeps_tags_inside_the_sentence() {
        let step = ReasoningStep {
            statement: "x matches genre=comedy".into(),
            evidence: vec![EvidenceId::Triple(4), EvidenceId::Interaction(2)],
            kind: StepKind::Facet,
        };
        assert_eq!(step.render(), "x matches genre=comedy [E:t4][E:h2].");
        // a rendered step is exactly one sentence for the claim segmenter
        assert_eq!(crate::text::segment_sentences(&step.render()).len(), 1);
    }

    #[test]
    fn aggregation_render_survives_claim_segmentation() {
        let step = ReasoningStep {
            statement: "component scores: collaborative=0.300 content=0.750 model=0.820".into(),
            evidence: vec![],
            kind: StepKind::Aggregation,
        };
        assert_eq!(crate::text::segment_sentences(&step.render()).len(), 1);
    }

    #[test]
    fn validation_flags_unretained_and_out_of_range_evidence() {
        let chain = ReasoningChain {
            item_id: "i1".into(),
            steps: vec![ReasoningStep {
                statement: "s".into(),
                evidence: vec![EvidenceId::Triple(9)],
                kind: StepKind::Facet,
            }],
        };
        let retained: BTreeSet<TripleId> = [TripleId(1)].into_iter().collect();
        assert!(chain.validate(&retained, 10).is_err());

        let ok: BTreeSet<TripleId> = [TripleId(9)].into_iter().collect();
        assert!(chain.validate(&ok, 10).is_ok());

        let bad_pos = ReasoningChain {
            item_id: "i1".into(),
            steps: vec![ReasoningStep {
                statement: "s".into(),
                evidence: vec![EvidenceId::Interaction(99)],
                kind: StepKind::Collaborative,
            }],
        };
        assert!(bad_pos.validate(&ok, 10).is_err());
    }

    #[test]
    fn evidence_id_round_trips_through_display() {
        for id in [EvidenceId::Triple(17), EvidenceId::Interaction(3)] {
            assert_eq!(EvidenceId::parse(&id.to_string()), Some(id));
        }
        assert_eq!(EvidenceId::parse("x9"), None);
        assert_eq!(EvidenceId::parse(""), None);
    }
}
