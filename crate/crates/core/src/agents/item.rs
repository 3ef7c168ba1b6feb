//! Item Analysis Agent: links an item to the knowledge graph, slices its
//! k-hop neighborhood into per-relation evidence subgraphs, retrieves the
//! top-K slices by cosine against the query (or profile) embedding, and
//! reranks them through the backend.

use std::collections::BTreeMap;

use super::profile::UserProfile;
use crate::backend::{prompts, Backend, CompletionRequest};
use crate::error::{Error, Result};
use crate::index::{embed_subgraph, embed_text, top_k, ScoredSubgraph, Vector, VectorIndex};
use crate::kg::{filter_relations, link_entity, AliasTable, KnowledgeGraph, Subgraph};

/// Read-only context for item analysis.
pub struct ItemAnalysisContext<'a> {
    pub backend: &'a dyn Backend,
    pub kg: &'a KnowledgeGraph,
    pub aliases: Option<&'a AliasTable>,
    /// Precomputed slice vectors keyed `<entity label>|<relation label>`.
    pub precomputed: Option<&'a VectorIndex>,
    /// Retrieval depth K (candidates kept by dense retrieval).
    pub retrieval_k: usize,
    /// Rerank depth N (candidates kept after the backend rerank).
    pub rerank_n: usize,
    pub k_hop: u32,
    pub max_triples: usize,
    pub seed: u64,
}

/// Evidence gathered for one candidate item. Failures degrade (recorded in
/// `degraded`) rather than abort.
#[derive(Debug, Clone)]
pub struct ItemEvidence {
    pub item_id: String,
    pub subgraphs: Vec<ScoredSubgraph>,
    pub linked: bool,
    pub degraded: Vec<String>,
}

impl ItemEvidence {
    fn no_evidence(item_id: &str, degraded: Vec<String>) -> Self {
        ItemEvidence {
            item_id: item_id.to_string(),
            subgraphs: vec![ScoredSubgraph {
                subgraph: Subgraph::no_evidence(),
                similarity: 0.0,
                retrieval_rank: 1,
                rerank_rank: Some(1),
            }],
            linked: false,
            degraded,
        }
    }
}

/// Build the precomputed-vector key for one slice. The key carries a
/// fingerprint of the slice's triple ids, so a profile-filtered slice that
/// differs from the precomputed one misses the cache instead of picking up a
/// stale vector.
pub fn slice_vector_key(
    entity_label: &str,
    relation_label: &str,
    triples: &[crate::kg::TripleId],
) -> String {
    let mut bytes = Vec::with_capacity(triples.len() * 4);
    for t in triples {
        bytes.extend_from_slice(&t.0.to_le_bytes());
    }
    format!(
        "{entity_label}|{relation_label}|{:016x}",
        crate::text::fnv1a64(&bytes)
    )
}

fn ranks_without_retrieval(slices: Vec<(String, Subgraph)>, n: usize) -> Vec<ScoredSubgraph> {
    slices
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(i, (_, subgraph))| ScoredSubgraph {
            subgraph,
            similarity: 0.0,
            retrieval_rank: i + 1,
            rerank_rank: Some(i + 1),
        })
        .collect()
}

/// Analyze one item: link, slice, retrieve, rerank.
///
/// An unlinkable (or ambiguous) item yields a single no-evidence subgraph at
/// similarity 0. An empty query with a zero-facet profile skips retrieval and
/// keeps slices in ascending-key order at similarity 0. Backend and index
/// failures fall back the same way, with a note in `degraded`.
pub fn analyze_item(
    ctx: &ItemAnalysisContext,
    item_id: &str,
    profile: &UserProfile,
    query: Option<&str>,
) -> Result<ItemEvidence> {
    if ctx.rerank_n < 1 || ctx.retrieval_k < ctx.rerank_n {
        return Err(Error::Validation(format!(
            "retrieval K ({}) must be >= rerank N ({}) >= 1",
            ctx.retrieval_k, ctx.rerank_n
        )));
    }
    let mut degraded = Vec::new();

    let entity = match link_entity(ctx.kg, item_id, ctx.aliases) {
        Ok(Some(e)) => e,
        Ok(None) => return Ok(ItemEvidence::no_evidence(item_id, degraded)),
        Err(e) => {
            degraded.push(format!("entity linking: {e}"));
            return Ok(ItemEvidence::no_evidence(item_id, degraded));
        }
    };

    let neighborhood = crate::kg::extract_k_hop(ctx.kg, entity, ctx.k_hop, ctx.max_triples)?;
    let filtered = filter_relations(ctx.kg, &neighborhood, profile, None).subgraph;

    // per-relation slices, keyed by relation label (unique per slice)
    let mut by_relation: BTreeMap<String, Vec<crate::kg::TripleId>> = BTreeMap::new();
    for &tid in &filtered.triples {
        let triple = ctx.kg.triple(tid)?;
        by_relation
            .entry(ctx.kg.relation_label(triple.relation).to_string())
            .or_default()
            .push(tid);
    }
    let slices: Vec<(String, Subgraph)> = by_relation
        .into_iter()
        .map(|(label, triples)| {
            (
                label,
                Subgraph {
                    center: Some(entity),
                    radius: ctx.k_hop,
                    triples,
                    truncated: filtered.truncated,
                },
            )
        })
        .collect();

    if slices.is_empty() {
        // linked entity with no triples: a single empty subgraph centered on it
        return Ok(ItemEvidence {
            item_id: item_id.to_string(),
            subgraphs: vec![ScoredSubgraph {
                subgraph: Subgraph {
                    center: Some(entity),
                    radius: ctx.k_hop,
                    triples: Vec::new(),
                    truncated: false,
                },
                similarity: 0.0,
                retrieval_rank: 1,
                rerank_rank: Some(1),
            }],
            linked: true,
            degraded,
        });
    }

    let profile_text = profile.render_text();
    let query_text = query.unwrap_or(&profile_text);
    if query_text.trim().is_empty() {
        return Ok(ItemEvidence {
            item_id: item_id.to_string(),
            subgraphs: ranks_without_retrieval(slices, ctx.rerank_n),
            linked: true,
            degraded,
        });
    }

    // dense retrieval over slice embeddings
    let entity_label = ctx.kg.entity_label(entity).to_string();
    let retrieval = (|| -> Result<Vec<ScoredSubgraph>> {
        let query_vec = embed_text(ctx.backend, query_text)?;
        let mut index = VectorIndex::new();
        for (label, sub) in &slices {
            let key = slice_vector_key(&entity_label, label, &sub.triples);
            let vector: Vector = match ctx.precomputed.and_then(|idx| idx.get(&key)) {
                Some(v) => v.clone(),
                None => embed_subgraph(ctx.backend, ctx.kg, sub)?,
            };
            index.insert(label.clone(), vector)?;
        }
        let ranked = top_k(&index, &query_vec, ctx.retrieval_k)?;
        let lookup: BTreeMap<&str, &Subgraph> =
            slices.iter().map(|(l, s)| (l.as_str(), s)).collect();
        Ok(ranked
            .into_iter()
            .enumerate()
            .map(|(i, (key, similarity))| ScoredSubgraph {
                subgraph: (*lookup.get(key.as_str()).expect("ranked key exists")).clone(),
                similarity,
                retrieval_rank: i + 1,
                rerank_rank: None,
            })
            .collect())
    })();

    let mut retrieved = match retrieval {
        Ok(r) => r,
        Err(e) => {
            degraded.push(format!("retrieval: {e}"));
            return Ok(ItemEvidence {
                item_id: item_id.to_string(),
                subgraphs: ranks_without_retrieval(slices, ctx.rerank_n),
                linked: true,
                degraded,
            });
        }
    };

    // backend rerank to top-N; the mock echoes retrieval order (stable order
    // by similarity then key)
    if retrieved.len() > 1 {
        let relation_of = |sg: &ScoredSubgraph| -> Result<String> {
            let first = sg.subgraph.triples.first().expect("non-empty slice");
            let triple = ctx.kg.triple(*first)?;
            Ok(ctx.kg.relation_label(triple.relation).to_string())
        };
        let mut candidates = Vec::new();
        for sg in &retrieved {
            candidates.push((
                relation_of(sg)?,
                crate::index::verbalize_subgraph(ctx.kg, &sg.subgraph)?,
            ));
        }
        let prompt = prompts::rerank_prompt(&profile_text, query.unwrap_or("(none)"), &candidates);
        let permutation: Option<Vec<String>> = match ctx
            .backend
            .complete(&CompletionRequest::new(prompt, ctx.seed))
        {
            Ok(reply) => {
                let keys: Vec<String> = reply
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(String::from)
                    .collect();
                let expect: std::collections::BTreeSet<&str> =
                    candidates.iter().map(|(k, _)| k.as_str()).collect();
                let got: std::collections::BTreeSet<&str> =
                    keys.iter().map(String::as_str).collect();
                if keys.len() == candidates.len() && expect == got {
                    Some(keys)
                } else {
                    degraded.push("rerank: reply is not a permutation of candidates".into());
                    None
                }
            }
            Err(e) => {
                degraded.push(format!("rerank: {e}"));
                None
            }
        };
        if let Some(order) = permutation {
            let mut by_key: BTreeMap<String, ScoredSubgraph> = candidates
                .iter()
                .map(|(k, _)| k.clone())
                .zip(retrieved)
                .collect();
            retrieved = order
                .into_iter()
                .filter_map(|key| by_key.remove(&key))
                .collect();
        }
    }
    retrieved.truncate(ctx.rerank_n);
    for (i, sg) in retrieved.iter_mut().enumerate() {
        sg.rerank_rank = Some(i + 1);
    }

    Ok(ItemEvidence {
        item_id: item_id.to_string(),
        subgraphs: retrieved,
        linked: true,
        degraded,
    })
}
