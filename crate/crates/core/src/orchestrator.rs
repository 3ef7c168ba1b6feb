//! Orchestrator: classifies the request, dispatches the agents in a fixed
//! sequence (classify -> profile -> candidates -> per-candidate analyze/score
//! -> rank -> explain -> transparency), and assembles the response together
//! with a thought/action/observation trace.
//!
//! The dispatch sequence is deterministic rather than learned, which keeps
//! every trace reproducible. Stage-level failures degrade and are recorded;
//! only an empty candidate pool short-circuits (to an empty, explained
//! response).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::agents::{
    analyze_item, build_profile, build_reasoning_chain, generate_explanation, matched_facets,
    retained_triple_ids, score_cb, score_cf, score_llm, ChainContext, ComponentScores, Constraint,
    Explanation, ExplanationMode, ItemAnalysisContext, ItemAttributes, ItemEvidence,
    ProfileOptions, ReasoningChain, ReasoningStep, ScoreWeights, StepKind, TrainMatrix,
    UserProfile,
};
use crate::backend::Backend;
use crate::config::PipelineConfig;
use crate::corpus::{temporal_split, InteractionStore, SplitAssignment, SplitPart};
use crate::error::{Error, Result};
use crate::evalharness::CandidateScorer;
use crate::index::{verbalize_subgraph, ScoredSubgraph, VectorIndex};
use crate::kg::{AliasTable, KnowledgeGraph, Subgraph, TripleId};
use crate::transparency::{
    composite, extract_claims, faithfulness, personalization, TransparencyScore,
};

/// A recommendation request.
#[derive(Debug, Clone)]
pub struct RecommendationRequest {
    pub user_id: String,
    pub query: Option<String>,
    pub k: usize,
    pub constraints: Vec<Constraint>,
    pub explanation_mode: ExplanationMode,
    pub candidate_pool_size: usize,
    /// Explicit candidate list; its presence makes this a re-rank request.
    pub candidates: Option<Vec<String>>,
}

impl RecommendationRequest {
    pub fn new(user_id: impl Into<String>, k: usize) -> Self {
        RecommendationRequest {
            user_id: user_id.into(),
            query: None,
            k,
            constraints: Vec::new(),
            explanation_mode: ExplanationMode::Detailed,
            candidate_pool_size: 100,
            candidates: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestKind {
    ColdStart,
    ReRank,
    Conversational,
    Standard,
}

impl fmt::Display for RequestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RequestKind::ColdStart => write!(f, "cold_start"),
            RequestKind::ReRank => write!(f, "re_rank"),
            RequestKind::Conversational => write!(f, "conversational"),
            RequestKind::Standard => write!(f, "standard"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Thought,
    Action,
    Observation,
}

/// One entry of the interleaved reasoning trace.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceEntry {
    pub kind: TraceKind,
    pub summary: String,
}

/// A scored item with its component scores, reasoning chain, and retained
/// evidence. The score always decomposes as
/// `alpha * cf + beta * cb + gamma * llm` under the weights in force.
#[derive(Debug, Clone)]
pub struct Recommendation {
    pub item_id: String,
    pub score: f64,
    pub cf_score: f64,
    pub cb_score: f64,
    pub llm_score: f64,
    pub chain: ReasoningChain,
    pub retrieved: Vec<ScoredSubgraph>,
}

#[derive(Debug, Clone)]
pub struct RecommendationResponse {
    pub kind: RequestKind,
    pub recommendations: Vec<Recommendation>,
    pub explanations: Vec<Explanation>,
    pub transparency: Vec<Option<TransparencyScore>>,
    pub trace: Vec<TraceEntry>,
    pub degraded: Vec<String>,
}

impl RecommendationResponse {
    /// JSON document mirroring the response, with entity ids resolved to
    /// labels and evidence ids in their `t<k>`/`h<k>` form. Key order is
    /// sorted, so equal responses serialize to equal bytes.
    pub fn to_json(&self, kg: &KnowledgeGraph) -> Value {
        let subgraph_json = |sg: &ScoredSubgraph| {
            json!({
                "center": sg.subgraph.center.map(|c| kg.entity_label(c).to_string()),
                "radius": sg.subgraph.radius,
                "triples": sg.subgraph.triples.iter().map(|t| format!("t{}", t.0)).collect::<Vec<_>>(),
                "truncated": sg.subgraph.truncated,
                "similarity": sg.similarity,
                "retrieval_rank": sg.retrieval_rank,
                "rerank_rank": sg.rerank_rank,
            })
        };
        let recommendations: Vec<Value> = self
            .recommendations
            .iter()
            .map(|r| {
                json!({
                    "item_id": r.item_id,
                    "score": r.score,
                    "cf_score": r.cf_score,
                    "cb_score": r.cb_score,
                    "llm_score": r.llm_score,
                    "chain": serde_json::to_value(&r.chain).expect("chain serializes"),
                    "retrieved": r.retrieved.iter().map(subgraph_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "kind": self.kind,
            "recommendations": recommendations,
            "explanations": serde_json::to_value(&self.explanations).expect("serializes"),
            "transparency": serde_json::to_value(&self.transparency).expect("serializes"),
            "trace": serde_json::to_value(&self.trace).expect("serializes"),
            "degraded": self.degraded,
        })
    }
}

/// The wired pipeline: stores, graph, backend, and configuration.
pub struct Pipeline {
    store: InteractionStore,
    split: SplitAssignment,
    kg: KnowledgeGraph,
    attrs: ItemAttributes,
    aliases: Option<AliasTable>,
    backend: Box<dyn Backend>,
    config: PipelineConfig,
    train: TrainMatrix,
    slice_vectors: Option<VectorIndex>,
}

impl Pipeline {
    /// Wire a pipeline from in-memory parts, deriving the temporal split and
    /// train matrix.
    pub fn from_parts(
        store: InteractionStore,
        kg: KnowledgeGraph,
        attrs: ItemAttributes,
        aliases: Option<AliasTable>,
        config: PipelineConfig,
    ) -> Result<Self> {
        config.validate()?;
        let backend = config.backend_descriptor().build()?;
        let split = temporal_split(&store, config.hyperparameters.split_ratios)?;
        let train = TrainMatrix::build(&store, &split);
        Ok(Pipeline {
            store,
            split,
            kg,
            attrs,
            aliases,
            backend,
            config,
            train,
            slice_vectors: None,
        })
    }

    /// Load every configured file and wire the pipeline.
    pub fn from_config(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let interactions_path =
            config.paths.interactions.clone().ok_or_else(|| {
                Error::config("paths.interactions", "required to build a pipeline")
            })?;
        let store = crate::corpus::ingest_interactions(&interactions_path, <_>::default())?;
        let kg = match &config.paths.triples {
            Some(path) => crate::kg::load_triples(path)?,
            None => KnowledgeGraph::default(),
        };
        let mut kg = kg;
        if let Some(path) = &config.paths.aliases {
            kg.load_aliases(path)?;
        }
        let attrs = match &config.paths.attributes {
            Some(path) => ItemAttributes::load(path)?,
            None => ItemAttributes::default(),
        };
        let slice_vectors = match &config.paths.vectors {
            Some(path) if path.exists() => Some(VectorIndex::load(path)?),
            _ => None,
        };
        let mut pipeline = Self::from_parts(store, kg, attrs, None, config)?;
        pipeline.slice_vectors = slice_vectors;
        Ok(pipeline)
    }

    pub fn store(&self) -> &InteractionStore {
        &self.store
    }

    pub fn split(&self) -> &SplitAssignment {
        &self.split
    }

    pub fn kg(&self) -> &KnowledgeGraph {
        &self.kg
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn backend(&self) -> &dyn Backend {
        &*self.backend
    }

    pub fn set_slice_vectors(&mut self, index: VectorIndex) {
        self.slice_vectors = Some(index);
    }

    fn seed(&self) -> u64 {
        self.config.hyperparameters.seed
    }

    /// Weights in force, honoring the reasoning-hybrid ablation (model signal
    /// only).
    fn effective_weights(&self) -> ScoreWeights {
        if self.config.ablation.disable_reasoning_hybrid {
            ScoreWeights {
                alpha: 0.0,
                beta: 0.0,
                gamma: 1.0,
            }
        } else {
            self.config.hyperparameters.score_weights()
        }
    }

    /// Classify the request: cold-start (no train history), re-rank (explicit
    /// candidates), conversational (query from a known user), or standard.
    pub fn classify_request(&self, req: &RecommendationRequest) -> RequestKind {
        let train_interactions = self
            .store
            .user_positions(&req.user_id, Some((&self.split, SplitPart::Train)))
            .len();
        if train_interactions == 0 {
            RequestKind::ColdStart
        } else if req.candidates.is_some() {
            RequestKind::ReRank
        } else if req.query.is_some() {
            RequestKind::Conversational
        } else {
            RequestKind::Standard
        }
    }

    /// Draw the candidate pool: the user's train-interacted items are
    /// excluded, hard constraints filter, and the pool fills by global train
    /// popularity (ties by ascending item id). Re-rank requests keep the
    /// explicit list's order instead.
    pub fn select_candidates(
        &self,
        user_id: &str,
        kind: RequestKind,
        pool_size: usize,
        constraints: &[Constraint],
        explicit: Option<&[String]>,
    ) -> Vec<String> {
        let train_items: BTreeSet<String> = self
            .store
            .user_positions(user_id, Some((&self.split, SplitPart::Train)))
            .into_iter()
            .filter_map(|p| self.store.get(p).map(|it| it.item_id.clone()))
            .collect();
        let allowed = |item: &str| {
            !train_items.contains(item)
                && constraints.iter().all(|c| c.matches(self.attrs.get(item)))
        };
        match (kind, explicit) {
            (RequestKind::ReRank, Some(list)) => {
                let mut seen = BTreeSet::new();
                list.iter()
                    .filter(|item| allowed(item) && seen.insert(item.as_str()))
                    .take(pool_size)
                    .cloned()
                    .collect()
            }
            _ => {
                let mut items: Vec<&str> = self.store.item_ids().filter(|i| allowed(i)).collect();
                items.sort_by(|a, b| {
                    self.train
                        .interaction_count(b)
                        .cmp(&self.train.interaction_count(a))
                        .then_with(|| a.cmp(b))
                });
                items.truncate(pool_size);
                items.into_iter().map(String::from).collect()
            }
        }
    }

    /// Build the user's profile from train history, honoring the user-agent
    /// ablation.
    pub fn build_user_profile(&self, user_id: &str) -> UserProfile {
        let now = self.store.max_timestamp();
        if self.config.ablation.disable_user_agent {
            return UserProfile::empty(user_id, now);
        }
        let history = self
            .store
            .user_history(user_id, Some((&self.split, SplitPart::Train)));
        build_profile(
            &*self.backend,
            user_id,
            &history,
            &self.attrs,
            &ProfileOptions {
                now,
                half_life_secs: self.config.hyperparameters.half_life_secs(),
                positive_threshold: self.config.hyperparameters.positive_threshold,
                seed: self.seed(),
            },
        )
    }

    /// Embed every item's unfiltered per-relation k-hop slices into a vector
    /// index under the [`crate::agents::slice_vector_key`] scheme. Written by
    /// the `embed` command and consulted during item analysis.
    pub fn precompute_slice_vectors(&self) -> Result<VectorIndex> {
        let h = &self.config.hyperparameters;
        let mut index = VectorIndex::new();
        for item in self.store.item_ids() {
            let Some(entity) = crate::kg::link_entity(&self.kg, item, self.aliases.as_ref())?
            else {
                continue;
            };
            let neighborhood = crate::kg::extract_k_hop(&self.kg, entity, h.k_hop, h.max_triples)?;
            let mut by_relation: BTreeMap<String, Vec<TripleId>> = BTreeMap::new();
            for &tid in &neighborhood.triples {
                let triple = self.kg.triple(tid)?;
                by_relation
                    .entry(self.kg.relation_label(triple.relation).to_string())
                    .or_default()
                    .push(tid);
            }
            let entity_label = self.kg.entity_label(entity);
            for (relation, triples) in by_relation {
                let key = crate::agents::slice_vector_key(entity_label, &relation, &triples);
                if index.get(&key).is_some() {
                    continue; // shared entity already embedded
                }
                let slice = Subgraph {
                    center: Some(entity),
                    radius: h.k_hop,
                    triples,
                    truncated: neighborhood.truncated,
                };
                let vector = crate::index::embed_subgraph(&*self.backend, &self.kg, &slice)?;
                index.insert(key, vector)?;
            }
        }
        Ok(index)
    }

    fn gather_evidence(
        &self,
        item_id: &str,
        profile: &UserProfile,
        query: Option<&str>,
    ) -> Result<ItemEvidence> {
        if self.config.ablation.disable_item_agent {
            return Ok(ItemEvidence {
                item_id: item_id.to_string(),
                subgraphs: Vec::new(),
                linked: false,
                degraded: Vec::new(),
            });
        }
        if self.config.ablation.disable_kg {
            return Ok(ItemEvidence {
                item_id: item_id.to_string(),
                subgraphs: vec![ScoredSubgraph {
                    subgraph: Subgraph::no_evidence(),
                    similarity: 0.0,
                    retrieval_rank: 1,
                    rerank_rank: Some(1),
                }],
                linked: false,
                degraded: Vec::new(),
            });
        }
        let h = &self.config.hyperparameters;
        analyze_item(
            &ItemAnalysisContext {
                backend: &*self.backend,
                kg: &self.kg,
                aliases: self.aliases.as_ref(),
                precomputed: self.slice_vectors.as_ref(),
                retrieval_k: h.retrieval_k,
                rerank_n: h.rerank_n,
                k_hop: h.k_hop,
                max_triples: h.max_triples,
                seed: h.seed,
            },
            item_id,
            profile,
            query,
        )
    }

    /// Run the full per-candidate path: evidence, component scores, hybrid,
    /// and reasoning chain.
    pub fn evaluate_candidate(
        &self,
        user_id: &str,
        item_id: &str,
        profile: &UserProfile,
        query: Option<&str>,
    ) -> Result<(Recommendation, Vec<String>)> {
        let mut degraded = Vec::new();
        let evidence = self.gather_evidence(item_id, profile, query)?;
        for d in &evidence.degraded {
            degraded.push(format!("item {item_id}: {d}"));
        }

        let h = &self.config.hyperparameters;
        let cf = score_cf(&self.train, user_id, item_id, h.recent_history);
        let cb = score_cb(profile, self.attrs.get(item_id));
        let evidence_text = {
            let verbalized: Result<Vec<String>> = evidence
                .subgraphs
                .iter()
                .map(|sg| verbalize_subgraph(&self.kg, &sg.subgraph))
                .collect();
            verbalized?.join("\n")
        };
        let llm = score_llm(
            &*self.backend,
            profile,
            item_id,
            &evidence_text,
            self.seed(),
        );
        if llm.degraded {
            degraded.push(format!("item {item_id}: llm preference defaulted to 0.5"));
        }
        let weights = self.effective_weights();
        let score = crate::agents::hybrid_score(cf, cb, llm.value, &weights)?;

        let train_positions = self
            .store
            .user_positions(user_id, Some((&self.split, SplitPart::Train)));
        let cf_positions: Vec<usize> =
            train_positions[train_positions.len().saturating_sub(h.recent_history)..].to_vec();
        let scores = ComponentScores {
            cf,
            cb,
            llm: llm.value,
        };
        let chain = if self.config.ablation.disable_reasoning_hybrid {
            ReasoningChain {
                item_id: item_id.to_string(),
                steps: vec![ReasoningStep {
                    statement: format!(
                        "component scores: collaborative={cf:.3} content={cb:.3} model={:.3}",
                        llm.value
                    ),
                    evidence: Vec::new(),
                    kind: StepKind::Aggregation,
                }],
            }
        } else {
            let matched = matched_facets(profile, &self.attrs, item_id);
            let retained = retained_triple_ids(&evidence.subgraphs);
            build_reasoning_chain(
                &ChainContext {
                    kg: &self.kg,
                    attrs: &self.attrs,
                    store: &self.store,
                    positive_threshold: h.positive_threshold,
                },
                item_id,
                &scores,
                &matched,
                &retained,
                &train_positions,
                &cf_positions,
            )
        };

        // chain soundness is an invariant of construction; verify it
        let retained_set: BTreeSet<TripleId> = retained_triple_ids(&evidence.subgraphs)
            .into_iter()
            .collect();
        chain.validate(&retained_set, self.store.len())?;

        Ok((
            Recommendation {
                item_id: item_id.to_string(),
                score,
                cf_score: cf,
                cb_score: cb,
                llm_score: llm.value,
                chain,
                retrieved: evidence.subgraphs,
            },
            degraded,
        ))
    }

    fn score_transparency(
        &self,
        explanation: &Explanation,
        chain: &ReasoningChain,
        subgraphs: &[ScoredSubgraph],
        profile: &UserProfile,
    ) -> Result<TransparencyScore> {
        let mut claims = extract_claims(explanation, None);
        let faith = faithfulness(&mut claims, &self.kg, chain, subgraphs, &*self.backend)?;
        let coher = crate::transparency::coherence(explanation, &*self.backend)?;
        let pers = personalization(explanation, profile, &*self.backend)?;
        composite(
            faith.score,
            coher,
            pers.score,
            self.config.hyperparameters.transparency_weights(),
        )
    }

    /// Maximal-marginal-relevance re-rank over item attribute sets.
    fn mmr_rerank(&self, mut pool: Vec<Recommendation>, lambda: f64) -> Vec<Recommendation> {
        let jaccard = |a: &str, b: &str| -> f64 {
            let sa = self.attrs.attr_set(a);
            let sb = self.attrs.attr_set(b);
            if sa.is_empty() || sb.is_empty() {
                return 0.0;
            }
            let inter = sa.intersection(&sb).count() as f64;
            let union = sa.union(&sb).count() as f64;
            inter / union
        };
        let mut selected: Vec<Recommendation> = Vec::with_capacity(pool.len());
        while !pool.is_empty() {
            let mut best = 0usize;
            let mut best_value = f64::NEG_INFINITY;
            for (i, candidate) in pool.iter().enumerate() {
                let max_sim = selected
                    .iter()
                    .map(|s| jaccard(&candidate.item_id, &s.item_id))
                    .fold(0.0_f64, f64::max);
                let value = lambda * candidate.score - (1.0 - lambda) * max_sim;
                let better = value > best_value + 1e-12
                    || ((value - best_value).abs() <= 1e-12
                        && candidate.item_id < pool[best].item_id);
                if i == 0 || better {
                    best = i;
                    best_value = value;
                }
            }
            selected.push(pool.remove(best));
        }
        selected
    }

    /// Handle one recommendation request end to end.
    pub fn handle_request(&self, req: &RecommendationRequest) -> Result<RecommendationResponse> {
        if req.k < 1 {
            return Err(Error::Request("k must be >= 1".into()));
        }
        if req.candidate_pool_size < req.k {
            return Err(Error::Request(format!(
                "candidate_pool_size ({}) must be >= k ({})",
                req.candidate_pool_size, req.k
            )));
        }

        let mut trace: Vec<TraceEntry> = Vec::new();
        let mut degraded: Vec<String> = Vec::new();
        let mut t = |kind: TraceKind, summary: String| trace.push(TraceEntry { kind, summary });

        t(
            TraceKind::Thought,
            format!("classify the request for user {}", req.user_id),
        );
        t(TraceKind::Action, "classify_request".into());
        let kind = self.classify_request(req);
        t(TraceKind::Observation, format!("kind={kind}"));

        t(
            TraceKind::Thought,
            "build the user preference profile".into(),
        );
        t(TraceKind::Action, "build_profile".into());
        let profile = self.build_user_profile(&req.user_id);
        if profile.degraded {
            degraded.push("user profile degraded: backend failure".into());
        }
        t(
            TraceKind::Observation,
            format!(
                "facets={} degraded={}",
                profile.facets.len(),
                profile.degraded
            ),
        );

        t(TraceKind::Action, "select_candidates".into());
        let candidates = self.select_candidates(
            &req.user_id,
            kind,
            req.candidate_pool_size,
            &req.constraints,
            req.candidates.as_deref(),
        );
        t(TraceKind::Observation, format!("pool={}", candidates.len()));
        if candidates.is_empty() {
            t(
                TraceKind::Thought,
                "candidate pool is empty after exclusions and constraints; nothing to rank".into(),
            );
            degraded.push("empty candidate pool".into());
            return Ok(RecommendationResponse {
                kind,
                recommendations: Vec::new(),
                explanations: Vec::new(),
                transparency: Vec::new(),
                trace,
                degraded,
            });
        }

        t(
            TraceKind::Thought,
            "score each candidate through the agent path".into(),
        );
        t(TraceKind::Action, "analyze_and_score_candidates".into());
        let conflict_spread = self.config.hyperparameters.conflict_spread;
        let mut scored: Vec<Recommendation> = Vec::with_capacity(candidates.len());
        for item in &candidates {
            let (rec, notes) =
                self.evaluate_candidate(&req.user_id, item, &profile, req.query.as_deref())?;
            degraded.extend(notes);
            let spread = rec.cf_score.max(rec.cb_score).max(rec.llm_score)
                - rec.cf_score.min(rec.cb_score).min(rec.llm_score);
            if spread > conflict_spread {
                t(
                    TraceKind::Thought,
                    format!(
                        "component scores disagree on {} (spread {spread:.2} > {conflict_spread:.2})",
                        rec.item_id
                    ),
                );
            }
            scored.push(rec);
        }
        t(TraceKind::Observation, format!("scored={}", scored.len()));

        t(TraceKind::Action, "rank_candidates".into());
        scored.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .expect("scores are finite")
                .then_with(|| a.item_id.cmp(&b.item_id))
        });
        // re-sort oracle: descending score with ascending-id tie-break
        for pair in scored.windows(2) {
            let ordered = pair[0].score > pair[1].score
                || (pair[0].score == pair[1].score && pair[0].item_id <= pair[1].item_id);
            if !ordered {
                return Err(Error::Integrity(
                    "ranking violates the sort contract".into(),
                ));
            }
        }
        if self.config.hyperparameters.mmr_enabled {
            t(TraceKind::Action, "diversity_rerank".into());
            scored = self.mmr_rerank(scored, self.config.hyperparameters.mmr_lambda);
            t(
                TraceKind::Observation,
                "applied maximal-marginal-relevance order".into(),
            );
        }
        scored.truncate(req.k);
        t(
            TraceKind::Observation,
            format!(
                "top={}",
                scored.first().map(|r| r.item_id.as_str()).unwrap_or("-")
            ),
        );

        let mut explanations: Vec<Explanation> = Vec::with_capacity(scored.len());
        let mut transparency: Vec<Option<TransparencyScore>> = Vec::with_capacity(scored.len());
        for i in 0..scored.len() {
            let rec = &scored[i];
            t(
                TraceKind::Action,
                format!("generate_explanation item={}", rec.item_id),
            );
            let explanation = if self.config.ablation.disable_explanation {
                Explanation::from_text(&rec.item_id, req.explanation_mode, rec.chain.render_text())
            } else {
                let mut mode = req.explanation_mode;
                let alternative: Option<&ReasoningChain> = scored
                    .iter()
                    .enumerate()
                    .find(|(j, _)| *j != i)
                    .map(|(_, r)| &r.chain);
                if mode == ExplanationMode::Comparative && alternative.is_none() {
                    degraded.push(format!(
                        "explanation {}: comparative mode needs an alternative; fell back to detailed",
                        rec.item_id
                    ));
                    mode = ExplanationMode::Detailed;
                }
                let alternatives: Vec<&ReasoningChain> = alternative.into_iter().collect();
                match generate_explanation(
                    &*self.backend,
                    &self.kg,
                    &rec.chain,
                    &rec.retrieved,
                    &profile,
                    mode,
                    &alternatives,
                    self.seed(),
                ) {
                    Ok(e) => e,
                    Err(e) => {
                        degraded.push(format!("explanation {}: {e}", rec.item_id));
                        Explanation::from_text(&rec.item_id, mode, rec.chain.render_text())
                    }
                }
            };
            t(
                TraceKind::Observation,
                format!("cited={}", explanation.cited_evidence.len()),
            );

            t(
                TraceKind::Action,
                format!("transparency_scoring item={}", rec.item_id),
            );
            let score = if self.config.ablation.disable_transparency {
                t(
                    TraceKind::Observation,
                    "transparency scoring disabled".into(),
                );
                None
            } else {
                match self.score_transparency(&explanation, &rec.chain, &rec.retrieved, &profile) {
                    Ok(ts) => {
                        t(TraceKind::Observation, format!("trans={:.4}", ts.composite));
                        Some(ts)
                    }
                    Err(e) => {
                        degraded.push(format!("transparency {}: {e}", rec.item_id));
                        t(TraceKind::Observation, "transparency scoring failed".into());
                        None
                    }
                }
            };
            explanations.push(explanation);
            transparency.push(score);
        }

        Ok(RecommendationResponse {
            kind,
            recommendations: scored,
            explanations,
            transparency,
            trace,
            degraded,
        })
    }
}

/// Adapter running the pipeline's scoring path under the evaluation
/// protocol, with per-user profile caching.
pub struct PipelineScorer<'a> {
    pipeline: &'a Pipeline,
    profiles: BTreeMap<String, UserProfile>,
}

impl<'a> PipelineScorer<'a> {
    pub fn new(pipeline: &'a Pipeline) -> Self {
        PipelineScorer {
            pipeline,
            profiles: BTreeMap::new(),
        }
    }

    fn profile_for(&mut self, user_id: &str) -> &UserProfile {
        if !self.profiles.contains_key(user_id) {
            let profile = self.pipeline.build_user_profile(user_id);
            self.profiles.insert(user_id.to_string(), profile);
        }
        &self.profiles[user_id]
    }
}

impl CandidateScorer for PipelineScorer<'_> {
    fn name(&self) -> &str {
        "pipeline"
    }

    fn score_candidates(&mut self, user_id: &str, items: &[String]) -> Result<Vec<f64>> {
        let profile = self.profile_for(user_id).clone();
        items
            .iter()
            .map(|item| {
                self.pipeline
                    .evaluate_candidate(user_id, item, &profile, None)
                    .map(|(rec, _)| rec.score)
            })
            .collect()
    }

    fn explain_top(
        &mut self,
        user_id: &str,
        item_id: &str,
    ) -> Result<Option<(Explanation, TransparencyScore)>> {
        if self.pipeline.config().ablation.disable_transparency {
            return Ok(None);
        }
        let profile = self.profile_for(user_id).clone();
        let (rec, _) = self
            .pipeline
            .evaluate_candidate(user_id, item_id, &profile, None)?;
        let explanation = generate_explanation(
            self.pipeline.backend(),
            self.pipeline.kg(),
            &rec.chain,
            &rec.retrieved,
            &profile,
            ExplanationMode::Detailed,
            &[],
            self.pipeline.config().hyperparameters.seed,
        )?;
        let score =
            self.pipeline
                .score_transparency(&explanation, &rec.chain, &rec.retrieved, &profile)?;
        Ok(Some((explanation, score)))
    }
}
