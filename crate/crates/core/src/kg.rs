//! Knowledge graph: triple store, entity linking, k-hop evidence subgraph
//! extraction, and preference-driven relation filtering.
//!
//! Triples file: `<head>\t<relation>\t<tail>` per line, UTF-8. Alias file:
//! `<alias>\t<entity>` per line. Entity and relation labels are their surface
//! strings. Triple ids are dense ordinals in first-occurrence order and are
//! stable across reloads of the same file.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::{normalize_label, tokens};

/// Index of an entity within a [`KnowledgeGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct EntityId(pub u32);

/// Index of a relation within a [`KnowledgeGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct RelationId(pub u32);

/// Stable identifier of a triple (first-occurrence ordinal in the source
/// file). Rendered as evidence id `t<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct TripleId(pub u32);

#[derive(Debug, Clone)]
pub struct Triple {
    pub id: TripleId,
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: EntityId,
}

#[derive(Debug, Clone)]
struct Entity {
    label: String,
    aliases: Vec<String>,
}

/// Immutable knowledge graph. Safe for unlimited concurrent readers once
/// loaded; extraction allocates per-call state only.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    entities: Vec<Entity>,
    relations: Vec<String>,
    triples: Vec<Triple>,
    /// entity -> incident triple ids (both head and tail side), ascending.
    adjacency: Vec<Vec<TripleId>>,
    by_label: HashMap<String, EntityId>,
    by_relation_label: HashMap<String, RelationId>,
    /// normalized label -> entities sharing it (ambiguity surfaces at lookup)
    by_normalized: HashMap<String, Vec<EntityId>>,
    by_normalized_alias: HashMap<String, Vec<EntityId>>,
}

/// Extra alias table consulted by [`link_entity`]: alias -> entity label.
pub type AliasTable = BTreeMap<String, String>;

impl KnowledgeGraph {
    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn entity_label(&self, id: EntityId) -> &str {
        &self.entities[id.0 as usize].label
    }

    pub fn relation_label(&self, id: RelationId) -> &str {
        &self.relations[id.0 as usize]
    }

    pub fn entity_aliases(&self, id: EntityId) -> &[String] {
        &self.entities[id.0 as usize].aliases
    }

    pub fn entity_by_label(&self, label: &str) -> Option<EntityId> {
        self.by_label.get(label).copied()
    }

    /// Triple ids incident to `entity`, ascending.
    pub fn incident(&self, entity: EntityId) -> &[TripleId] {
        &self.adjacency[entity.0 as usize]
    }

    /// Resolve a triple id. Ids are dense, so this is a direct index.
    pub fn triple(&self, id: TripleId) -> Result<&Triple> {
        self.triples
            .get(id.0 as usize)
            .filter(|t| t.id == id)
            .ok_or_else(|| Error::Integrity(format!("dangling triple id t{}", id.0)))
    }

    fn intern_entity(&mut self, label: &str) -> EntityId {
        if let Some(&existing) = self.by_label.get(label) {
            return existing;
        }
        let id = EntityId(self.entities.len() as u32);
        self.entities.push(Entity {
            label: label.to_string(),
            aliases: Vec::new(),
        });
        self.adjacency.push(Vec::new());
        self.by_label.insert(label.to_string(), id);
        self.by_normalized
            .entry(normalize_label(label))
            .or_default()
            .push(id);
        id
    }

    fn intern_relation(&mut self, label: &str) -> RelationId {
        if let Some(&id) = self.by_relation_label.get(label) {
            return id;
        }
        let id = RelationId(self.relations.len() as u32);
        self.relations.push(label.to_string());
        self.by_relation_label.insert(label.to_string(), id);
        id
    }

    /// Register an alias for an entity referenced by exact label.
    pub fn add_alias(&mut self, alias: &str, entity_label: &str) -> Result<()> {
        let id = self
            .entity_by_label(entity_label)
            .ok_or_else(|| Error::Lookup(format!("unknown entity {entity_label:?}")))?;
        self.entities[id.0 as usize].aliases.push(alias.to_string());
        let bucket = self
            .by_normalized_alias
            .entry(normalize_label(alias))
            .or_default();
        if !bucket.contains(&id) {
            bucket.push(id);
        }
        Ok(())
    }

    /// Load `<alias>\t<entity>` lines into the graph's alias lists.
    pub fn load_aliases(&mut self, path: &Path) -> Result<usize> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut count = 0;
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (alias, entity) = line.split_once('\t').ok_or_else(|| {
                Error::parse(
                    path.display().to_string(),
                    lineno + 1,
                    "expected `<alias>\\t<entity>`",
                )
            })?;
            self.add_alias(alias.trim(), entity.trim())?;
            count += 1;
        }
        Ok(count)
    }
}

/// Parse a triples file body. Duplicated lines deduplicate to the triple of
/// their first occurrence.
pub fn parse_triples(content: &str, source_name: &str) -> Result<KnowledgeGraph> {
    let mut kg = KnowledgeGraph::default();
    let mut seen: HashSet<(EntityId, RelationId, EntityId)> = HashSet::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                source_name,
                lineno + 1,
                format!(
                    "expected `<head>\\t<relation>\\t<tail>`, found {} fields",
                    fields.len()
                ),
            ));
        }
        let head = fields[0].trim();
        let rel = fields[1].trim();
        let tail = fields[2].trim();
        if head.is_empty() || rel.is_empty() || tail.is_empty() {
            return Err(Error::parse(source_name, lineno + 1, "empty field"));
        }
        let h = kg.intern_entity(head);
        let r = kg.intern_relation(rel);
        let t = kg.intern_entity(tail);
        if !seen.insert((h, r, t)) {
            continue;
        }
        let id = TripleId(kg.triples.len() as u32);
        kg.triples.push(Triple {
            id,
            head: h,
            relation: r,
            tail: t,
        });
        kg.adjacency[h.0 as usize].push(id);
        if t != h {
            kg.adjacency[t.0 as usize].push(id);
        }
    }
    Ok(kg)
}

/// Load a triples file.
pub fn load_triples(path: &Path) -> Result<KnowledgeGraph> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_triples(&content, &path.display().to_string())
}

/// Map an item label to a knowledge-graph entity.
///
/// Matches the normalized label exactly; failing that, consults `alias_table`
/// and then the graph's own alias lists. Two entities sharing the queried
/// normalized label is an ambiguity error listing the candidates.
pub fn link_entity(
    kg: &KnowledgeGraph,
    item_label: &str,
    alias_table: Option<&AliasTable>,
) -> Result<Option<EntityId>> {
    let needle = normalize_label(item_label);
    if needle.is_empty() {
        return Ok(None);
    }
    let ambiguity = |candidates: &[EntityId]| Error::AmbiguousEntity {
        label: item_label.to_string(),
        candidates: candidates
            .iter()
            .map(|&id| kg.entity_label(id).to_string())
            .collect(),
    };
    if let Some(matches) = kg.by_normalized.get(&needle) {
        if matches.len() > 1 {
            return Err(ambiguity(matches));
        }
        return Ok(Some(matches[0]));
    }
    if let Some(table) = alias_table {
        for (alias, entity_label) in table {
            if normalize_label(alias) == needle {
                if let Some(id) = kg.entity_by_label(entity_label) {
                    return Ok(Some(id));
                }
            }
        }
    }
    if let Some(matches) = kg.by_normalized_alias.get(&needle) {
        if matches.len() > 1 {
            return Err(ambiguity(matches));
        }
        return Ok(Some(matches[0]));
    }
    Ok(None)
}

/// An extracted evidence neighborhood: triples within `radius` undirected hops
/// of `center`, in deterministic (BFS layer, then triple id) order.
///
/// `center` is `None` only for the synthetic no-evidence subgraph used when an
/// item cannot be linked to any entity.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgraph {
    pub center: Option<EntityId>,
    pub radius: u32,
    pub triples: Vec<TripleId>,
    /// True iff the size cap cut the BFS.
    pub truncated: bool,
}

impl Subgraph {
    /// The sentinel subgraph for items that could not be linked.
    pub fn no_evidence() -> Self {
        Subgraph {
            center: None,
            radius: 0,
            triples: Vec::new(),
            truncated: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Extract the k-hop neighborhood of `center`, treating triples as undirected
/// edges. A triple is included iff its closer endpoint is within `k - 1` hops.
/// Collection stops once `max_triples` triples are gathered, setting
/// `truncated`.
pub fn extract_k_hop(
    kg: &KnowledgeGraph,
    center: EntityId,
    k: u32,
    max_triples: usize,
) -> Result<Subgraph> {
    if (center.0 as usize) >= kg.entity_count() {
        return Err(Error::Lookup(format!(
            "unknown center entity #{}",
            center.0
        )));
    }
    // BFS distances over entities
    let mut dist: HashMap<EntityId, u32> = HashMap::new();
    dist.insert(center, 0);
    let mut queue = VecDeque::new();
    queue.push_back(center);
    while let Some(node) = queue.pop_front() {
        let d = dist[&node];
        if d >= k {
            continue;
        }
        for &tid in kg.incident(node) {
            let triple = &kg.triples[tid.0 as usize];
            for neighbor in [triple.head, triple.tail] {
                if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(neighbor) {
                    slot.insert(d + 1);
                    queue.push_back(neighbor);
                }
            }
        }
    }
    // layer of a triple = distance of its closer endpoint; include if <= k-1
    let mut layered: Vec<(u32, TripleId)> = Vec::new();
    let mut included: HashSet<TripleId> = HashSet::new();
    for (&node, &d) in dist.iter() {
        if d >= k {
            continue;
        }
        for &tid in kg.incident(node) {
            if included.insert(tid) {
                let triple = &kg.triples[tid.0 as usize];
                let layer = [triple.head, triple.tail]
                    .iter()
                    .filter_map(|e| dist.get(e).copied())
                    .min()
                    .unwrap_or(u32::MAX);
                if layer < k {
                    layered.push((layer, tid));
                }
            }
        }
    }
    layered.sort_unstable_by_key(|&(layer, tid)| (layer, tid));
    let truncated = layered.len() > max_triples;
    layered.truncate(max_triples);
    Ok(Subgraph {
        center: Some(center),
        radius: k,
        triples: layered.into_iter().map(|(_, tid)| tid).collect(),
        truncated,
    })
}

/// Outcome of [`filter_relations`]: the (possibly reduced) subgraph plus
/// whether any filtering was actually applied.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub subgraph: Subgraph,
    pub applied: bool,
}

/// Keep triples whose relation is in `allowlist` when given; otherwise keep
/// triples whose relation or tail label token-overlaps any profile facet key
/// or value. Order is preserved. If nothing matches, the input is returned
/// unchanged and marked as unfiltered: silently emptying evidence would
/// poison downstream faithfulness scoring.
pub fn filter_relations(
    kg: &KnowledgeGraph,
    sub: &Subgraph,
    profile: &crate::agents::UserProfile,
    allowlist: Option<&HashSet<RelationId>>,
) -> FilterOutcome {
    let facet_tokens: HashSet<String> = profile
        .facets
        .iter()
        .flat_map(|f| tokens(&f.key).into_iter().chain(tokens(&f.value)))
        .collect();
    let keep = |tid: &TripleId| -> bool {
        let triple = &kg.triples[tid.0 as usize];
        match allowlist {
            Some(set) => set.contains(&triple.relation),
            None => {
                let rel_tokens = tokens(kg.relation_label(triple.relation));
                let tail_tokens = tokens(kg.entity_label(triple.tail));
                rel_tokens
                    .iter()
                    .chain(tail_tokens.iter())
                    .any(|t| facet_tokens.contains(t))
            }
        }
    };
    let kept: Vec<TripleId> = sub.triples.iter().filter(|t| keep(t)).copied().collect();
    if kept.is_empty() {
        return FilterOutcome {
            subgraph: sub.clone(),
            applied: false,
        };
    }
    FilterOutcome {
        subgraph: Subgraph {
            center: sub.center,
            radius: sub.radius,
            triples: kept,
            truncated: sub.truncated,
        },
        applied: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{FacetSource, PreferenceFacet, UserProfile};
    use proptest::prelude::*;

    fn kg_from(lines: &str) -> KnowledgeGraph {
        parse_triples(lines, "test").unwrap()
    }

    fn profile_with(facets: &[(&str, &str)]) -> UserProfile {
        UserProfile {
            user_id: "u".into(),
            facets: facets
                .iter()
                .map(|(k, v)| PreferenceFacet {
                    key: k.to_string(),
                    value: v.to_string(),
                    weight: 1.0,
                    source: FacetSource::Explicit,
                })
                .collect(),
            built_at: 0,
            history_length: 0,
            degraded: false,
        }
    }

    #[test]
    fn load_counts_distinct_triples() {
        let kg = kg_from("a\tr1\tb\nb\tr2\tc\nc\tr1\ta\n");
        assert_eq!(kg.triple_count(), 3);
        assert_eq!(kg.entity_count(), 3);
        assert_eq!(kg.relation_count(), 2);
    }

    #[test]
    fn load_deduplicates_repeated_lines() {
        let kg = kg_from("a\tr1\tb\na\tr1\tb\n");
        assert_eq!(kg.triple_count(), 1);
    }

    #[test]
    fn adjacency_covers_both_endpoints() {
        let kg = kg_from("a\tr1\tb\nb\tr2\tc\n");
        let b = kg.entity_by_label("b").unwrap();
        assert_eq!(kg.incident(b), &[TripleId(0), TripleId(1)]);
    }

    #[test]
    fn load_rejects_malformed_line_with_number() {
        let err = parse_triples("a\tr1\tb\nbroken line\n", "kgf").unwrap_err();
        assert!(err.to_string().contains("kgf:2"), "{err}");
    }

    #[test]
    fn empty_file_is_a_valid_empty_graph() {
        let kg = kg_from("");
        assert_eq!(kg.triple_count(), 0);
        assert_eq!(kg.entity_count(), 0);
    }

    #[test]
    fn linking_normalizes_labels() {
        let kg = kg_from("the matrix\tgenre\tsci-fi\n");
        let id = link_entity(&kg, "The Matrix", None).unwrap().unwrap();
        assert_eq!(kg.entity_label(id), "the matrix");
    }

    #[test]
    fn linking_unknown_label_is_absent() {
        let kg = kg_from("a\tr\tb\n");
        assert_eq!(link_entity(&kg, "zzz", None).unwrap(), None);
    }

    #[test]
    fn linking_ambiguous_label_errors_with_candidates() {
        let kg = kg_from("Inception\tr\tx\ninception!\tr\ty\n");
        let err = link_entity(&kg, "inception", None).unwrap_err();
        match err {
            Error::AmbiguousEntity { candidates, .. } => assert_eq!(candidates.len(), 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn alias_file_loads_into_entity_alias_lists() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("aliases.tsv");
        std::fs::write(&path, "The Matrix 1999\tthe matrix\n").unwrap();
        let mut kg = kg_from("the matrix\tgenre\tsci-fi\n");
        assert_eq!(kg.load_aliases(&path).unwrap(), 1);
        let id = kg.entity_by_label("the matrix").unwrap();
        assert_eq!(kg.entity_aliases(id), &["The Matrix 1999".to_string()]);
        assert!(link_entity(&kg, "the matrix 1999", None).unwrap().is_some());

        let bad = dir.path().join("bad.tsv");
        std::fs::write(&bad, "no tab here\n").unwrap();
        assert!(kg.load_aliases(&bad).is_err());
    }

    #[test]
    fn linking_consults_alias_table_then_graph_aliases() {
        let mut kg = kg_from("the matrix\tgenre\tsci-fi\n");
        kg.add_alias("matrix 1999", "the matrix").unwrap();
        let table: AliasTable = [("neo movie".to_string(), "the matrix".to_string())]
            .into_iter()
            .collect();
        assert!(link_entity(&kg, "Matrix 1999", None).unwrap().is_some());
        assert!(link_entity(&kg, "Neo Movie", Some(&table))
            .unwrap()
            .is_some());
    }

    #[test]
    fn k_zero_extracts_center_only() {
        let kg = kg_from("a\tr\tb\n");
        let a = kg.entity_by_label("a").unwrap();
        let sub = extract_k_hop(&kg, a, 0, 100).unwrap();
        assert_eq!(sub.center, Some(a));
        assert!(sub.triples.is_empty());
        assert!(!sub.truncated);
    }

    #[test]
    fn chain_one_hop_keeps_only_incident_triple() {
        // oracle: on a--t0--b--t1--c, dist(a)=0 so only t0 has an endpoint
        // within k-1 = 0 hops
        let kg = kg_from("a\tr\tb\nb\tr\tc\n");
        let a = kg.entity_by_label("a").unwrap();
        let sub = extract_k_hop(&kg, a, 1, 100).unwrap();
        assert_eq!(sub.triples, vec![TripleId(0)]);
        let sub2 = extract_k_hop(&kg, a, 2, 100).unwrap();
        assert_eq!(sub2.triples, vec![TripleId(0), TripleId(1)]);
    }

    #[test]
    fn star_with_cap_keeps_lowest_ids_and_flags_truncation() {
        let lines: String = (0..20).map(|i| format!("hub\tr\tspoke{i}\n")).collect();
        let kg = kg_from(&lines);
        let hub = kg.entity_by_label("hub").unwrap();
        let sub = extract_k_hop(&kg, hub, 1, 5).unwrap();
        assert_eq!(sub.triples, (0..5).map(TripleId).collect::<Vec<_>>());
        assert!(sub.truncated);
    }

    #[test]
    fn unknown_center_is_a_lookup_error() {
        let kg = kg_from("a\tr\tb\n");
        assert!(extract_k_hop(&kg, EntityId(99), 1, 10).is_err());
    }

    #[test]
    fn allowlist_keeps_only_listed_relations() {
        let kg = kg_from("m\tgenre\tcomedy\nm\tbudget\thigh\n");
        let m = kg.entity_by_label("m").unwrap();
        let sub = extract_k_hop(&kg, m, 1, 100).unwrap();
        let genre = RelationId(0);
        let allow: HashSet<RelationId> = [genre].into_iter().collect();
        let out = filter_relations(&kg, &sub, &profile_with(&[]), Some(&allow));
        assert!(out.applied);
        assert_eq!(out.subgraph.triples, vec![TripleId(0)]);
    }

    #[test]
    fn facet_tokens_match_tail_labels_case_folded() {
        let kg = kg_from("m\tgenre\tSci-Fi\nm\tbudget\thigh\n");
        let m = kg.entity_by_label("m").unwrap();
        let sub = extract_k_hop(&kg, m, 1, 100).unwrap();
        let out = filter_relations(&kg, &sub, &profile_with(&[("genre", "sci-fi")]), None);
        assert!(out.applied);
        assert_eq!(out.subgraph.triples, vec![TripleId(0)]);
    }

    #[test]
    fn no_match_returns_input_unchanged() {
        let kg = kg_from("m\tbudget\thigh\n");
        let m = kg.entity_by_label("m").unwrap();
        let sub = extract_k_hop(&kg, m, 1, 100).unwrap();
        let out = filter_relations(&kg, &sub, &profile_with(&[("genre", "comedy")]), None);
        assert!(!out.applied);
        assert_eq!(out.subgraph, sub);
    }

    /// Reference BFS oracle: frontier sets expanded one layer at a time, then
    /// a triple is reachable iff either endpoint sits within k-1 layers.
    fn bfs_oracle(kg: &KnowledgeGraph, center: EntityId, k: u32) -> HashSet<TripleId> {
        let mut within: HashSet<EntityId> = [center].into_iter().collect();
        for _ in 0..k.saturating_sub(1) {
            let mut next = within.clone();
            for &e in &within {
                for &tid in kg.incident(e) {
                    let t = kg.triple(tid).unwrap();
                    next.insert(t.head);
                    next.insert(t.tail);
                }
            }
            within = next;
        }
        if k == 0 {
            return HashSet::new();
        }
        let mut out = HashSet::new();
        for &e in &within {
            for &tid in kg.incident(e) {
                out.insert(tid);
            }
        }
        out
    }

    fn random_graph_lines(seed: u64, nodes: usize, edges: usize) -> String {
        let mut state = seed;
        let mut next = move || {
            state = crate::text::mix64(state);
            state
        };
        let mut lines = String::new();
        for _ in 0..edges {
            let a = next() as usize % nodes;
            let b = next() as usize % nodes;
            let r = next() as usize % 5;
            lines.push_str(&format!("n{a}\trel{r}\tn{b}\n"));
        }
        lines
    }

    #[test]
    fn extraction_matches_reference_bfs_on_random_graphs() {
        for seed in 0..10u64 {
            let kg = kg_from(&random_graph_lines(seed * 31 + 1, 40, 120));
            let center = EntityId(0);
            for k in 0..=4 {
                let sub = extract_k_hop(&kg, center, k, usize::MAX).unwrap();
                let got: HashSet<TripleId> = sub.triples.iter().copied().collect();
                assert_eq!(got, bfs_oracle(&kg, center, k), "seed {seed} k {k}");
                assert_eq!(got.len(), sub.triples.len(), "no duplicate triples");
            }
        }
    }

    proptest! {
        #[test]
        fn extraction_is_monotone_in_k(seed in 0u64..200, k in 0u32..4) {
            let kg = kg_from(&random_graph_lines(seed, 25, 60));
            let smaller = extract_k_hop(&kg, EntityId(0), k, usize::MAX).unwrap();
            let larger = extract_k_hop(&kg, EntityId(0), k + 1, usize::MAX).unwrap();
            let big: HashSet<TripleId> = larger.triples.iter().copied().collect();
            for t in &smaller.triples {
                prop_assert!(big.contains(t));
            }
        }

        #[test]
        fn filtering_is_a_subset_and_idempotent(seed in 0u64..100) {
            let kg = kg_from(&random_graph_lines(seed, 15, 40));
            let sub = extract_k_hop(&kg, EntityId(0), 2, usize::MAX).unwrap();
            let allow: HashSet<RelationId> = [RelationId(0), RelationId(3)].into_iter().collect();
            let profile = profile_with(&[]);
            let once = filter_relations(&kg, &sub, &profile, Some(&allow));
            let inset: HashSet<TripleId> = sub.triples.iter().copied().collect();
            for t in &once.subgraph.triples {
                prop_assert!(inset.contains(t));
            }
            let twice = filter_relations(&kg, &once.subgraph, &profile, Some(&allow));
            prop_assert_eq!(once.subgraph.triples, twice.subgraph.triples);
        }
    }

    #[test]
    fn reload_is_deterministic() {
        let lines = random_graph_lines(99, 30, 80);
        let a = kg_from(&lines);
        let b = kg_from(&lines);
        assert_eq!(a.triple_count(), b.triple_count());
        for i in 0..a.triple_count() {
            let (ta, tb) = (&a.triples[i], &b.triples[i]);
            assert_eq!(
                (ta.head, ta.relation, ta.tail),
                (tb.head, tb.relation, tb.tail)
            );
        }
        let e = EntityId(0);
        assert_eq!(
            extract_k_hop(&a, e, 3, 10).unwrap(),
            extract_k_hop(&b, e, 3, 10).unwrap()
        );
    }
}
