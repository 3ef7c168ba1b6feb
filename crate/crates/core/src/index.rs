//! Dense vectors, exact top-K cosine retrieval, subgraph verbalization and
//! embedding, and vector-file persistence.
//!
//! Persistence format: header line `dim=<d>`, then one
//! `<key>\t<c1>,<c2>,...` line per entry. Components are written in Rust's
//! shortest round-trip decimal form, which preserves well over 9 significant
//! digits.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::backend::Backend;
use crate::error::{Error, Result};
use crate::kg::{KnowledgeGraph, Subgraph};

/// A fixed-dimension embedding vector with finite components.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    components: Vec<f64>,
}

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Validation("vector must have dimension >= 1".into()));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation("vector components must be finite".into()));
        }
        Ok(Vector { components })
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Componentwise mean of several vectors of equal dimension.
    pub fn mean(vectors: &[Vector]) -> Result<Vector> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::Validation("mean of zero vectors".into()))?;
        let dim = first.dimension();
        let mut acc = vec![0.0; dim];
        for v in vectors {
            if v.dimension() != dim {
                return Err(Error::Validation(format!(
                    "dimension mismatch in mean: {} vs {}",
                    v.dimension(),
                    dim
                )));
            }
            for (a, c) in acc.iter_mut().zip(v.components()) {
                *a += c;
            }
        }
        let n = vectors.len() as f64;
        Vector::new(acc.into_iter().map(|a| a / n).collect())
    }
}

/// Cosine similarity of two equal-dimension, nonzero-norm vectors.
pub fn cosine(a: &Vector, b: &Vector) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::Validation(format!(
            "cosine dimension mismatch: {} vs {}",
            a.dimension(),
            b.dimension()
        )));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Validation("cosine of zero-norm vector".into()));
    }
    let dot: f64 = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| x * y)
        .sum();
    Ok(dot / (na * nb))
}

/// A retrieved subgraph with its similarity and rank bookkeeping.
///
/// `retrieval_rank` is the 1-based position under descending similarity with
/// ties broken by ascending key; `rerank_rank` is the 1-based position after
/// the backend rerank pass, when one ran.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSubgraph {
    pub subgraph: Subgraph,
    /// Cosine similarity to the query, in [-1, 1]; 0.0 for no-evidence
    /// fallbacks.
    pub similarity: f64,
    pub retrieval_rank: usize,
    pub rerank_rank: Option<usize>,
}

/// Exact-scan vector index with unique keys and a single dimension.
///
/// Immutable after build; concurrent `top_k` queries are safe. Exact scan is
/// intentional: desk-scale corpora keep it tractable and oracle-testable, and
/// the interface leaves room for an ANN drop-in.
#[derive(Debug, Clone, Default)]
pub struct VectorIndex {
    entries: Vec<(String, Vector)>,
    keys: HashSet<String>,
}

impl VectorIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.entries.first().map(|(_, v)| v.dimension())
    }

    pub fn insert(&mut self, key: impl Into<String>, vector: Vector) -> Result<()> {
        let key = key.into();
        if key.contains('\t') || key.contains('\n') {
            return Err(Error::Validation(format!(
                "index key {key:?} contains tab or newline"
            )));
        }
        if self.keys.contains(&key) {
            return Err(Error::Validation(format!("duplicate index key {key:?}")));
        }
        if let Some(dim) = self.dimension() {
            if vector.dimension() != dim {
                return Err(Error::Validation(format!(
                    "vector dimension {} does not match index dimension {dim}",
                    vector.dimension()
                )));
            }
        }
        if vector.norm() == 0.0 {
            return Err(Error::Validation(format!(
                "zero-norm vector for key {key:?}"
            )));
        }
        self.keys.insert(key.clone());
        self.entries.push((key, vector));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Vector> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    /// Write the index to the vector-file format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!("dim={}\n", self.dimension().unwrap_or(0)));
        for (key, v) in &self.entries {
            let comps: Vec<String> = v.components().iter().map(|c| format!("{c}")).collect();
            out.push_str(&format!("{key}\t{}\n", comps.join(",")));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Load an index from the vector-file format.
    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let source = path.display().to_string();
        let mut lines = content.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(&source, 1, "missing `dim=<d>` header"))?;
        let dim: usize = header
            .strip_prefix("dim=")
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| Error::parse(&source, 1, "malformed `dim=<d>` header"))?;
        let mut index = VectorIndex::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (key, rest) = line.split_once('\t').ok_or_else(|| {
                Error::parse(&source, lineno + 1, "expected `<key>\\t<components>`")
            })?;
            let comps: std::result::Result<Vec<f64>, _> =
                rest.split(',').map(|c| c.trim().parse::<f64>()).collect();
            let comps = comps
                .map_err(|e| Error::parse(&source, lineno + 1, format!("bad component: {e}")))?;
            if comps.len() != dim {
                return Err(Error::parse(
                    &source,
                    lineno + 1,
                    format!("expected {dim} components, found {}", comps.len()),
                ));
            }
            index.insert(key, Vector::new(comps)?)?;
        }
        Ok(index)
    }
}

/// The exact K entries most cosine-similar to `query`, descending similarity,
/// ties broken by ascending key. Returns all entries when K exceeds the index
/// size.
pub fn top_k(index: &VectorIndex, query: &Vector, k: usize) -> Result<Vec<(String, f64)>> {
    let mut scored = Vec::with_capacity(index.len());
    for (key, v) in &index.entries {
        let sim = cosine(query, v)?;
        scored.push((key.clone(), sim));
    }
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("cosine values are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(k);
    Ok(scored)
}

/// Embed non-empty text through the backend.
pub fn embed_text(backend: &dyn Backend, text: &str) -> Result<Vector> {
    if text.trim().is_empty() {
        return Err(Error::Validation("cannot embed empty text".into()));
    }
    backend.embed(text)
}

/// Render one triple as `<head label> <relation label> <tail label>`.
pub fn verbalize_triple(kg: &KnowledgeGraph, id: crate::kg::TripleId) -> Result<String> {
    let t = kg.triple(id)?;
    Ok(format!(
        "{} {} {}",
        kg.entity_label(t.head),
        kg.relation_label(t.relation),
        kg.entity_label(t.tail)
    ))
}

/// Verbalize a subgraph: one clause per triple in subgraph order, joined by
/// `"; "`. A zero-triple subgraph verbalizes to its center's label.
pub fn verbalize_subgraph(kg: &KnowledgeGraph, sub: &Subgraph) -> Result<String> {
    if sub.triples.is_empty() {
        return Ok(match sub.center {
            Some(c) => kg.entity_label(c).to_string(),
            None => "(no evidence)".to_string(),
        });
    }
    let clauses: Result<Vec<String>> = sub
        .triples
        .iter()
        .map(|&id| verbalize_triple(kg, id))
        .collect();
    Ok(clauses?.join("; "))
}

/// Embed a subgraph as the componentwise mean of its per-triple text
/// embeddings; a zero-triple subgraph embeds its center's label. The
/// summation runs in ascending triple-id order regardless of the subgraph's
/// ordering, so permuting triples yields the bit-identical vector.
pub fn embed_subgraph(
    backend: &dyn Backend,
    kg: &KnowledgeGraph,
    sub: &Subgraph,
) -> Result<Vector> {
    if sub.triples.is_empty() {
        let label = match sub.center {
            Some(c) => kg.entity_label(c).to_string(),
            None => "(no evidence)".to_string(),
        };
        return embed_text(backend, &label);
    }
    let mut ids = sub.triples.clone();
    ids.sort_unstable();
    let vectors: Result<Vec<Vector>> = ids
        .iter()
        .map(|&id| embed_text(backend, &verbalize_triple(kg, id)?))
        .collect();
    Vector::mean(&vectors?)
}
