//! Single abstraction for all model calls: text completion, embedding,
//! entailment judgment, and coherence judgment.
//!
//! Two implementations ship: a seeded [`MockBackend`] whose every operation is
//! a pure function of its arguments (full pipeline runs with it are
//! byte-reproducible), and an [`HttpBackend`] adapting any JSON model server.
//!
//! Environment variables: `MATRAG_BACKEND=mock|http`, `MATRAG_ENDPOINT`,
//! `MATRAG_SEED`.

mod http;
mod mock;
pub mod prompts;

use std::time::Duration;

pub use http::HttpBackend;
pub use mock::MockBackend;

use crate::error::{Error, Result};
use crate::index::Vector;

/// A completion call. The mock ignores `temperature`.
#[derive(Debug, Clone)]
pub struct CompletionRequest {
    pub prompt: String,
    pub seed: u64,
    /// Output character budget; the mock trims at sentence boundaries.
    pub max_length: usize,
    pub temperature: f64,
}

impl CompletionRequest {
    pub fn new(prompt: impl Into<String>, seed: u64) -> Self {
        CompletionRequest {
            prompt: prompt.into(),
            seed,
            max_length: 4096,
            temperature: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.prompt.trim().is_empty() {
            return Err(Error::Validation(
                "completion prompt must be non-empty".into(),
            ));
        }
        Ok(())
    }
}

/// A model-call provider. Implementations are shareable across threads;
/// callers may issue concurrent requests up to [`Backend::parallelism`].
pub trait Backend: Send + Sync {
    /// Complete a prompt to text.
    fn complete(&self, req: &CompletionRequest) -> Result<String>;

    /// Embed text as a dense vector.
    fn embed(&self, text: &str) -> Result<Vector>;

    /// Whether `claim` is entailed by `evidence`.
    ///
    /// The mock rule: true iff every `[E:<id>]` tag in the claim also appears
    /// in the evidence string and at least one tag exists; untagged claims are
    /// never entailed.
    fn nli_entails(&self, claim: &str, evidence: &str) -> Result<bool>;

    /// Coherence of an explanation on a 1..=5 scale. `detailed` marks
    /// explanations whose mode calls for multiple sentences.
    fn judge_coherence(&self, explanation: &str, detailed: bool) -> Result<u8>;

    /// Concurrent-request limit this backend supports.
    fn parallelism(&self) -> usize {
        1
    }
}

/// Backend selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Mock,
    Http,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "mock" => Ok(BackendKind::Mock),
            "http" => Ok(BackendKind::Http),
            other => Err(Error::config(
                "backend.kind",
                format!("unknown kind {other:?}"),
            )),
        }
    }
}

/// Everything needed to construct a backend.
#[derive(Debug, Clone)]
pub struct BackendDescriptor {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub parallelism: usize,
    pub timeout: Duration,
    pub seed: u64,
    /// Embedding dimension for the mock backend.
    pub dim: usize,
    /// Retry a failed HTTP call once.
    pub retry: bool,
}

impl BackendDescriptor {
    pub fn mock(seed: u64, dim: usize) -> Self {
        BackendDescriptor {
            kind: BackendKind::Mock,
            endpoint: None,
            model: None,
            parallelism: 1,
            timeout: Duration::from_secs(30),
            seed,
            dim,
            retry: false,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Backend>> {
        match self.kind {
            BackendKind::Mock => Ok(Box::new(MockBackend::new(self.seed, self.dim))),
            BackendKind::Http => {
                let endpoint = self.endpoint.clone().ok_or_else(|| {
                    Error::config("backend.endpoint", "http backend requires an endpoint")
                })?;
                Ok(Box::new(HttpBackend::new(
                    endpoint,
                    self.timeout,
                    self.retry,
                    self.seed,
                )))
            }
        }
    }
}

/// Parse a 1..=5 judge score out of free-form text, clamping out-of-range
/// integers into the scale.
pub(crate) fn parse_judge_score(reply: &str) -> Result<u8> {
    for token in reply.split(|c: char| !c.is_ascii_digit() && c != '-') {
        if token.is_empty() {
            continue;
        }
        if let Ok(value) = token.parse::<i64>() {
            return Ok(value.clamp(1, 5) as u8);
        }
    }
    Err(Error::Backend(format!(
        "unparseable coherence score in reply {reply:?}"
    )))
}
