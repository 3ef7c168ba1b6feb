//! Pipeline configuration: file paths, hyperparameters, backend selection,
//! and ablation switches. Loaded from a JSON file; every hyperparameter is
//! overridable by a same-named CLI flag (flag beats file beats default), and
//! the backend can be forced through `MATRAG_BACKEND` / `MATRAG_ENDPOINT` /
//! `MATRAG_SEED`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::agents::ScoreWeights;
use crate::backend::{BackendDescriptor, BackendKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PathsConfig {
    pub interactions: Option<PathBuf>,
    pub triples: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
    /// Precomputed slice vectors; written by `embed`, read when present.
    pub vectors: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparameters {
    /// Dense-retrieval depth K.
    pub retrieval_k: usize,
    /// Rerank depth N.
    pub rerank_n: usize,
    /// Evidence neighborhood radius.
    pub k_hop: u32,
    /// Candidate pool size.
    pub candidate_pool: usize,
    /// Hybrid score weight on the collaborative signal.
    pub alpha: f64,
    /// Hybrid score weight on the content signal.
    pub beta: f64,
    /// Hybrid score weight on the model signal.
    pub gamma: f64,
    /// Transparency weight on faithfulness.
    pub w_faith: f64,
    /// Transparency weight on coherence.
    pub w_coher: f64,
    /// Transparency weight on personalization.
    pub w_pers: f64,
    /// Recency half-life, days.
    pub half_life_days: f64,
    /// Recent-history length L for the collaborative score.
    pub recent_history: usize,
    /// Neighborhood size cap.
    pub max_triples: usize,
    /// Sampled negatives per positive in evaluation.
    pub negatives: usize,
    /// Train/valid/test split ratios.
    pub split_ratios: (f64, f64, f64),
    /// Global seed for the mock backend, sampling, and jitter.
    pub seed: u64,
    /// Embedding dimension for the mock backend.
    pub embed_dim: usize,
    /// Ratings at or above this are positive.
    pub positive_threshold: f64,
    /// Enable maximal-marginal-relevance diversity re-ranking.
    pub mmr_enabled: bool,
    /// MMR relevance/diversity trade-off.
    pub mmr_lambda: f64,
    /// Component-score spread that triggers a conflict warning in the trace.
    pub conflict_spread: f64,
    /// Fraction of evaluation rows whose top recommendation also gets an
    /// explanation and transparency score.
    pub explanation_fraction: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            retrieval_k: 10,
            rerank_n: 5,
            k_hop: 2,
            candidate_pool: 100,
            alpha: 0.3,
            beta: 0.3,
            gamma: 0.4,
            w_faith: 0.5,
            w_coher: 0.25,
            w_pers: 0.25,
            half_life_days: 90.0,
            recent_history: 10,
            max_triples: 64,
            negatives: 99,
            split_ratios: (0.8, 0.1, 0.1),
            seed: 42,
            embed_dim: 768,
            positive_threshold: 4.0,
            mmr_enabled: false,
            mmr_lambda: 0.7,
            conflict_spread: 0.6,
            explanation_fraction: 0.0,
        }
    }
}

impl Hyperparameters {
    pub fn score_weights(&self) -> ScoreWeights {
        ScoreWeights {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
        }
    }

    pub fn transparency_weights(&self) -> (f64, f64, f64) {
        (self.w_faith, self.w_coher, self.w_pers)
    }

    pub fn half_life_secs(&self) -> f64 {
        self.half_life_days * 86_400.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub parallelism: usize,
    pub timeout_secs: u64,
    /// Retry a failed HTTP call once.
    pub retry: bool,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Mock,
            endpoint: None,
            model: None,
            parallelism: 1,
            timeout_secs: 30,
            retry: false,
        }
    }
}

/// Ablation switches mirroring the framework's component-removal variants.
/// Each flag removes exactly one module's contribution.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AblationFlags {
    /// Skip profile construction (empty profile).
    pub disable_user_agent: bool,
    /// Skip item analysis entirely (no evidence retrieval).
    pub disable_item_agent: bool,
    /// Drop the hybrid: rank by the model preference alone.
    pub disable_reasoning_hybrid: bool,
    /// Emit the rendered chain instead of generated explanation text.
    pub disable_explanation: bool,
    /// Route item analysis to the no-evidence fallback.
    pub disable_kg: bool,
    /// Skip transparency scoring (nulls in the response).
    pub disable_transparency: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    pub hyperparameters: Hyperparameters,
    pub backend: BackendConfig,
    pub ablation: AblationFlags,
}

impl PipelineConfig {
    /// Load a JSON config file and validate it.
    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: PipelineConfig = serde_json::from_str(&content)
            .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        config.apply_env();
        config.validate()?;
        Ok(config)
    }

    /// Apply `MATRAG_BACKEND`, `MATRAG_ENDPOINT`, `MATRAG_SEED` overrides.
    pub fn apply_env(&mut self) {
        if let Ok(kind) = std::env::var("MATRAG_BACKEND") {
            if let Ok(parsed) = kind.parse() {
                self.backend.kind = parsed;
            }
        }
        if let Ok(endpoint) = std::env::var("MATRAG_ENDPOINT") {
            if !endpoint.is_empty() {
                self.backend.endpoint = Some(endpoint);
            }
        }
        if let Ok(seed) = std::env::var("MATRAG_SEED") {
            if let Ok(parsed) = seed.parse() {
                self.hyperparameters.seed = parsed;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let h = &self.hyperparameters;
        let simplex = |name: &str, values: [f64; 3]| -> Result<()> {
            if values.iter().any(|v| *v < 0.0) {
                return Err(Error::config(name, "weights must be non-negative"));
            }
            let sum: f64 = values.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::config(
                    name,
                    format!("weights must sum to 1, got {sum}"),
                ));
            }
            Ok(())
        };
        simplex(
            "hyperparameters.alpha/beta/gamma",
            [h.alpha, h.beta, h.gamma],
        )?;
        simplex(
            "hyperparameters.w_faith/w_coher/w_pers",
            [h.w_faith, h.w_coher, h.w_pers],
        )?;
        simplex(
            "hyperparameters.split_ratios",
            [h.split_ratios.0, h.split_ratios.1, h.split_ratios.2],
        )?;
        if h.rerank_n < 1 || h.retrieval_k < h.rerank_n {
            return Err(Error::config(
                "hyperparameters.retrieval_k",
                format!(
                    "need retrieval_k >= rerank_n >= 1, got K={} N={}",
                    h.retrieval_k, h.rerank_n
                ),
            ));
        }
        if h.candidate_pool < 1 {
            return Err(Error::config(
                "hyperparameters.candidate_pool",
                "must be >= 1",
            ));
        }
        if h.embed_dim < 1 {
            return Err(Error::config("hyperparameters.embed_dim", "must be >= 1"));
        }
        if h.half_life_days <= 0.0 {
            return Err(Error::config(
                "hyperparameters.half_life_days",
                "must be > 0",
            ));
        }
        if !(0.0..=1.0).contains(&h.mmr_lambda) {
            return Err(Error::config(
                "hyperparameters.mmr_lambda",
                "must be in [0,1]",
            ));
        }
        if !(0.0..=1.0).contains(&h.explanation_fraction) {
            return Err(Error::config(
                "hyperparameters.explanation_fraction",
                "must be in [0,1]",
            ));
        }
        if self.backend.kind == BackendKind::Http && self.backend.endpoint.is_none() {
            return Err(Error::config(
                "backend.endpoint",
                "required for the http backend",
            ));
        }
        if self.backend.parallelism < 1 {
            return Err(Error::config("backend.parallelism", "must be >= 1"));
        }
        // input paths must resolve at load; `vectors` is an output and may
        // not exist yet
        for (field, path) in [
            ("paths.interactions", &self.paths.interactions),
            ("paths.triples", &self.paths.triples),
            ("paths.attributes", &self.paths.attributes),
            ("paths.aliases", &self.paths.aliases),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(Error::config(
                        field,
                        format!("path {} not found", p.display()),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn backend_descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            kind: self.backend.kind,
            endpoint: self.backend.endpoint.clone(),
            model: self.backend.model.clone(),
            parallelism: self.backend.parallelism,
            timeout: Duration::from_secs(self.backend.timeout_secs),
            seed: self.hyperparameters.seed,
            dim: self.hyperparameters.embed_dim,
            retry: self.backend.retry,
        }
    }
}
