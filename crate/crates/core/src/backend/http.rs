//! HTTP backend adapting a JSON model server.
//!
//! Endpoints relative to the configured base URL:
//! - `POST /complete` `{"prompt", "seed", "max_length"}` -> `{"text"}`
//! - `POST /embed` `{"text"}` -> `{"embedding": [f64, ...]}`
//! - `POST /entail` `{"premise", "hypothesis"}` -> `{"entailed": bool}`
//!
//! Coherence judgments go through `/complete` with the coherence prompt; the
//! reply's integer is clamped to 1..=5. Failed calls are retried at most once
//! when configured.

use std::time::Duration;

use serde_json::{json, Value};

use super::{parse_judge_score, prompts, Backend, CompletionRequest};
use crate::error::{Error, Result};
use crate::index::Vector;

pub struct HttpBackend {
    agent: ureq::Agent,
    base: String,
    timeout: Duration,
    retry: bool,
    seed: u64,
}

impl HttpBackend {
    pub fn new(endpoint: String, timeout: Duration, retry: bool, seed: u64) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        HttpBackend {
            agent: config.new_agent(),
            base: endpoint.trim_end_matches('/').to_string(),
            timeout,
            retry,
            seed,
        }
    }

    fn post(&self, path: &str, body: &Value) -> Result<Value> {
        let url = format!("{}/{}", self.base, path);
        let attempt = || -> Result<Value> {
            let mut resp = self.agent.post(&url).send_json(body).map_err(|e| match e {
                ureq::Error::Timeout(_) => Error::Timeout(self.timeout),
                other => Error::Backend(format!("{url}: {other}")),
            })?;
            let status = resp.status();
            if !status.is_success() {
                return Err(Error::Backend(format!("{url}: status {status}")));
            }
            resp.body_mut()
                .read_json::<Value>()
                .map_err(|e| Error::Backend(format!("{url}: invalid JSON response: {e}")))
        };
        match attempt() {
            Ok(v) => Ok(v),
            Err(first) => {
                if self.retry {
                    attempt().map_err(|_| first)
                } else {
                    Err(first)
                }
            }
        }
    }

    fn field<'a>(value: &'a Value, name: &str) -> Result<&'a Value> {
        value
            .get(name)
            .ok_or_else(|| Error::Backend(format!("response missing field {name:?}")))
    }
}

impl Backend for HttpBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        req.validate()?;
        let body = json!({
            "prompt": req.prompt,
            "seed": req.seed,
            "max_length": req.max_length,
        });
        let reply = self.post("complete", &body)?;
        Ok(Self::field(&reply, "text")?
            .as_str()
            .ok_or_else(|| Error::Backend("field `text` is not a string".into()))?
            .to_string())
    }

    fn embed(&self, text: &str) -> Result<Vector> {
        let reply = self.post("embed", &json!({ "text": text }))?;
        let comps = Self::field(&reply, "embedding")?
            .as_array()
            .ok_or_else(|| Error::Backend("field `embedding` is not an array".into()))?
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| Error::Backend("non-numeric embedding component".into()))
            })
            .collect::<Result<Vec<f64>>>()?;
        Vector::new(comps)
    }

    fn nli_entails(&self, claim: &str, evidence: &str) -> Result<bool> {
        let body = json!({ "premise": evidence, "hypothesis": claim });
        let reply = self.post("entail", &body)?;
        Self::field(&reply, "entailed")?
            .as_bool()
            .ok_or_else(|| Error::Backend("field `entailed` is not a boolean".into()))
    }

    fn judge_coherence(&self, explanation: &str, detailed: bool) -> Result<u8> {
        let prompt = prompts::coherence_prompt(explanation, detailed);
        let reply = self.complete(&CompletionRequest::new(prompt, self.seed))?;
        parse_judge_score(&reply)
    }

    fn parallelism(&self) -> usize {
        4
    }
}
