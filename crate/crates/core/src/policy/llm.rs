//! Chat-completion backend.
//!
//! Sends the global prompt as a single user message to
//! `{base_url}/chat/completions` and returns the first choice's content.

use std::time::Duration;

use serde_json::{json, Value};

use super::{BackendError, BackendReply, PolicyBackend, PolicyRequest};
use crate::config::LlmConfig;

pub struct LlmPolicy {
    config: LlmConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl LlmPolicy {
    /// Reads the bearer token from the configured environment variable.
    pub fn from_env(config: LlmConfig) -> Self {
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        Self::with_key(config, api_key)
    }

    pub fn with_key(config: LlmConfig, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        LlmPolicy { config, api_key, agent }
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'))
    }

    fn body(&self, prompt: &str) -> Value {
        let mut body = json!({
            "model": self.config.model,
            "messages": [{ "role": "user", "content": prompt }],
        });
        if let Some(t) = self.config.temperature {
            body["temperature"] = json!(t);
        }
        body
    }

    fn attempt(&self, body: &Value) -> Result<String, AttemptError> {
        let mut req = self.agent.post(&self.endpoint());
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| AttemptError::Retryable(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| AttemptError::Retryable(e.to_string()))?;
        match status {
            200..=299 => {}
            429 | 500..=599 => return Err(AttemptError::Retryable(format!("HTTP {status}"))),
            _ => return Err(AttemptError::Fatal(format!("HTTP {status}: {}", truncate(&text, 200)))),
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| AttemptError::Fatal(format!("response is not JSON: {e}")))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| AttemptError::Fatal("response has no choices[0].message.content".into()))
    }
}

enum AttemptError {
    Retryable(String),
    Fatal(String),
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

impl PolicyBackend for LlmPolicy {
    fn name(&self) -> &str {
        "llm"
    }

    fn respond(&mut self, request: &PolicyRequest<'_>) -> Result<BackendReply, BackendError> {
        let body = self.body(request.prompt);
        let attempts = self.config.retries + 1;
        let mut last = String::new();
        for _ in 0..attempts {
            match self.attempt(&body) {
                Ok(text) => return Ok(BackendReply { text, rationale: None }),
                Err(AttemptError::Fatal(m)) => return Err(BackendError::Protocol(m)),
                Err(AttemptError::Retryable(m)) => last = m,
            }
        }
        Err(BackendError::Transport {
            attempts,
            message: last,
        })
    }
}
