//! Feedback from a remote multimodal model over a chat-completions API.

use std::time::Duration;

use base64::Engine;
use quadcoach_core::feedback::{FeedbackProvider, PromptBundle, ProviderError};
use reqwest::StatusCode;
use serde_json::{json, Value};

use crate::config::ProviderConfig;

pub struct ExternalProvider {
    config: ProviderConfig,
    credential: Option<String>,
}

impl ExternalProvider {
    pub fn new(config: ProviderConfig, credential: Option<String>) -> Self {
        Self { config, credential }
    }

    /// Reads the credential from the configured environment variable.
    pub fn from_env(config: ProviderConfig) -> Self {
        let credential = std::env::var(&config.credential_env)
            .ok()
            .filter(|c| !c.is_empty());
        Self::new(config, credential)
    }

    /// Request body: system instructions, then the prompt text with the
    /// trajectory image attached as a base64 SVG data URL.
    pub fn request_body(&self, prompt: &PromptBundle) -> Value {
        let mut content = vec![json!({ "type": "text", "text": prompt.to_text() })];
        if let Some(svg) = &prompt.trajectory_image {
            let encoded = base64::engine::general_purpose::STANDARD.encode(svg.as_bytes());
            content.push(json!({
                "type": "image_url",
                "image_url": { "url": format!("data:image/svg+xml;base64,{encoded}") },
            }));
        }
        json!({
            "model": self.config.model,
            "max_tokens": self.config.max_tokens,
            "messages": [
                { "role": "system", "content": prompt.element_instructions },
                { "role": "user", "content": content },
            ],
        })
    }
}

impl FeedbackProvider for ExternalProvider {
    fn id(&self) -> &str {
        "external"
    }

    /// Blocking; call it off the async runtime.
    fn generate(&self, prompt: &PromptBundle) -> Result<String, ProviderError> {
        let credential = self
            .credential
            .as_deref()
            .ok_or_else(|| ProviderError::Unauthorized("no credential configured".into()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(self.config.timeout_secs))
            .build()
            .map_err(|e| ProviderError::Unavailable(e.to_string()))?;
        let response = client
            .post(&self.config.endpoint)
            .bearer_auth(credential)
            .json(&self.request_body(prompt))
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    ProviderError::Timeout
                } else {
                    ProviderError::Unavailable(e.to_string())
                }
            })?;
        match response.status() {
            s if s.is_success() => {}
            s @ (StatusCode::UNAUTHORIZED | StatusCode::FORBIDDEN) => {
                return Err(ProviderError::Unauthorized(s.to_string()));
            }
            s => return Err(ProviderError::Unavailable(s.to_string())),
        }
        let body: Value = response.json().map_err(|e| {
            if e.is_timeout() {
                ProviderError::Timeout
            } else {
                ProviderError::Unavailable(e.to_string())
            }
        })?;
        let text = body["choices"][0]["message"]["content"]
            .as_str()
            .unwrap_or_default()
            .trim();
        if text.is_empty() {
            return Err(ProviderError::Empty);
        }
        Ok(text.to_owned())
    }
}
