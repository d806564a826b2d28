use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::prompt::PromptBundle;
use super::templates::TemplateProvider;

/// Tries per provider before falling back: one call plus one retry.
pub const MAX_ATTEMPTS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProviderError {
    #[error("request timed out")]
    Timeout,
    #[error("authentication failed: {0}")]
    Unauthorized(String),
    #[error("provider unavailable: {0}")]
    Unavailable(String),
    #[error("provider returned no text")]
    Empty,
}

impl ProviderError {
    fn retryable(&self) -> bool {
        !matches!(self, ProviderError::Unauthorized(_))
    }
}

/// Turns a prompt bundle into a feedback paragraph.
pub trait FeedbackProvider {
    fn id(&self) -> &str;
    fn generate(&self, prompt: &PromptBundle) -> Result<String, ProviderError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackText {
    pub body: String,
    /// Provider that wrote `body`.
    pub provider_id: String,
    /// Set when `provider` failed and the template provider stood in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl FeedbackText {
    pub fn is_fallback(&self) -> bool {
        self.fallback_from.is_some()
    }
}

/// Asks `provider` for feedback, retrying once on transient errors, and
/// falls back to `fallback` if it still fails or returns blank text.
pub fn generate_feedback(
    prompt: &PromptBundle,
    provider: &dyn FeedbackProvider,
    fallback: &TemplateProvider,
) -> FeedbackText {
    let mut last_error = ProviderError::Empty;
    for _ in 0..MAX_ATTEMPTS {
        match provider.generate(prompt) {
            Ok(body) if !body.trim().is_empty() => {
                return FeedbackText {
                    body: body.trim().into(),
                    provider_id: provider.id().into(),
                    fallback_from: None,
                    error: None,
                };
            }
            Ok(_) => last_error = ProviderError::Empty,
            Err(e) => {
                let stop = !e.retryable();
                last_error = e;
                if stop {
                    break;
                }
            }
        }
    }
    let body = fallback.generate(prompt).unwrap_or_default();
    FeedbackText {
        body,
        provider_id: TemplateProvider::ID.into(),
        fallback_from: Some(provider.id().into()),
        error: Some(last_error.to_string()),
    }
}
