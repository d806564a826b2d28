//! Feedback artifacts shown between trials.
//!
//! Every trial gets all three artifacts (summary table, generated text and
//! annotated trajectory image) whatever the participant's condition; the
//! condition only decides which of them are delivered.

mod payload;
mod prompt;
mod provider;
mod summary;
mod svg;
mod templates;
mod validate;

pub use payload::{payload_for, FeedbackArtifacts, FeedbackCondition, FeedbackPayload};
pub use prompt::{
    build_prompt, ImprovementContext, PromptBundle, PromptError, ELEMENT_INSTRUCTIONS,
};
pub use provider::{
    generate_feedback, FeedbackProvider, FeedbackText, ProviderError, MAX_ATTEMPTS,
};
pub use summary::{summarize, SummaryStats};
pub use svg::{render_trajectory_image, AnnotatedImage, ImageStyle};
pub use templates::{
    TemplateError, TemplatePack, TemplateProvider, DEFAULT_TEMPLATES, TEMPLATE_SLOTS,
};
pub use validate::{validate_elements, ElementCoverage, WORD_BUDGET};
