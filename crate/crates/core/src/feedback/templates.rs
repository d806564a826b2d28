use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use super::prompt::{ImprovementContext, PromptBundle};
use super::provider::{FeedbackProvider, ProviderError};
use crate::assessment::ImprovementArea;
use crate::sim::LandingOutcome;

/// The bundled template pack.
pub const DEFAULT_TEMPLATES: &str = include_str!("../../assets/templates.txt");

/// Slots every section defines, in output order.
pub const TEMPLATE_SLOTS: [&str; 5] =
    ["timely", "detail", "actionable", "reflection", "motivation"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: expected `slot = text`")]
    BadLine { line: usize },
    #[error("line {line}: slot outside of a section")]
    NoSection { line: usize },
    #[error("line {line}: unknown slot {slot:?}")]
    UnknownSlot { line: usize, slot: String },
    #[error("section [{section}] is missing slot {slot:?}")]
    MissingSlot { section: String, slot: &'static str },
    #[error("no section for {0:?}")]
    MissingArea(ImprovementArea),
}

#[derive(Debug, Clone, PartialEq)]
struct Section {
    area: ImprovementArea,
    outcome: Option<LandingOutcome>,
    slots: [String; 5],
}

/// Sentence templates keyed by improvement area.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplatePack {
    sections: Vec<Section>,
}

impl TemplatePack {
    pub fn parse(text: &str) -> Result<Self, TemplateError> {
        let mut sections: Vec<(String, Section, [bool; 5])> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
                let (area_name, outcome_name) = match name.split_once('/') {
                    Some((a, o)) => (a.trim(), Some(o.trim())),
                    None => (name.trim(), None),
                };
                let area = ImprovementArea::parse(area_name);
                let outcome = outcome_name.map(|o| match o {
                    "Safe" => Some(LandingOutcome::Safe),
                    "Unsafe" => Some(LandingOutcome::Unsafe),
                    "Crash" => Some(LandingOutcome::Crash),
                    _ => None,
                });
                let (Some(area), false) = (area, matches!(outcome, Some(None))) else {
                    return Err(TemplateError::UnknownSection {
                        line,
                        name: name.into(),
                    });
                };
                let section = Section {
                    area,
                    outcome: outcome.flatten(),
                    slots: Default::default(),
                };
                sections.push((name.into(), section, [false; 5]));
                continue;
            }
            let (slot, body) = content
                .split_once('=')
                .ok_or(TemplateError::BadLine { line })?;
            let (_, section, seen) = sections
                .last_mut()
                .ok_or(TemplateError::NoSection { line })?;
            let slot = slot.trim();
            let index = TEMPLATE_SLOTS
                .iter()
                .position(|s| *s == slot)
                .ok_or_else(|| TemplateError::UnknownSlot {
                    line,
                    slot: slot.into(),
                })?;
            section.slots[index] = body.trim().to_owned();
            seen[index] = true;
        }
        let mut out = Vec::with_capacity(sections.len());
        for (name, section, seen) in sections {
            if let Some(missing) = seen.iter().position(|s| !s) {
                return Err(TemplateError::MissingSlot {
                    section: name,
                    slot: TEMPLATE_SLOTS[missing],
                });
            }
            out.push(section);
        }
        let pack = Self { sections: out };
        for area in ImprovementArea::ALL {
            if !pack
                .sections
                .iter()
                .any(|s| s.area == area && s.outcome.is_none())
            {
                return Err(TemplateError::MissingArea(area));
            }
        }
        Ok(pack)
    }

    fn section(&self, area: ImprovementArea, outcome: LandingOutcome) -> &Section {
        self.sections
            .iter()
            .find(|s| s.area == area && s.outcome == Some(outcome))
            .or_else(|| {
                self.sections
                    .iter()
                    .find(|s| s.area == area && s.outcome.is_none())
            })
            .expect("parse guarantees a section per area")
    }

    /// Fills the matching section's slots from `context`.
    pub fn render(&self, context: &ImprovementContext) -> String {
        let section = self.section(context.area, context.outcome);
        let margin = match context.area {
            ImprovementArea::LandingSpeed | ImprovementArea::LandingAngle => {
                libm::fabs(context.robustness)
            }
            _ => context.robustness,
        };
        let values = [
            ("{duration}", format!("{:.1}", context.duration)),
            ("{speed}", format!("{:.1}", context.final_speed)),
            ("{angle}", format!("{:.1}", context.final_angle)),
            ("{margin}", format!("{margin:.1}")),
            ("{x}", format!("{:.0}", context.location.x)),
            ("{y}", format!("{:.0}", context.location.y)),
            ("{speed_limit}", format!("{}", context.speed_limit)),
            ("{angle_limit}", format!("{}", context.angle_limit)),
            ("{threshold}", format!("{}", context.efficiency_threshold)),
        ];
        let mut body = String::new();
        for slot in &section.slots {
            let mut sentence = slot.clone();
            for (key, value) in &values {
                if sentence.contains(key) {
                    sentence = sentence.replace(key, value);
                }
            }
            if !body.is_empty() {
                body.push(' ');
            }
            body.push_str(&sentence);
        }
        body
    }
}

impl Default for TemplatePack {
    fn default() -> Self {
        Self::parse(DEFAULT_TEMPLATES).expect("bundled templates parse")
    }
}

/// Deterministic provider backed by a [`TemplatePack`].
#[derive(Debug, Clone, Default)]
pub struct TemplateProvider {
    pack: TemplatePack,
}

impl TemplateProvider {
    pub const ID: &'static str = "template";

    pub fn new(pack: TemplatePack) -> Self {
        Self { pack }
    }

    pub fn pack(&self) -> &TemplatePack {
        &self.pack
    }
}

impl FeedbackProvider for TemplateProvider {
    fn id(&self) -> &str {
        Self::ID
    }

    fn generate(&self, prompt: &PromptBundle) -> Result<String, ProviderError> {
        Ok(self.pack.render(&prompt.improvement))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_pack_parses() {
        let pack = TemplatePack::default();
        assert_eq!(pack.sections.len(), 9);
    }

    #[test]
    fn pack_errors() {
        assert!(matches!(
            TemplatePack::parse("[Nope]\n"),
            Err(TemplateError::UnknownSection { line: 1, .. })
        ));
        assert!(matches!(
            TemplatePack::parse("[Efficiency/Sometimes]\n"),
            Err(TemplateError::UnknownSection { .. })
        ));
        assert_eq!(
            TemplatePack::parse("timely = hi"),
            Err(TemplateError::NoSection { line: 1 })
        );
        assert!(matches!(
            TemplatePack::parse("[Efficiency]\ntimely = a\n"),
            Err(TemplateError::MissingSlot { slot: "detail", .. })
        ));
        assert!(matches!(
            TemplatePack::parse("[Efficiency]\nmood = a\n"),
            Err(TemplateError::UnknownSlot { line: 2, .. })
        ));
        let one = "[Efficiency]\ntimely = a\ndetail = b\nactionable = c\nreflection = d\nmotivation = e\n";
        assert_eq!(
            TemplatePack::parse(one),
            Err(TemplateError::MissingArea(ImprovementArea::AvoidLeftEdge))
        );
    }
}
