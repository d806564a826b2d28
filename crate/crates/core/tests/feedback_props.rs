use std::cell::Cell;

use proptest::prelude::*;
use quadcoach_core::assessment::{AnnotationPoint, ImprovementArea};
use quadcoach_core::feedback::{
    payload_for, validate_elements, FeedbackCondition, FeedbackPayload, FeedbackProvider,
    ImprovementContext, PromptBundle, ProviderError, TemplatePack, TemplateProvider,
};
use quadcoach_core::sim::{run_episode, LandingOutcome, PilotProfile, SimConfig};
use quadcoach_core::stl::SpecSet;
use quadcoach_core::{evaluate_trial, PipelineConfig};

fn arb_profile() -> impl Strategy<Value = PilotProfile> {
    (
        0.0..1250.0f64,
        60.0..650.0f64,
        prop_oneof![Just(0.0), 2.0..28.0f64],
        -14.0..14.0f64,
    )
        .prop_map(
            |(target_x, cruise_altitude, descent_speed, touchdown_tilt)| PilotProfile {
                target_x,
                cruise_altitude,
                descent_speed,
                touchdown_tilt,
                ..PilotProfile::centered(&SimConfig::default())
            },
        )
}

fn arb_context() -> impl Strategy<Value = ImprovementContext> {
    (
        prop::sample::select(ImprovementArea::ALL.to_vec()),
        prop::sample::select(vec![
            LandingOutcome::Safe,
            LandingOutcome::Unsafe,
            LandingOutcome::Crash,
        ]),
        0.0..120.0f64,
        0.0..32.0f64,
        0.0..29.0f64,
        -650.0..1210.0f64,
        (0.0..1210.0f64, 0.0..575.0f64, 0usize..6001),
    )
        .prop_map(
            |(
                area,
                outcome,
                duration,
                final_speed,
                final_angle,
                robustness,
                (x, y, step_index),
            )| {
                ImprovementContext {
                    area,
                    outcome,
                    duration,
                    final_speed,
                    final_angle,
                    component: "l3".into(),
                    robustness,
                    location: AnnotationPoint { x, y, step_index },
                    speed_limit: 15.0,
                    angle_limit: 5.0,
                    efficiency_threshold: 45.0,
                    detail: String::new(),
                }
            },
        )
}

struct Failing {
    calls: Cell<usize>,
    error: ProviderError,
}

impl FeedbackProvider for Failing {
    fn id(&self) -> &str {
        "failing"
    }

    fn generate(&self, _: &PromptBundle) -> Result<String, ProviderError> {
        self.calls.set(self.calls.get() + 1);
        Err(self.error.clone())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn every_template_covers_all_elements(context in arb_context()) {
        let text = TemplatePack::default().render(&context);
        let coverage = validate_elements(&text);
        prop_assert!(coverage.all(), "{:?} missing in: {}", coverage, text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pipeline_artifacts_are_consistent(profile in arb_profile()) {
        let config = PipelineConfig::default();
        let traj = run_episode(&profile.fly(&config.sim), &config.sim);
        let provider = TemplateProvider::default();
        let eval = evaluate_trial(&traj, &SpecSet::table1(), &config, &provider, &provider).unwrap();
        let art = &eval.artifacts;

        // the highlight circle sits inside the footprint of the annotated sample
        let s = traj.samples[art.annotation.step_index];
        let c = art.image.circle;
        prop_assert_eq!(c.step_index, art.annotation.step_index);
        prop_assert!(c.x > s.x && c.x < s.x + config.sim.drone_width);
        prop_assert!(c.y > s.y && c.y < s.y + config.sim.drone_height);

        prop_assert!(validate_elements(&art.text.body).all());
        prop_assert_eq!(art.summary.outcome, eval.report.outcome);
        prop_assert_eq!(eval.prompt.trajectory_image.as_deref(), Some(art.image.svg.as_str()));

        // rendering is a pure function of its inputs
        let again = evaluate_trial(&traj, &SpecSet::table1(), &config, &provider, &provider).unwrap();
        prop_assert_eq!(&again, &eval);

        for condition in FeedbackCondition::ALL {
            let payload = payload_for(condition, art);
            prop_assert_eq!(payload.condition(), condition);
            let json = serde_json::to_value(&payload).unwrap();
            let has_text = json.get("text").is_some();
            let has_image = json.get("image_svg").is_some();
            prop_assert_eq!((has_text, has_image), match condition {
                FeedbackCondition::Baseline => (false, false),
                FeedbackCondition::Text => (true, false),
                FeedbackCondition::Multimodal => (true, true),
            });
        }
    }
}

#[test]
fn failing_provider_falls_back_to_templates() {
    let config = PipelineConfig::default();
    let traj = run_episode(
        &PilotProfile::centered(&config.sim).fly(&config.sim),
        &config.sim,
    );
    let fallback = TemplateProvider::default();

    let flaky = Failing {
        calls: Cell::new(0),
        error: ProviderError::Timeout,
    };
    let eval = evaluate_trial(&traj, &SpecSet::table1(), &config, &flaky, &fallback).unwrap();
    assert_eq!(flaky.calls.get(), 2);
    let text = &eval.artifacts.text;
    assert_eq!(text.provider_id, TemplateProvider::ID);
    assert_eq!(text.fallback_from.as_deref(), Some("failing"));
    assert!(validate_elements(&text.body).all());

    // bad credentials are not retried
    let denied = Failing {
        calls: Cell::new(0),
        error: ProviderError::Unauthorized("401".into()),
    };
    let eval = evaluate_trial(&traj, &SpecSet::table1(), &config, &denied, &fallback).unwrap();
    assert_eq!(denied.calls.get(), 1);
    assert!(eval.artifacts.text.is_fallback());
}

#[test]
fn baseline_payload_is_the_summary_table() {
    let config = PipelineConfig::default();
    let traj = run_episode(
        &PilotProfile::centered(&config.sim).fly(&config.sim),
        &config.sim,
    );
    let provider = TemplateProvider::default();
    let eval = evaluate_trial(&traj, &SpecSet::table1(), &config, &provider, &provider).unwrap();
    match payload_for(FeedbackCondition::Baseline, &eval.artifacts) {
        FeedbackPayload::Baseline { summary } => {
            assert_eq!(summary.outcome, LandingOutcome::Safe);
            assert!(summary.score > 0);
        }
        other => panic!("unexpected payload {other:?}"),
    }
}
