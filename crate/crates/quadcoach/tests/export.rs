mod support;

use std::fs;

use proptest::prelude::*;
use quadcoach::export::{
    export_dataset, exported_trajectory_name, import_rows, ExportError, ROWS_FILE, TRAJECTORY_DIR,
};
use quadcoach::formats::{read_rows, rows_to_string};
use quadcoach::replay::verify_store;
use quadcoach::service::SessionService;
use quadcoach::session::SessionEvent;
use quadcoach::store::Store;
use quadcoach_core::analysis::{SurveyResponse, TrialRow};
use quadcoach_core::feedback::FeedbackCondition;
use quadcoach_core::sim::{run_episode, ComponentSpecs, LandingOutcome, SimConfig};
use support::{crash_frames, safe_frames};

async fn twenty_trials(service: &SessionService) -> String {
    let id = service.create_session().await.unwrap().id;
    for n in 1..=20 {
        let frames = if n % 3 == 0 {
            crash_frames()
        } else {
            safe_frames()
        };
        service.run_trial(&id, frames).await.unwrap();
        if n % 2 == 0 {
            service.get_feedback(&id, n).await.unwrap();
            service
                .submit_survey(&id, n, SurveyResponse::uniform(4))
                .await
                .unwrap();
        }
    }
    id
}

#[tokio::test(flavor = "multi_thread")]
async fn export_is_complete_stable_and_importable() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path().join("data")).unwrap();
    let service = SessionService::builder(store.clone()).build().unwrap();
    let id = twenty_trials(&service).await;
    service.settle().await.unwrap();

    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let summary = export_dataset(&store, &a).unwrap();
    export_dataset(&store, &b).unwrap();
    assert_eq!(
        (summary.sessions, summary.rows, summary.trajectories),
        (1, 20, 20)
    );
    assert_eq!(
        fs::read(a.join(ROWS_FILE)).unwrap(),
        fs::read(b.join(ROWS_FILE)).unwrap()
    );
    for n in 1..=20 {
        let name = exported_trajectory_name(&id, n);
        let exported = fs::read(a.join(TRAJECTORY_DIR).join(&name)).unwrap();
        assert_eq!(
            exported,
            fs::read(b.join(TRAJECTORY_DIR).join(&name)).unwrap()
        );
        assert_eq!(
            exported,
            fs::read(store.trajectory_path(&id, &Store::trajectory_file(n))).unwrap()
        );
    }

    let rows = import_rows(&a).unwrap();
    assert_eq!(rows, service.export_rows().await.unwrap());
    assert_eq!(
        rows_to_string(&rows).as_bytes(),
        fs::read(a.join(ROWS_FILE)).unwrap()
    );
    assert_eq!(rows.iter().filter(|r| r.survey().is_some()).count(), 10);
    assert_eq!(
        rows.iter()
            .filter(|r| r.outcome == LandingOutcome::Crash)
            .count(),
        6
    );

    let first = fs::read_to_string(a.join(ROWS_FILE)).unwrap();
    let keys: Vec<String> = serde_json::from_str::<serde_json::Map<String, serde_json::Value>>(
        first.lines().next().unwrap(),
    )
    .unwrap()
    .keys()
    .cloned()
    .collect();
    let expected = [
        "session_id",
        "condition",
        "trial_index",
        "outcome",
        "duration",
        "feedback_time",
        "motivation",
        "manageable",
        "actionable",
        "timely",
        "reflection",
    ];
    let mut sorted = expected.map(String::from).to_vec();
    sorted.sort();
    assert_eq!(keys, sorted);
    let line = first.lines().next().unwrap();
    let positions: Vec<usize> = expected
        .iter()
        .map(|k| line.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(
        positions.windows(2).all(|w| w[0] < w[1]),
        "column order {line}"
    );

    let specs = ComponentSpecs::table1();
    assert!(verify_store(&store, &SimConfig::default(), &specs)
        .unwrap()
        .is_empty());
}

#[test]
fn empty_store_exports_empty_files() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path().join("data")).unwrap();
    let out = dir.path().join("out");
    let summary = export_dataset(&store, &out).unwrap();
    assert_eq!(
        (summary.sessions, summary.rows, summary.trajectories),
        (0, 0, 0)
    );
    assert_eq!(fs::read(out.join(ROWS_FILE)).unwrap(), b"");
    assert_eq!(fs::read_dir(out.join(TRAJECTORY_DIR)).unwrap().count(), 0);
    assert!(import_rows(&out).unwrap().is_empty());
}

#[test]
fn trial_without_artifacts_blocks_export() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path().join("data")).unwrap();
    store
        .create_session("s0001", FeedbackCondition::Text, 0.0)
        .unwrap();
    let sim = SimConfig::default();
    let trajectory = run_episode(&[], &sim);
    let file = store.write_trajectory("s0001", 1, &trajectory).unwrap();
    store
        .append("s0001", &SessionEvent::TrialStarted { index: 1, at: 1.0 })
        .unwrap();
    store
        .append(
            "s0001",
            &SessionEvent::TrialCompleted {
                index: 1,
                at: 2.0,
                inputs: trajectory.inputs(),
                trajectory_file: file,
                outcome: LandingOutcome::Crash,
                duration: trajectory.duration(),
                samples: trajectory.len(),
            },
        )
        .unwrap();
    let err = export_dataset(&store, &dir.path().join("out")).unwrap_err();
    assert!(
        matches!(err, ExportError::MissingArtifacts { ref session, index: 1 } if session == "s0001")
    );
}

#[tokio::test(flavor = "multi_thread")]
async fn tampered_trajectory_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path().join("data")).unwrap();
    let service = SessionService::builder(store.clone()).build().unwrap();
    let id = service.create_session().await.unwrap().id;
    service.run_trial(&id, safe_frames()).await.unwrap();
    service.run_trial(&id, safe_frames()).await.unwrap();
    service.settle().await.unwrap();

    let path = store.trajectory_path(&id, &Store::trajectory_file(2));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[40] = lines[40].replacen("\"x\":", "\"x\":1", 1);
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    let mismatches =
        verify_store(&store, &SimConfig::default(), &ComponentSpecs::table1()).unwrap();
    assert_eq!(mismatches.len(), 1);
    assert_eq!((mismatches[0].index, mismatches[0].line), (2, 41));
}

fn arb_row() -> impl Strategy<Value = TrialRow> {
    let outcome = prop_oneof![
        Just(LandingOutcome::Safe),
        Just(LandingOutcome::Unsafe),
        Just(LandingOutcome::Crash)
    ];
    let survey = proptest::option::of((1u8..=5, 1u8..=5, 1u8..=5, 1u8..=5, 1u8..=5, 0.0f64..600.0));
    (
        "[a-z0-9-]{1,12}",
        0usize..3,
        1u32..=20,
        outcome,
        0.0f64..=120.0,
        survey,
    )
        .prop_map(|(id, c, index, outcome, duration, survey)| {
            let row = TrialRow::new(id, FeedbackCondition::ALL[c], index, outcome, duration);
            match survey {
                Some((m, ma, a, t, r, time)) => row.with_survey(
                    SurveyResponse {
                        motivation: m,
                        manageable: ma,
                        actionable: a,
                        timely: t,
                        reflection: r,
                    },
                    time,
                ),
                None => row,
            }
        })
}

proptest! {
    #[test]
    fn rows_round_trip_through_files(rows in proptest::collection::vec(arb_row(), 0..40)) {
        let text = rows_to_string(&rows);
        let back = read_rows(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &rows);
        prop_assert_eq!(rows_to_string(&back), text);
    }
}
