use proptest::prelude::*;
use quadcoach_core::assessment::{
    annotation_point, assess, component_ranges, overall_score, select_improvement_area,
    AssessmentConfig, ImprovementArea, RobustnessReport, UNSAFE_WINDOW,
};
use quadcoach_core::sim::{
    run_episode, ComponentRobustness, LandingOutcome, PilotProfile, SimConfig, Trajectory,
    TrajectorySample,
};
use quadcoach_core::stl::{Footprint, SpecSet};

const EDGES: [ImprovementArea; 4] = [
    ImprovementArea::AvoidLeftEdge,
    ImprovementArea::AvoidRightEdge,
    ImprovementArea::AvoidBottomEdge,
    ImprovementArea::AvoidTopEdge,
];

#[derive(Debug, Clone)]
struct Case {
    outcome: LandingOutcome,
    /// First step at which each safety component reaches zero.
    contacts: [Option<usize>; 4],
    l3: f64,
    l4: f64,
    duration: f64,
}

fn arb_case() -> impl Strategy<Value = Case> {
    (
        prop::sample::select(vec![
            LandingOutcome::Safe,
            LandingOutcome::Unsafe,
            LandingOutcome::Crash,
        ]),
        prop::array::uniform4(prop::option::weighted(0.2, 0usize..30)),
        -17.0..15.0f64,
        -24.0..5.0f64,
        prop_oneof![0.0..120.0f64, Just(45.0)],
    )
        .prop_map(|(outcome, contacts, l3, l4, duration)| Case {
            outcome,
            contacts,
            l3,
            l4,
            duration,
        })
}

fn build(case: &Case) -> (RobustnessReport, Trajectory) {
    let samples = (0..30)
        .map(|i| {
            let mut rob = ComponentRobustness {
                s1: 5.0,
                s2: 5.0,
                s3: 5.0,
                s4: 5.0,
                ..Default::default()
            };
            let parts = [&mut rob.s1, &mut rob.s2, &mut rob.s3, &mut rob.s4];
            for (part, contact) in parts.into_iter().zip(case.contacts) {
                if contact.is_some_and(|c| i >= c) {
                    *part = 0.0;
                }
            }
            TrajectorySample {
                t: i as f64 * 0.02,
                x: 100.0,
                y: 100.0,
                vx: 0.0,
                vy: 0.0,
                phi: 0.0,
                throttle: 0.0,
                attitude: 0,
                rob,
            }
        })
        .collect();
    let s = |i: usize| if case.contacts[i].is_some() { 0.0 } else { 5.0 };
    let report = RobustnessReport {
        s1: s(0),
        s2: s(1),
        s3: s(2),
        s4: s(3),
        l1: 10.0,
        l2: 10.0,
        l3: case.l3,
        l4: case.l4,
        safety: 0.0,
        landing: case.l3.min(case.l4),
        full: 0.0,
        outcome: case.outcome,
        duration: case.duration,
        final_speed: 15.0 - case.l3,
        final_angle: 5.0 - case.l4,
    };
    (
        report,
        Trajectory {
            dt: 0.02,
            footprint: Footprint::default(),
            samples,
        },
    )
}

fn select(case: &Case) -> ImprovementArea {
    let (report, traj) = build(case);
    select_improvement_area(
        &report,
        &traj,
        &SimConfig::default(),
        &AssessmentConfig::default(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn edge_contact_outranks_everything(case in arb_case()) {
        let area = select(&case);
        let earliest = case.contacts.iter().enumerate().filter_map(|(i, c)| c.map(|c| (c, i))).min();
        match earliest {
            Some((_, edge)) => prop_assert_eq!(area, EDGES[edge]),
            None => prop_assert!(!area.is_edge()),
        }
    }

    #[test]
    fn unsafe_landing_outranks_duration(mut case in arb_case()) {
        case.contacts = [None; 4];
        case.outcome = LandingOutcome::Unsafe;
        let area = select(&case);
        prop_assert!(matches!(area, ImprovementArea::LandingSpeed | ImprovementArea::LandingAngle));
        // the worse violation relative to its negative range wins
        let speed = case.l3 / 17.0;
        let angle = case.l4 / 24.0;
        let expected = if speed < angle { ImprovementArea::LandingSpeed } else { ImprovementArea::LandingAngle };
        prop_assert_eq!(area, expected);
    }

    #[test]
    fn both_landing_margins_negative(l3 in -17.0..0.0f64, l4 in -24.0..0.0f64) {
        let case = Case { outcome: LandingOutcome::Unsafe, contacts: [None; 4], l3, l4, duration: 10.0 };
        let area = select(&case);
        if l3 / 17.0 < l4 / 24.0 {
            prop_assert_eq!(area, ImprovementArea::LandingSpeed);
        } else {
            prop_assert_eq!(area, ImprovementArea::LandingAngle);
        }
    }

    #[test]
    fn safe_landings_split_on_duration(mut case in arb_case()) {
        case.contacts = [None; 4];
        case.outcome = LandingOutcome::Safe;
        let expected = if case.duration > 45.0 { ImprovementArea::Efficiency } else { ImprovementArea::Smoothness };
        prop_assert_eq!(select(&case), expected);
    }

    #[test]
    fn crash_without_contact_is_efficiency(mut case in arb_case()) {
        case.contacts = [None; 4];
        case.outcome = LandingOutcome::Crash;
        prop_assert_eq!(select(&case), ImprovementArea::Efficiency);
    }

    #[test]
    fn score_is_monotone(case in arb_case(), which in 0usize..8, bump in 0.0..500.0f64) {
        let config = SimConfig::default();
        let (report, _) = build(&case);
        let mut better = report.clone();
        let fields = [
            &mut better.s1, &mut better.s2, &mut better.s3, &mut better.s4,
            &mut better.l1, &mut better.l2, &mut better.l3, &mut better.l4,
        ];
        *fields.into_iter().nth(which).unwrap() += bump;
        let before = overall_score(&report, &config);
        prop_assert!(before <= 100);
        prop_assert!(overall_score(&better, &config) >= before);
    }

    #[test]
    fn annotation_follows_placement_rules(
        target_x in 0.0..1250.0f64,
        descent in prop_oneof![Just(0.0), 2.0..28.0f64],
        tilt in -14.0..14.0f64,
    ) {
        let config = SimConfig::default();
        let profile = PilotProfile { target_x, descent_speed: descent, touchdown_tilt: tilt, ..PilotProfile::centered(&config) };
        let traj = run_episode(&profile.fly(&config), &config);
        let report = assess(&traj, &SpecSet::table1(), &config).unwrap();
        let area = select_improvement_area(&report, &traj, &config, &AssessmentConfig::default());
        let point = annotation_point(&traj, &report, area).unwrap();
        let s = traj.samples[point.step_index];
        prop_assert_eq!((point.x, point.y), (s.x, s.y));
        let n = traj.len();
        match report.outcome {
            LandingOutcome::Crash => prop_assert_eq!(point.step_index, n - 1),
            LandingOutcome::Unsafe => {
                prop_assert!(point.step_index >= n.saturating_sub(UNSAFE_WINDOW));
                let key = |s: &TrajectorySample| if area == ImprovementArea::LandingAngle { s.rob.l4 } else { s.rob.l3 };
                let worst = traj.samples[n.saturating_sub(UNSAFE_WINDOW)..].iter().map(key).fold(f64::INFINITY, f64::min);
                prop_assert_eq!(key(&s), worst);
            }
            LandingOutcome::Safe => {
                let peak = traj.samples.iter().map(|s| s.input().magnitude()).fold(0.0, f64::max);
                prop_assert_eq!(s.input().magnitude(), peak);
                prop_assert!(traj.samples[..point.step_index].iter().all(|e| e.input().magnitude() < peak));
            }
        }
    }
}

#[test]
fn score_extremes() {
    let config = SimConfig::default();
    let case = Case {
        outcome: LandingOutcome::Safe,
        contacts: [None; 4],
        l3: 0.0,
        l4: 0.0,
        duration: 10.0,
    };
    let (mut report, _) = build(&case);
    let ranges = component_ranges(&config);
    let set = |r: &mut RobustnessReport, pick: fn(&(f64, f64)) -> f64| {
        let values: Vec<f64> = ranges.iter().map(pick).collect();
        (r.s1, r.s2, r.s3, r.s4) = (values[0], values[1], values[2], values[3]);
        (r.l1, r.l2, r.l3, r.l4) = (values[4], values[5], values[6], values[7]);
    };
    set(&mut report, |r| r.1);
    assert_eq!(overall_score(&report, &config), 100);
    set(&mut report, |r| r.0);
    assert_eq!(overall_score(&report, &config), 0);
}
