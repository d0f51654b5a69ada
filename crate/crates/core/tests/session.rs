mod common;

use serde_json::json;
use taskbench::model::{InputModality, ParameterValue, ProcessDefinition, SkillId, TaskInstance};
use taskbench::session::{replay, Command, Engine, EngineError, Phase, SubmitOutcome, TOPIC_TRACE};

fn engine() -> Engine {
    Engine::new(common::study_setup())
}

fn hold_process(objects: &[&str]) -> ProcessDefinition {
    let tasks = objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            TaskInstance::new(&format!("hold{i}"), "PickHold")
                .with("objectToPick", ParameterValue::object(o))
                .with(
                    "holdPose",
                    serde_json::from_value(json!({"kind": "Pose6D", "pose": {
                        "position": [0.1 * i as f64 - 0.05, -0.1, 0.0], "orientation": [1.0, 0.0, 0.0, 0.0]}}))
                    .unwrap(),
                )
        })
        .collect();
    ProcessDefinition {
        id: "holds".into(),
        tasks,
    }
}

#[test]
fn study_script_end_to_end() {
    let mut e = engine();
    assert_eq!(common::program_study(&mut e).unwrap(), 9);
    assert_eq!(e.phase(), Some(&Phase::Editing));
    let events = e.execute().unwrap();
    assert_eq!(e.phase(), Some(&Phase::Done));
    for skill in [SkillId::CloseGripper, SkillId::OpenGripper, SkillId::WeldPoint, SkillId::WeldSeam] {
        assert!(events.iter().any(|ev| ev.skill == skill), "{skill} missing");
    }
    let published = e.drain().into_iter().filter(|n| n.topic == TOPIC_TRACE).count();
    assert_eq!(published, events.len());
}

#[test]
fn requests_follow_knowledge_base_and_shrink() {
    let mut e = engine();
    let mut request = e.start_session(common::load_process("study_template.json")).unwrap();
    let mut unset = e.unset_required(e.process().unwrap()).len();
    assert_eq!(unset, 9);
    for (_, _, modality, value) in common::study_inputs() {
        let r = request.unwrap();
        let setup = e.setup();
        let def = setup.catalog.iter().find(|d| d.id == e.process().unwrap().instance(&r.instance).unwrap().task).unwrap();
        let spec = def.param(&r.param).unwrap();
        assert_eq!(r.ranked, setup.kb.modalities_for_parameter(spec, &setup.cell));
        e.choose_modality(&r.instance, &r.param, modality).unwrap();
        let outcome = e.submit_value(modality, serde_json::from_value(value).unwrap()).unwrap();
        let now = e.unset_required(e.process().unwrap()).len();
        assert_eq!(now, unset - 1);
        unset = now;
        request = match outcome {
            SubmitOutcome::Next(r) => Some(r),
            SubmitOutcome::ReadyToExecute => None,
        };
    }
    assert!(request.is_none());
}

#[test]
fn first_request_offers_ranked_gesture_first() {
    let mut e = engine();
    let r = e.start_session(common::load_process("study_template.json")).unwrap().unwrap();
    use InputModality::*;
    assert_eq!(r.ranked, [Gesture, Touch, Pen, Speech]);
    let constraints = {
        let mut e = engine();
        e.start_session(common::load_process("study_template.json")).unwrap();
        let mut last = None;
        for (inst, param, m, v) in common::study_inputs().into_iter().take(4) {
            e.choose_modality(inst, param, m).unwrap();
            last = match e.submit_value(m, serde_json::from_value(v).unwrap()).unwrap() {
                SubmitOutcome::Next(r) => Some(r),
                SubmitOutcome::ReadyToExecute => None,
            };
        }
        last.unwrap()
    };
    assert_eq!(constraints.param, "assemblyConstraints");
    assert_eq!(constraints.ranked, [Touch, Speech]);
}

#[test]
fn value_checks() {
    let mut e = engine();
    e.start_session(common::load_process("study_template.json")).unwrap();
    assert!(matches!(
        e.choose_modality("pick", "objectToPick", InputModality::KeyboardMouse),
        Err(EngineError::ModalityNotOffered { .. })
    ));
    assert!(matches!(
        e.choose_modality("place", "locationToPlace", InputModality::Touch),
        Err(EngineError::NotRequested { .. })
    ));
    e.choose_modality("pick", "objectToPick", InputModality::Speech).unwrap();
    assert!(matches!(
        e.submit_value(InputModality::Gesture, ParameterValue::object("bearing")),
        Err(EngineError::ChannelMismatch { .. })
    ));
    assert!(matches!(
        e.submit_value(InputModality::Speech, ParameterValue::number(3.0, taskbench::model::Unit::Millimeter)),
        Err(EngineError::TypeMismatch { .. })
    ));
    // a rejected value leaves the request open
    assert_eq!(e.phase().unwrap().name(), "AwaitingValue");
    // changing one's mind is allowed before a value arrives
    e.choose_modality("pick", "objectToPick", InputModality::Touch).unwrap();
    assert!(matches!(
        e.submit_value(InputModality::Touch, ParameterValue::object("bearing")),
        Ok(SubmitOutcome::Next(_))
    ));
}

#[test]
fn fully_parameterized_and_empty_processes() {
    let mut e = engine();
    assert_eq!(e.start_session(common::load_process("study_script.json")).unwrap(), None);
    let mut e = engine();
    e.start_session(ProcessDefinition {
        id: "empty".into(),
        tasks: vec![],
    })
    .unwrap();
    assert!(e.execute().unwrap().is_empty());
    assert_eq!(e.phase(), Some(&Phase::Done));
    assert!(e.session().unwrap().trace().is_empty());
}

#[test]
fn constraint_parameter_without_touch_or_speech() {
    use taskbench::kb::CellConfiguration;
    use taskbench::model::Component::*;
    let study = common::study_setup();
    let mut cell = CellConfiguration::with_components("pen-only", [RobotArm, Gripper, InfraredCameraPair, TrackedPen]);
    cell.objects = study.cell.objects.clone();
    let mut e = Engine::new(taskbench::setup::Setup::new(cell, study.models, study.tables));
    let err = e.start_session(common::load_process("study_template.json")).unwrap_err();
    assert!(matches!(err, EngineError::NoModalityAvailable { ref param, .. } if param == "objectToPick" || param == "assemblyConstraints"), "{err}");
}

#[test]
fn structurally_invalid_process_is_rejected() {
    let mut e = engine();
    let bad = ProcessDefinition {
        id: "bad".into(),
        tasks: vec![TaskInstance::new("x", "Juggling")],
    };
    assert!(matches!(e.start_session(bad), Err(EngineError::InvalidProcess { .. })));
}

#[test]
fn each_confirmation_unblocks_one_hold() {
    let mut e = engine();
    e.start_session(hold_process(&["bearing", "axis"])).unwrap();
    e.execute().unwrap();
    let paused = Phase::Executing {
        awaiting_confirmation: true,
    };
    assert_eq!(e.phase(), Some(&paused));
    e.confirm_human_step().unwrap();
    assert_eq!(e.phase(), Some(&paused));
    e.confirm_human_step().unwrap();
    assert_eq!(e.phase(), Some(&Phase::Done));
    assert_eq!(e.confirm_human_step(), Err(EngineError::NothingPending));
    let trace = e.session().unwrap().trace();
    assert_eq!(trace.count(SkillId::AwaitConfirmation), 2);
}

#[test]
fn expansion_failure_fails_the_session() {
    let mut e = engine();
    e.start_session(ProcessDefinition {
        id: "p".into(),
        tasks: vec![TaskInstance::new("pl", "PlaceObject").with("locationToPlace", ParameterValue::location(0.0, 0.0, 0.0))],
    })
    .unwrap();
    e.execute().unwrap();
    assert!(matches!(e.phase(), Some(Phase::Failed { code, .. }) if code == "ExpansionFailed"));
}

#[test]
fn skill_failure_keeps_partial_trace() {
    let mut e = engine();
    // far outside the 0.9 m reach
    e.start_session(ProcessDefinition {
        id: "p".into(),
        tasks: vec![
            TaskInstance::new("pick", "PickObject").with("objectToPick", ParameterValue::object("bearing")),
            TaskInstance::new("pl", "PlaceObject").with("locationToPlace", ParameterValue::location(3.0, 0.0, 0.0)),
        ],
    })
    .unwrap();
    e.execute().unwrap();
    assert!(matches!(e.phase(), Some(Phase::Failed { code, .. }) if code == "OutOfReach"));
    let trace = e.session().unwrap().trace();
    let last = trace.events().last().unwrap();
    assert!(!last.is_ok());
    assert!(trace.count(SkillId::CloseGripper) == 1);
}

/// Engines parked in each phase.
fn in_phase(name: &str) -> Engine {
    let mut e = engine();
    match name {
        "NoSession" => {}
        "Editing" => {
            e.start_session(common::load_process("study_template.json")).unwrap();
        }
        "Ready" => {
            e.start_session(common::load_process("study_script.json")).unwrap();
        }
        "AwaitingValue" => {
            e.start_session(common::load_process("study_template.json")).unwrap();
            e.choose_modality("pick", "objectToPick", InputModality::Touch).unwrap();
        }
        "Paused" => {
            e.start_session(hold_process(&["bearing"])).unwrap();
            e.execute().unwrap();
        }
        "Done" => {
            e.start_session(common::load_process("study_script.json")).unwrap();
            e.execute().unwrap();
        }
        "Failed" => {
            e.start_session(ProcessDefinition {
                id: "p".into(),
                tasks: vec![TaskInstance::new("pl", "PlaceObject")
                    .with("locationToPlace", ParameterValue::location(0.0, 0.0, 0.0))],
            })
            .unwrap();
            e.execute().unwrap();
        }
        _ => unreachable!(),
    }
    e
}

#[test]
fn phase_operation_matrix() {
    let ops = ["choose", "submit", "execute", "confirm"];
    // (phase, ops that succeed)
    let table: [(&str, &[&str]); 7] = [
        ("NoSession", &[]),
        ("Editing", &["choose"]),
        ("Ready", &["execute"]),
        ("AwaitingValue", &["choose", "submit"]),
        ("Paused", &["confirm"]),
        ("Done", &[]),
        ("Failed", &[]),
    ];
    for (phase, allowed) in table {
        for op in ops {
            let mut e = in_phase(phase);
            let before = e.phase().cloned();
            let result = match op {
                "choose" => e.choose_modality("pick", "objectToPick", InputModality::Touch),
                "submit" => e.submit_value(InputModality::Touch, ParameterValue::object("bearing")).map(drop),
                "execute" => e.execute().map(drop),
                "confirm" => e.confirm_human_step().map(drop),
                _ => unreachable!(),
            };
            assert_eq!(result.is_ok(), allowed.contains(&op), "{op} in {phase}: {result:?}");
            if result.is_err() {
                assert_eq!(e.phase().cloned(), before, "{op} in {phase} changed the phase");
            }
        }
    }
}

#[test]
fn replay_reproduces_the_trace() {
    let mut e = engine();
    common::program_study(&mut e).unwrap();
    e.execute().unwrap();
    let log = e.command_log().to_vec();
    let text = serde_json::to_string(&log).unwrap();
    let parsed: Vec<Command> = serde_json::from_str(&text).unwrap();
    let again = replay(common::study_setup(), &parsed);
    assert_eq!(
        again.session().unwrap().trace().to_jsonl(),
        e.session().unwrap().trace().to_jsonl()
    );
    assert_eq!(again.phase(), Some(&Phase::Done));
}

#[test]
fn replay_includes_confirmations_and_rejections() {
    let mut e = engine();
    e.start_session(hold_process(&["bearing", "axis"])).unwrap();
    let _ = e.confirm_human_step();
    e.execute().unwrap();
    e.confirm_human_step().unwrap();
    e.confirm_human_step().unwrap();
    let again = replay(common::study_setup(), e.command_log());
    assert_eq!(
        again.session().unwrap().trace().to_jsonl(),
        e.session().unwrap().trace().to_jsonl()
    );
}
