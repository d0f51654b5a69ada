#![allow(dead_code)]

use std::path::PathBuf;

use taskbench::model::ProcessDefinition;
use taskbench::setup::Setup;

pub fn study_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/study")
}

pub fn study_setup() -> Setup {
    Setup::load(&study_dir().join("study_cell.json")).expect("study cell loads")
}

pub fn load_process(name: &str) -> ProcessDefinition {
    let text = std::fs::read_to_string(study_dir().join(name)).expect("fixture readable");
    ProcessDefinition::from_json(&text).expect("fixture parses")
}

pub fn workshop_setup() -> Setup {
    Setup::load(&study_dir().join("workshop_cell.json")).expect("workshop cell loads")
}

pub mod analytics;
pub mod modality;
pub mod sim;

use serde_json::{json, Value};
use taskbench::model::InputModality;
use taskbench::session::{Engine, SubmitOutcome};

/// How each acquired parameter of the study template is entered: the
/// chosen modality and the value that arrives on its channel.
pub fn study_inputs() -> Vec<(&'static str, &'static str, InputModality, Value)> {
    use InputModality::*;
    vec![
        ("pick", "objectToPick", Gesture, json!({"kind": "ObjectModelRef", "id": "bearing"})),
        ("place", "locationToPlace", Touch, json!({"kind": "Location3D", "x": 0.0, "y": 0.0, "z": 0.0})),
        ("assemble", "objectToAssemble", Speech, json!({"kind": "ObjectModelRef", "id": "bearing"})),
        ("assemble", "assembly", Pen, json!({"kind": "ObjectModelRef", "id": "axis"})),
        (
            "assemble",
            "assemblyConstraints",
            Touch,
            json!({"kind": "ConstraintSet", "constraints": [
                {"type": "Concentric", "a": "bearing.bore", "b": "axis.shaft"},
                {"type": "AgainstCollar", "a": "bearing.bore", "b": "axis.collar"}
            ]}),
        ),
        ("weld-point", "objectToWeld", Gesture, json!({"kind": "ObjectModelRef", "id": "rake"})),
        ("weld-point", "position", Pen, json!({"kind": "VertexRef", "id": "v2"})),
        ("weld-seam", "objectToWeld", Speech, json!({"kind": "ObjectModelRef", "id": "rake"})),
        ("weld-seam", "edge", Gesture, json!({"kind": "EdgeRef", "id": "e1"})),
    ]
}

/// Programs the study template: touch values are submitted directly, the
/// others are published on their input channel as a wizard would. Returns
/// the number of requests seen.
pub fn program_study(engine: &mut Engine) -> Result<usize, String> {
    let mut request = engine
        .start_session(load_process("study_template.json"))
        .map_err(|e| e.to_string())?;
    let mut seen = 0;
    for (instance, param, modality, value) in study_inputs() {
        let r = request.take().ok_or("ran out of requests")?;
        if (r.instance.as_str(), r.param.as_str()) != (instance, param) {
            return Err(format!("expected {instance}.{param}, engine asked for {}.{}", r.instance, r.param));
        }
        if !r.ranked.contains(&modality) {
            return Err(format!("{modality} not offered for {instance}.{param}"));
        }
        seen += 1;
        engine.choose_modality(instance, param, modality).map_err(|e| e.to_string())?;
        let outcome = if modality.is_recognized() {
            let reply = engine
                .handle_input(modality.input_topic(), &json!({ "param": param, "value": value }))
                .ok_or("input ignored")?
                .map_err(|e| e.to_string())?;
            reply.get("next").map(|n| serde_json::from_value(n.clone()).unwrap())
        } else {
            match engine
                .submit_value(modality, serde_json::from_value(value).unwrap())
                .map_err(|e| e.to_string())?
            {
                SubmitOutcome::Next(r) => Some(r),
                SubmitOutcome::ReadyToExecute => None,
            }
        };
        request = outcome;
    }
    if request.is_some() {
        return Err("engine still requests parameters".into());
    }
    Ok(seen)
}
