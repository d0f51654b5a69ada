mod common;

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use taskbench::model::{SkillId, TaskInstance};
use taskbench::tasks::{declared_skills, task_catalog};

#[derive(Deserialize)]
struct GoldenTask {
    domain: String,
    params: Vec<(String, String, String)>,
    skills: Vec<String>,
    includes: Vec<String>,
}

fn golden() -> BTreeMap<String, GoldenTask> {
    serde_json::from_str(include_str!("golden/catalog.json")).unwrap()
}

#[test]
fn catalog_matches_golden_transcription() {
    let golden = golden();
    let catalog = task_catalog();
    assert_eq!(catalog.len(), 13);
    assert_eq!(golden.len(), 13);
    for def in &catalog {
        let g = golden.get(&def.id).unwrap_or_else(|| panic!("{} missing from golden", def.id));
        assert_eq!(format!("{:?}", def.domain), g.domain, "{}", def.id);
        assert_eq!(def.params.len(), g.params.len(), "{}", def.id);
        for (spec, (name, ty, modalities)) in def.params.iter().zip(&g.params) {
            assert_eq!(&spec.name, name, "{}", def.id);
            assert_eq!(spec.data_type.to_string(), *ty, "{}.{}", def.id, name);
            let want: BTreeSet<String> = modalities.split_whitespace().map(String::from).collect();
            let got: BTreeSet<String> = spec.modalities.iter().map(|m| m.to_string()).collect();
            assert_eq!(got, want, "{}.{}", def.id, name);
            assert!(spec.required);
        }
        let skills: BTreeSet<&str> = def.required_skills.iter().map(|s| s.name()).collect();
        let want: BTreeSet<&str> = g.skills.iter().map(String::as_str).collect();
        assert_eq!(skills, want, "{}", def.id);
        assert_eq!(def.includes, g.includes, "{}", def.id);
        assert!(!def.mappings.is_empty(), "{}", def.id);
    }
}

#[test]
fn expansions_stay_within_declared_skills() {
    let setup = common::workshop_setup();
    let process = common::load_process("workshop_script.json");
    let covered: BTreeSet<&str> = process.tasks.iter().map(|t| t.task.as_str()).collect();
    assert_eq!(covered.len(), 13, "workshop script covers every task");
    let mut planner = setup.planner();
    for inst in &process.tasks {
        let def = setup.catalog.iter().find(|d| d.id == inst.task).unwrap();
        let mut allowed = declared_skills(&setup.catalog, def);
        allowed.extend([SkillId::AttachTool, SkillId::AwaitConfirmation]);
        let plan = planner.expand(inst).unwrap_or_else(|e| panic!("{}: {e}", inst.id));
        assert!(!plan.is_empty());
        for inv in &plan {
            assert!(allowed.contains(&inv.id()), "{} expanded to undeclared {}", inst.id, inv.id());
            assert_eq!(inv.instance, inst.id);
        }
    }
}

#[test]
fn unknown_task_is_rejected() {
    let setup = common::study_setup();
    let err = setup.planner().expand(&TaskInstance::new("x", "Juggling")).unwrap_err();
    assert!(err.to_string().contains("Juggling"));
}
