mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use taskbench::geometry::{Axis, Vector3};
use taskbench::kb::CellConfiguration;
use taskbench::model::{Component, Constraint, ParameterValue, SkillCall, SkillId, TaskInstance, Unit};
use taskbench::setup::Setup;
use taskbench::tasks::{
    infer_skill_parameters, resolve_tool_changes, solve_assembly_pose, ExpandError, SolveError, GRIPPER_FORCE,
    WELDING_CURRENT, WELDING_SPEED,
};
use taskbench::{Pose6D, Vec3};

fn constraints(json: &str) -> Vec<Constraint> {
    serde_json::from_str(json).unwrap()
}

fn ids(plan: &[taskbench::model::SkillInvocation]) -> Vec<SkillId> {
    plan.iter().map(|i| i.id()).collect()
}

#[test]
fn study_plan_shape() {
    let setup = common::study_setup();
    let plan = setup.plan(&common::load_process("study_script.json")).unwrap();
    use SkillId::*;
    // the study cell has no vision software, so grasping uses taught poses
    assert!(!ids(&plan).contains(&DetectObject));
    let tools: Vec<_> = plan
        .iter()
        .filter_map(|i| match i.call {
            SkillCall::AttachTool { tool } => Some(tool),
            _ => None,
        })
        .collect();
    assert_eq!(tools, [Component::Gripper, Component::WeldingGun]);
    let count = |s| ids(&plan).iter().filter(|x| **x == s).count();
    assert_eq!(count(CloseGripper), 2);
    assert_eq!(count(OpenGripper), 2);
    assert_eq!(count(WeldPoint), 1);
    assert_eq!(count(WeldSeam), 1);
    let first_weld = ids(&plan).iter().position(|s| *s == WeldPoint).unwrap();
    let settings = ids(&plan)[..first_weld]
        .iter()
        .filter(|s| matches!(s, SetWeldingCurrent | SetWeldingSpeed))
        .count();
    assert_eq!(settings, 2);
}

#[test]
fn vision_mapping_preferred_when_available() {
    let setup = common::workshop_setup();
    let pick = TaskInstance::new("p", "PickObject").with("objectToPick", ParameterValue::object("bearing"));
    let plan = setup.planner().expand(&pick).unwrap();
    assert_eq!(plan[1].call, SkillCall::DetectObject { model: "bearing".into() });
}

#[test]
fn inferred_values_carry_their_source() {
    let setup = common::study_setup();
    let process = common::load_process("study_script.json");
    let seam = process.instance("weld-seam").unwrap();
    let args = infer_skill_parameters("SeamWelding", &seam.params, &setup.tables).unwrap();
    assert_eq!(args[WELDING_CURRENT].value, 95.0);
    assert_eq!(args[WELDING_CURRENT].source, "materials[steel, 2 mm]");
    assert_eq!(args[WELDING_SPEED].value, 0.006);
    assert!(!args.contains_key(GRIPPER_FORCE));
    let pick = process.instance("pick").unwrap();
    let args = infer_skill_parameters("PickObject", &pick.params, &setup.tables).unwrap();
    assert_eq!(args[GRIPPER_FORCE].source, "defaults.gripper_force_n");

    let plan = setup.planner().expand(seam).unwrap();
    let set = plan.iter().find(|i| i.id() == SkillId::SetWeldingCurrent).unwrap();
    assert_eq!(set.inferred.get("current").map(String::as_str), Some("materials[steel, 2 mm]"));
}

#[test]
fn define_material_takes_separate_thickness() {
    let setup = common::workshop_setup();
    let inst = TaskInstance::new("m", "DefineMaterial")
        .with(
            "material",
            ParameterValue::MaterialRef {
                material: "steel".into(),
                thickness_mm: None,
            },
        )
        .with("thickness", ParameterValue::number(3.0, Unit::Millimeter));
    let plan = setup.planner().expand(&inst).unwrap();
    assert!(plan.contains(&taskbench::model::SkillInvocation::new(
        SkillCall::SetWeldingCurrent { current: 120.0 },
        "m"
    )
    .with_source("current", "materials[steel, 3 mm]")));
}

#[test]
fn unknown_material_is_an_expansion_error() {
    let setup = common::study_setup();
    let mut params = BTreeMap::new();
    params.insert(
        "material".to_string(),
        Some(ParameterValue::MaterialRef {
            material: "titanium".into(),
            thickness_mm: Some(2.0),
        }),
    );
    assert!(matches!(
        infer_skill_parameters("PointWelding", &params, &setup.tables),
        Err(ExpandError::UnknownMaterial { .. })
    ));
}

#[test]
fn welding_in_gripper_only_cell_has_no_mapping() {
    let study = common::study_setup();
    let mut cell = CellConfiguration::with_components("grip-only", [Component::RobotArm, Component::Gripper]);
    cell.objects = study.cell.objects.clone();
    let setup = Setup::new(cell, study.models.clone(), study.tables.clone());
    let process = common::load_process("study_script.json");
    let err = setup.plan(&process).unwrap_err();
    assert!(
        matches!(&err, ExpandError::NoFeasibleMapping { task, .. } if task == "PointWelding"),
        "{err}"
    );
}

#[test]
fn place_without_pick_is_rejected() {
    let setup = common::study_setup();
    let place = TaskInstance::new("pl", "PlaceObject").with("locationToPlace", ParameterValue::location(0.0, 0.0, 0.0));
    assert!(matches!(setup.planner().expand(&place), Err(ExpandError::NothingHeld(_))));
}

#[test]
fn tool_changes_are_made_explicit() {
    use taskbench::model::SkillInvocation as I;
    let weld = I::new(SkillCall::WeldPoint { pose: Pose6D::identity() }, "w");
    let grip = I::new(SkillCall::OpenGripper, "g");
    let attach_weld = I::new(SkillCall::AttachTool { tool: Component::WeldingGun }, "w");
    let plan = vec![attach_weld.clone(), weld.clone(), attach_weld.clone(), weld.clone(), grip.clone()];
    let out = resolve_tool_changes(plan, Some(Component::WeldingGun));
    assert_eq!(
        ids(&out),
        [SkillId::WeldPoint, SkillId::WeldPoint, SkillId::AttachTool, SkillId::OpenGripper]
    );
    assert_eq!(out[2].call, SkillCall::AttachTool { tool: Component::Gripper });
}

#[test]
fn collar_assembly_matches_hand_value() {
    let setup = common::study_setup();
    let bearing = setup.models.get("bearing").unwrap();
    let axis = setup.models.get("axis").unwrap();
    // bore reference point sits on the collar face, 50 mm up the shaft
    let rel = solve_assembly_pose(
        bearing,
        axis,
        &constraints(
            r#"[{"type":"Concentric","a":"bearing.bore","b":"axis.shaft"},
                {"type":"AgainstCollar","a":"bearing.bore","b":"axis.collar"}]"#,
        ),
    )
    .unwrap();
    assert!(rel.position().distance(&Vec3::new(0.0, 0.0, 0.05)) < 1e-12);
    // same with the feature pair written the other way round
    let flipped = solve_assembly_pose(
        bearing,
        axis,
        &constraints(
            r#"[{"type":"Concentric","a":"axis.shaft","b":"bearing.bore"},
                {"type":"Distance","a":"axis.shaft","b":"bearing.bore","mm":30}]"#,
        ),
    )
    .unwrap();
    assert!(flipped.position().distance(&Vec3::new(0.0, 0.0, 0.03)) < 1e-12);
}

#[test]
fn unsupported_constraint_sets_rejected() {
    let setup = common::study_setup();
    let bearing = setup.models.get("bearing").unwrap();
    let axis = setup.models.get("axis").unwrap();
    let bad = [
        r#"[]"#,
        r#"[{"type":"Distance","a":"bearing.bore","b":"axis.shaft","mm":3}]"#,
        r#"[{"type":"Concentric","a":"bearing.bore","b":"axis.shaft"},{"type":"Concentric","a":"bearing.bore","b":"axis.collar"}]"#,
        r#"[{"type":"Concentric","a":"bearing.bore","b":"axis.shaft"},{"type":"Coplanar","a":"bearing.bore","b":"axis.collar"}]"#,
        r#"[{"type":"Concentric","a":"bearing.bore","b":"axis.shaft"},{"type":"AgainstCollar","a":"bearing.bore","b":"axis.collar"},{"type":"Distance","a":"bearing.bore","b":"axis.shaft","mm":1}]"#,
    ];
    for text in bad {
        assert!(
            matches!(
                solve_assembly_pose(bearing, axis, &constraints(text)),
                Err(SolveError::UnsolvableConstraints(_))
            ),
            "{text}"
        );
    }
    assert!(matches!(
        solve_assembly_pose(
            bearing,
            axis,
            &constraints(r#"[{"type":"Concentric","a":"bearing.hub","b":"axis.shaft"}]"#)
        ),
        Err(SolveError::UnknownFeature(_))
    ));
    assert!(matches!(
        solve_assembly_pose(
            bearing,
            axis,
            &constraints(r#"[{"type":"Concentric","a":"rake.x","b":"axis.shaft"}]"#)
        ),
        Err(SolveError::UnknownFeature(_))
    ));
}

fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter_map("non-zero", |(x, y, z)| Vector3::new(x, y, z).normalized())
}

fn point() -> impl Strategy<Value = Vector3<f64>> {
    (-0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64).prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

proptest! {
    #[test]
    fn solved_axes_coincide(
        pa in point(), da in unit_vector(), pb in point(), db in unit_vector(),
        qa in point(), qb in point(), mm in -50.0..50.0f64,
    ) {
        let moving = Axis { point: pa, direction: da };
        let fixed = Axis { point: pb, direction: db };
        let cond = taskbench::tasks::AxialCondition { moving_point: qa, fixed_point: qb, distance: mm / 1000.0 };
        let pose = taskbench::tasks::solve_coaxial(&moving, &fixed, Some(&cond)).unwrap();
        let moved = moving.transformed(&pose);
        prop_assert!(moved.direction.cross(&fixed.direction).norm() < 1e-9);
        prop_assert!(moved.direction.dot(&fixed.direction) > 0.0);
        prop_assert!(fixed.distance_to_point(&moved.point) < 1e-9);
        let q = pose.transform_point(&qa);
        prop_assert!(((q - qb).dot(&fixed.direction) - mm / 1000.0).abs() < 1e-9);
    }
}
