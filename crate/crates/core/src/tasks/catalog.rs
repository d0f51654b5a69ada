use std::collections::BTreeSet;

use crate::model::{
    Component, DataType, Domain, InputModality, ParameterSpec, SkillId, SkillMapping,
    TaskDefinition, Unit,
};

use InputModality::*;

/// Point by hand, speech, touch, pen and keyboard & mouse.
const ALL_FIVE: &[InputModality] = &[Gesture, Speech, Touch, Pen, KeyboardMouse];
/// Inputs that make sense for names, numbers and list picks.
const VERBAL: &[InputModality] = &[Speech, Touch, KeyboardMouse];

pub const PICK_OBJECT: &str = "PickObject";
pub const PLACE_OBJECT: &str = "PlaceObject";
pub const PICK_HOLD: &str = "PickHold";
pub const ASSEMBLE_OBJECTS: &str = "AssembleObjects";
pub const DEFINE_MATERIAL: &str = "DefineMaterial";
pub const POINT_WELDING: &str = "PointWelding";
pub const SEAM_WELDING: &str = "SeamWelding";
pub const SAWING: &str = "Sawing";
pub const GRINDING: &str = "Grinding";
pub const DEBURRING: &str = "Deburring";
pub const MILLING: &str = "Milling";
pub const SCREW: &str = "Screw";
pub const ADHESIVE_BONDING: &str = "AdhesiveBonding";

pub const VISION_MAPPING: &str = "vision";
pub const TAUGHT_MAPPING: &str = "taught";
pub const DEFAULT_MAPPING: &str = "default";

fn mapping(id: &str, components: &[Component]) -> SkillMapping {
    SkillMapping {
        id: id.to_string(),
        required_components: components.iter().copied().collect(),
    }
}

fn grasping_mappings() -> Vec<SkillMapping> {
    use Component::*;
    vec![
        mapping(VISION_MAPPING, &[RobotArm, Gripper, DepthSensor, VisionSw]),
        mapping(TAUGHT_MAPPING, &[RobotArm, Gripper]),
    ]
}

fn tool_mapping(tool: Component) -> Vec<SkillMapping> {
    vec![mapping(DEFAULT_MAPPING, &[Component::RobotArm, tool])]
}

fn task(
    id: &str,
    domain: Domain,
    params: Vec<ParameterSpec>,
    skills: &[SkillId],
    includes: &[&str],
    mappings: Vec<SkillMapping>,
) -> TaskDefinition {
    TaskDefinition {
        id: id.to_string(),
        domain,
        params,
        required_skills: skills.iter().copied().collect(),
        includes: includes.iter().map(|s| s.to_string()).collect(),
        mappings,
    }
}

fn p(name: &str, ty: DataType, modalities: &[InputModality]) -> ParameterSpec {
    ParameterSpec::new(name, ty, modalities)
}

/// The thirteen task definitions across the four domains.
pub fn task_catalog() -> Vec<TaskDefinition> {
    use DataType as T;
    use SkillId::*;
    vec![
        task(
            PICK_OBJECT,
            Domain::Assembly,
            vec![p("objectToPick", T::ObjectModelRef, ALL_FIVE)],
            &[MoveTo, DetectObject, CloseGripper],
            &[],
            grasping_mappings(),
        ),
        task(
            PLACE_OBJECT,
            Domain::Assembly,
            vec![p("locationToPlace", T::Location3D, ALL_FIVE)],
            &[MoveTo, OpenGripper, DetectObject],
            &[],
            vec![mapping(DEFAULT_MAPPING, &[Component::RobotArm, Component::Gripper])],
        ),
        task(
            PICK_HOLD,
            Domain::Assembly,
            vec![
                p("objectToPick", T::ObjectModelRef, ALL_FIVE),
                p("holdPose", T::Pose6D, ALL_FIVE),
            ],
            &[MoveTo, OpenGripper, DetectObject],
            &[PICK_OBJECT],
            grasping_mappings(),
        ),
        task(
            ASSEMBLE_OBJECTS,
            Domain::Assembly,
            vec![
                p("objectToAssemble", T::ObjectModelRef, ALL_FIVE),
                p("assembly", T::ObjectModelRef, ALL_FIVE),
                p("assemblyConstraints", T::ConstraintSet, VERBAL),
            ],
            &[MoveTo, OpenGripper, CloseGripper, DetectObject, DualArmMoveTo],
            &[],
            grasping_mappings(),
        ),
        task(
            DEFINE_MATERIAL,
            Domain::Welding,
            vec![
                p("material", T::MaterialRef, VERBAL),
                p("thickness", T::number(Unit::Millimeter), VERBAL),
            ],
            &[SetWeldingCurrent, SetWeldingSpeed],
            &[],
            tool_mapping(Component::WeldingGun),
        ),
        task(
            POINT_WELDING,
            Domain::Welding,
            vec![
                p("objectToWeld", T::ObjectModelRef, ALL_FIVE),
                p("position", T::VertexRef, ALL_FIVE),
                p("material", T::MaterialRef, VERBAL),
            ],
            &[MoveTo, WeldPoint],
            &[DEFINE_MATERIAL],
            tool_mapping(Component::WeldingGun),
        ),
        task(
            SEAM_WELDING,
            Domain::Welding,
            vec![
                p("objectToWeld", T::ObjectModelRef, ALL_FIVE),
                p("edge", T::EdgeRef, ALL_FIVE),
                p("material", T::MaterialRef, VERBAL),
            ],
            &[MoveTo, WeldSeam],
            &[DEFINE_MATERIAL],
            tool_mapping(Component::WeldingGun),
        ),
        task(
            SAWING,
            Domain::Woodworking,
            vec![
                p("objectToSaw", T::ObjectModelRef, ALL_FIVE),
                p("startPosition", T::Pose6D, ALL_FIVE),
                p("trajectory", T::PoseArray, ALL_FIVE),
            ],
            &[SawAlongTrajectory],
            &[],
            tool_mapping(Component::SawBlade),
        ),
        task(
            GRINDING,
            Domain::Woodworking,
            vec![
                p("trajectory", T::PoseArray, ALL_FIVE),
                p("grindingDepth", T::number(Unit::Millimeter), VERBAL),
                p("coarseness", T::list("grinding_papers"), VERBAL),
            ],
            &[MoveTo, SetToolPower],
            &[],
            tool_mapping(Component::GrindTool),
        ),
        task(
            DEBURRING,
            Domain::Woodworking,
            vec![
                p("deburringType", T::list("deburring_types"), VERBAL),
                p("radius", T::number(Unit::Millimeter), VERBAL),
                p("edge", T::PoseArray, ALL_FIVE),
            ],
            &[MoveTo, SetToolPower],
            &[],
            tool_mapping(Component::DeburrTool),
        ),
        task(
            MILLING,
            Domain::MetalProcessing,
            vec![
                p("objectToMill", T::ObjectModelRef, ALL_FIVE),
                p("millingDepth", T::number(Unit::Millimeter), VERBAL),
                p("trajectory", T::PoseArray, ALL_FIVE),
            ],
            &[MoveTo, SetToolPower],
            &[],
            tool_mapping(Component::MillTool),
        ),
        task(
            SCREW,
            Domain::MetalProcessing,
            vec![
                p("screwType", T::list("screws"), VERBAL),
                p("objectsToScrew", T::ObjectModelRef, ALL_FIVE),
                p("hole", T::VertexRef, ALL_FIVE),
            ],
            &[MoveTo, DrillScrew],
            &[],
            tool_mapping(Component::DrillTool),
        ),
        task(
            ADHESIVE_BONDING,
            Domain::MetalProcessing,
            vec![
                p("glueType", T::list("glues"), VERBAL),
                p("trajectory", T::PoseArray, ALL_FIVE),
                p("amountOfGlue", T::number(Unit::Milliliter), VERBAL),
            ],
            &[MoveTo, ApplyGlue],
            &[],
            tool_mapping(Component::GlueTool),
        ),
    ]
}

pub fn find_task<'c>(catalog: &'c [TaskDefinition], id: &str) -> Option<&'c TaskDefinition> {
    catalog.iter().find(|t| t.id == id)
}

/// Skills a task may expand into: its own required skills plus those of
/// every task it includes.
pub fn declared_skills(catalog: &[TaskDefinition], task: &TaskDefinition) -> BTreeSet<SkillId> {
    let mut out = task.required_skills.clone();
    for inc in &task.includes {
        if let Some(def) = find_task(catalog, inc) {
            out.extend(declared_skills(catalog, def));
        }
    }
    out
}

/// Union of the applicable modalities of every catalog parameter of `kind`.
pub fn applicable_for_kind(
    catalog: &[TaskDefinition],
    kind: crate::model::DataKind,
) -> BTreeSet<InputModality> {
    catalog
        .iter()
        .flat_map(|t| t.params.iter())
        .filter(|p| p.data_type.kind() == kind)
        .flat_map(|p| p.modalities.iter().copied())
        .collect()
}
