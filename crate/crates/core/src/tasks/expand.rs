use std::collections::BTreeMap;

use super::catalog::{self, find_task, VISION_MAPPING};
use super::solver::{solve_assembly_pose, SolveError};
use super::tables::Tables;
use crate::kb::{CellConfiguration, KbError, KnowledgeBase};
use crate::model::{
    Component, ModelStore, ObjectModel, ParameterValue, SkillCall, SkillInvocation, TaskDefinition,
    TaskInstance,
};
use crate::{Pose6D, Vec3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExpandError {
    #[error("unknown task {0}")]
    UnknownTask(String),
    #[error("no skill mapping of task {task} is feasible in cell {cell}")]
    NoFeasibleMapping { task: String, cell: String },
    #[error("{instance}: parameter {param} is unset or mistyped")]
    MissingParameter { instance: String, param: String },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("object {0} is not in the cell")]
    UnknownObject(String),
    #[error("no object model {0}")]
    UnknownModel(String),
    #[error("model {model} has no vertex {vertex}")]
    UnknownVertex { model: String, vertex: String },
    #[error("model {model} has no edge {edge}")]
    UnknownEdge { model: String, edge: String },
    #[error("no material table entry for {material} at {thickness}")]
    UnknownMaterial { material: String, thickness: String },
    #[error("{0}: nothing is held at this point of the process")]
    NothingHeld(String),
    #[error("{instance}: already holding {object}")]
    AlreadyHolding { instance: String, object: String },
}

impl From<KbError> for ExpandError {
    fn from(e: KbError) -> Self {
        match e {
            KbError::NoFeasibleMapping { task, cell } => ExpandError::NoFeasibleMapping { task, cell },
            other => ExpandError::UnknownTask(other.to_string()),
        }
    }
}

/// A skill argument derived from configuration rather than typed by a user.
#[derive(Debug, Clone, PartialEq)]
pub struct Inferred {
    pub value: f64,
    pub source: String,
}

pub type InferredArgs = BTreeMap<&'static str, Inferred>;

pub const MOVE_SPEED: &str = "move_speed";
pub const MOVE_ACCEL: &str = "move_accel";
pub const APPROACH_OFFSET: &str = "approach_offset";
pub const GRIPPER_FORCE: &str = "gripper_force";
pub const WELDING_CURRENT: &str = "welding_current";
pub const WELDING_SPEED: &str = "welding_speed";
pub const SCREW_DEPTH: &str = "screw_depth";
pub const DRILL_FORCE: &str = "drill_force";

fn material_of(
    task: &str,
    params: &BTreeMap<String, Option<ParameterValue>>,
) -> Option<(String, Option<f64>)> {
    let (material, mut thickness) = match params.get("material")?.as_ref()? {
        ParameterValue::MaterialRef {
            material,
            thickness_mm,
        } => (material.clone(), *thickness_mm),
        _ => return None,
    };
    if task == catalog::DEFINE_MATERIAL {
        if let Some(Some(ParameterValue::Number { value, .. })) = params.get("thickness") {
            thickness = Some(*value);
        }
    }
    Some((material, thickness))
}

/// Skill arguments a task needs beyond its own parameters, each with the
/// table entry it came from.
pub fn infer_skill_parameters(
    task: &str,
    params: &BTreeMap<String, Option<ParameterValue>>,
    tables: &Tables,
) -> Result<InferredArgs, ExpandError> {
    let d = &tables.defaults;
    let from = |value: f64, key: &str| Inferred {
        value,
        source: format!("defaults.{key}"),
    };
    let mut out = InferredArgs::new();
    out.insert(MOVE_SPEED, from(d.move_speed_m_s, "move_speed_m_s"));
    out.insert(MOVE_ACCEL, from(d.move_accel_m_s2, "move_accel_m_s2"));
    out.insert(APPROACH_OFFSET, from(d.approach_offset_m, "approach_offset_m"));
    match task {
        catalog::PICK_OBJECT | catalog::PICK_HOLD | catalog::ASSEMBLE_OBJECTS => {
            out.insert(GRIPPER_FORCE, from(d.gripper_force_n, "gripper_force_n"));
        }
        catalog::SCREW => {
            out.insert(SCREW_DEPTH, from(d.screw_depth_mm, "screw_depth_mm"));
            out.insert(DRILL_FORCE, from(d.drill_force_n, "drill_force_n"));
        }
        catalog::DEFINE_MATERIAL | catalog::POINT_WELDING | catalog::SEAM_WELDING => {
            let Some((material, thickness)) = material_of(task, params) else {
                return Err(ExpandError::UnknownMaterial {
                    material: "(unset)".into(),
                    thickness: "(unset)".into(),
                });
            };
            let unknown = |thickness: String| ExpandError::UnknownMaterial {
                material: material.clone(),
                thickness,
            };
            let t = thickness.ok_or_else(|| unknown("unspecified thickness".into()))?;
            let entry = tables
                .materials
                .lookup(&material, t)
                .ok_or_else(|| unknown(format!("{t} mm")))?;
            let source = format!("materials[{material}, {t} mm]");
            out.insert(
                WELDING_CURRENT,
                Inferred {
                    value: entry.current_a,
                    source: source.clone(),
                },
            );
            out.insert(
                WELDING_SPEED,
                Inferred {
                    value: entry.speed_m_s,
                    source,
                },
            );
        }
        _ => {}
    }
    Ok(out)
}

/// Object positions as the plan unfolds, so later tasks see where earlier
/// ones left things.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanWorld {
    pub objects: BTreeMap<String, Pose6D>,
    /// Held object and its pose relative to the TCP.
    pub held: Option<(String, Pose6D)>,
}

impl PlanWorld {
    pub fn from_cell(cell: &CellConfiguration) -> Self {
        Self {
            objects: cell
                .objects
                .iter()
                .map(|o| (o.model.clone(), o.pose))
                .collect(),
            held: None,
        }
    }
}

/// Expands task instances in order, threading object positions through.
pub struct Planner<'a> {
    pub kb: &'a KnowledgeBase,
    pub cell: &'a CellConfiguration,
    pub models: &'a ModelStore,
    pub tables: &'a Tables,
    pub catalog: &'a [TaskDefinition],
    pub world: PlanWorld,
}

struct Emit<'i> {
    instance: &'i str,
    args: InferredArgs,
    out: Vec<SkillInvocation>,
}

impl Emit<'_> {
    fn get(&self, key: &str) -> f64 {
        self.args[key].value
    }

    fn push(&mut self, call: SkillCall, inferred: &[(&str, &str)]) {
        let mut inv = SkillInvocation::new(call, self.instance);
        for &(arg, key) in inferred {
            if let Some(i) = self.args.get(key) {
                inv = inv.with_source(arg, i.source.clone());
            }
        }
        self.out.push(inv);
    }

    fn move_to(&mut self, pose: Pose6D) {
        let call = SkillCall::MoveTo {
            pose,
            speed: self.get(MOVE_SPEED),
            accel: self.get(MOVE_ACCEL),
        };
        self.push(call, &[("speed", MOVE_SPEED), ("accel", MOVE_ACCEL)]);
    }

    fn raised(&self, pose: &Pose6D) -> Pose6D {
        pose.with_position(pose.position() + Vec3::unit_z().scale(self.get(APPROACH_OFFSET)))
    }
}

fn param<'v>(inst: &'v TaskInstance, name: &str) -> Result<&'v ParameterValue, ExpandError> {
    inst.value(name).ok_or_else(|| ExpandError::MissingParameter {
        instance: inst.id.clone(),
        param: name.to_string(),
    })
}

fn mistyped(inst: &TaskInstance, name: &str) -> ExpandError {
    ExpandError::MissingParameter {
        instance: inst.id.clone(),
        param: name.to_string(),
    }
}

fn object_param(inst: &TaskInstance, name: &str) -> Result<String, ExpandError> {
    match param(inst, name)? {
        ParameterValue::ObjectModelRef { id } => Ok(id.clone()),
        _ => Err(mistyped(inst, name)),
    }
}

fn poses_param(inst: &TaskInstance, name: &str) -> Result<Vec<Pose6D>, ExpandError> {
    match param(inst, name)? {
        ParameterValue::PoseArray { poses } if poses.len() >= 2 => Ok(poses.clone()),
        _ => Err(mistyped(inst, name)),
    }
}

fn number_param(inst: &TaskInstance, name: &str) -> Result<f64, ExpandError> {
    match param(inst, name)? {
        ParameterValue::Number { value, .. } => Ok(*value),
        _ => Err(mistyped(inst, name)),
    }
}

fn pose_param(inst: &TaskInstance, name: &str) -> Result<Pose6D, ExpandError> {
    match param(inst, name)? {
        ParameterValue::Pose6D { pose } => Ok(*pose),
        _ => Err(mistyped(inst, name)),
    }
}

/// Shifts every pose by `depth_mm` along the table's −z.
fn lowered(poses: &[Pose6D], depth_mm: f64) -> Vec<Pose6D> {
    let down = Vec3::unit_z().scale(-depth_mm / 1000.0);
    poses
        .iter()
        .map(|p| p.with_position(p.position() + down))
        .collect()
}

impl<'a> Planner<'a> {
    pub fn new(
        kb: &'a KnowledgeBase,
        cell: &'a CellConfiguration,
        models: &'a ModelStore,
        tables: &'a Tables,
        catalog: &'a [TaskDefinition],
    ) -> Self {
        Self {
            kb,
            cell,
            models,
            tables,
            catalog,
            world: PlanWorld::from_cell(cell),
        }
    }

    fn model(&self, id: &str) -> Result<&'a ObjectModel, ExpandError> {
        self.models
            .get(id)
            .ok_or_else(|| ExpandError::UnknownModel(id.to_string()))
    }

    fn object_pose(&self, id: &str) -> Result<Pose6D, ExpandError> {
        self.world
            .objects
            .get(id)
            .copied()
            .ok_or_else(|| ExpandError::UnknownObject(id.to_string()))
    }

    fn tool_pose(&self, at: Vec3) -> Pose6D {
        Pose6D::new(at, self.tables.defaults.weld_orientation())
            .unwrap_or_else(|_| Pose6D::from_translation(at))
    }

    /// Skill sequence for one instance. Updates the plan world on success.
    pub fn expand(&mut self, inst: &TaskInstance) -> Result<Vec<SkillInvocation>, ExpandError> {
        let def = find_task(self.catalog, &inst.task)
            .ok_or_else(|| ExpandError::UnknownTask(inst.task.clone()))?;
        let mapping = self.kb.select_mapping(def, self.cell)?;
        let vision = mapping.id == VISION_MAPPING;
        let args = infer_skill_parameters(&def.id, &inst.params, self.tables)?;
        let mut e = Emit {
            instance: &inst.id,
            args,
            out: Vec::new(),
        };
        let mut world = self.world.clone();

        match def.id.as_str() {
            catalog::PICK_OBJECT => {
                let obj = object_param(inst, "objectToPick")?;
                self.pick(&mut e, &mut world, inst, &obj, vision)?;
            }
            catalog::PLACE_OBJECT => {
                let target = match param(inst, "locationToPlace")? {
                    ParameterValue::Location3D { x, y, z } => Vec3::new(*x, *y, *z),
                    _ => return Err(mistyped(inst, "locationToPlace")),
                };
                let (obj, rel) = world
                    .held
                    .clone()
                    .ok_or_else(|| ExpandError::NothingHeld(inst.id.clone()))?;
                let current = self.object_pose(&obj)?;
                let placed = current.with_position(target);
                let tcp = placed.compose(&rel.inverse());
                let above = e.raised(&tcp);
                e.move_to(above);
                e.move_to(tcp);
                e.push(SkillCall::OpenGripper, &[]);
                e.move_to(above);
                world.objects.insert(obj, placed);
                world.held = None;
            }
            catalog::PICK_HOLD => {
                let obj = object_param(inst, "objectToPick")?;
                let hold = pose_param(inst, "holdPose")?;
                let rel = self.pick(&mut e, &mut world, inst, &obj, vision)?;
                let tcp = hold.compose(&rel.inverse());
                e.move_to(tcp);
                e.push(SkillCall::AwaitConfirmation, &[]);
                e.push(SkillCall::OpenGripper, &[]);
                e.move_to(e.raised(&tcp));
                world.objects.insert(obj, hold);
                world.held = None;
            }
            catalog::ASSEMBLE_OBJECTS => {
                let a = object_param(inst, "objectToAssemble")?;
                let b = object_param(inst, "assembly")?;
                let constraints = match param(inst, "assemblyConstraints")? {
                    ParameterValue::ConstraintSet { constraints } => constraints.clone(),
                    _ => return Err(mistyped(inst, "assemblyConstraints")),
                };
                let rel_ab = solve_assembly_pose(self.model(&a)?, self.model(&b)?, &constraints)?;
                let b_pose = self.object_pose(&b)?;
                if vision {
                    e.push(SkillCall::DetectObject { model: b.clone() }, &[]);
                }
                let grip = self.pick(&mut e, &mut world, inst, &a, vision)?;
                let target = b_pose.compose(&rel_ab);
                let tcp = target.compose(&grip.inverse());
                let above = e.raised(&tcp);
                e.move_to(above);
                e.move_to(tcp);
                e.push(SkillCall::OpenGripper, &[]);
                e.move_to(above);
                world.objects.insert(a, target);
                world.held = None;
            }
            catalog::DEFINE_MATERIAL => self.set_weld_params(&mut e),
            catalog::POINT_WELDING => {
                let obj = object_param(inst, "objectToWeld")?;
                let vertex = match param(inst, "position")? {
                    ParameterValue::VertexRef { id } => id.clone(),
                    _ => return Err(mistyped(inst, "position")),
                };
                let model = self.model(&obj)?;
                let local = model
                    .vertices
                    .get(&vertex)
                    .ok_or_else(|| ExpandError::UnknownVertex {
                        model: obj.clone(),
                        vertex: vertex.clone(),
                    })?;
                let at = self.tool_pose(self.object_pose(&obj)?.transform_point(local));
                self.set_weld_params(&mut e);
                e.move_to(e.raised(&at));
                e.push(SkillCall::WeldPoint { pose: at }, &[]);
                e.move_to(e.raised(&at));
            }
            catalog::SEAM_WELDING => {
                let obj = object_param(inst, "objectToWeld")?;
                let edge = match param(inst, "edge")? {
                    ParameterValue::EdgeRef { id } => id.clone(),
                    _ => return Err(mistyped(inst, "edge")),
                };
                let (p, q) = self.model(&obj)?.edge_endpoints(&edge).ok_or_else(|| {
                    ExpandError::UnknownEdge {
                        model: obj.clone(),
                        edge: edge.clone(),
                    }
                })?;
                let pose = self.object_pose(&obj)?;
                let start = self.tool_pose(pose.transform_point(&p));
                let end = self.tool_pose(pose.transform_point(&q));
                self.set_weld_params(&mut e);
                e.move_to(e.raised(&start));
                e.push(
                    SkillCall::WeldSeam {
                        poses: vec![start, end],
                    },
                    &[],
                );
                e.move_to(e.raised(&end));
            }
            catalog::SAWING => {
                self.object_pose(&object_param(inst, "objectToSaw")?)?;
                let start = pose_param(inst, "startPosition")?;
                let mut poses = vec![start];
                poses.extend(poses_param(inst, "trajectory")?);
                e.push(SkillCall::SawAlongTrajectory { poses }, &[]);
            }
            catalog::GRINDING => {
                let depth = number_param(inst, "grindingDepth")?;
                let poses = lowered(&poses_param(inst, "trajectory")?, depth);
                Self::powered_path(&mut e, Component::GrindTool, &poses);
            }
            catalog::DEBURRING => {
                let poses = poses_param(inst, "edge")?;
                Self::powered_path(&mut e, Component::DeburrTool, &poses);
            }
            catalog::MILLING => {
                self.object_pose(&object_param(inst, "objectToMill")?)?;
                let depth = number_param(inst, "millingDepth")?;
                let poses = lowered(&poses_param(inst, "trajectory")?, depth);
                Self::powered_path(&mut e, Component::MillTool, &poses);
            }
            catalog::SCREW => {
                let obj = object_param(inst, "objectsToScrew")?;
                let hole = match param(inst, "hole")? {
                    ParameterValue::VertexRef { id } => id.clone(),
                    _ => return Err(mistyped(inst, "hole")),
                };
                let local = self.model(&obj)?.vertices.get(&hole).copied().ok_or_else(|| {
                    ExpandError::UnknownVertex {
                        model: obj.clone(),
                        vertex: hole.clone(),
                    }
                })?;
                let at = self.tool_pose(self.object_pose(&obj)?.transform_point(&local));
                e.move_to(e.raised(&at));
                let call = SkillCall::DrillScrew {
                    depth: e.get(SCREW_DEPTH),
                    force: e.get(DRILL_FORCE),
                };
                e.push(call, &[("depth", SCREW_DEPTH), ("force", DRILL_FORCE)]);
                e.move_to(e.raised(&at));
            }
            catalog::ADHESIVE_BONDING => {
                let poses = poses_param(inst, "trajectory")?;
                let amount = number_param(inst, "amountOfGlue")?;
                e.move_to(poses[0]);
                e.push(SkillCall::ApplyGlue { amount, poses }, &[]);
            }
            other => return Err(ExpandError::UnknownTask(other.to_string())),
        }

        let mut out = e.out;
        if let Some(tool) = out.iter().find_map(|i| i.call.required_tool()) {
            out.insert(
                0,
                SkillInvocation::new(SkillCall::AttachTool { tool }, &inst.id),
            );
        }
        self.world = world;
        Ok(out)
    }

    /// Approach, grasp, close and lift. Returns the grip offset (object pose
    /// relative to the TCP) and records the object as held.
    fn pick(
        &self,
        e: &mut Emit<'_>,
        world: &mut PlanWorld,
        inst: &TaskInstance,
        obj: &str,
        vision: bool,
    ) -> Result<Pose6D, ExpandError> {
        if let Some((held, _)) = &world.held {
            return Err(ExpandError::AlreadyHolding {
                instance: inst.id.clone(),
                object: held.clone(),
            });
        }
        let model = self.model(obj)?;
        let pose = *world
            .objects
            .get(obj)
            .ok_or_else(|| ExpandError::UnknownObject(obj.to_string()))?;
        if vision {
            e.push(SkillCall::DetectObject { model: obj.to_string() }, &[]);
        }
        // tool frame = model frame, so the grasp keeps the object's orientation
        let grasp = pose.with_position(pose.transform_point(&model.grasp.point));
        let approach_dir = pose
            .transform_vector(&model.grasp.approach)
            .normalized()
            .unwrap_or_else(|| -Vec3::unit_z());
        let back = approach_dir.scale(-e.get(APPROACH_OFFSET));
        e.move_to(grasp.with_position(grasp.position() + back));
        e.move_to(grasp);
        let force = e.get(GRIPPER_FORCE);
        e.push(SkillCall::CloseGripper { force }, &[("force", GRIPPER_FORCE)]);
        let lift = e.raised(&grasp);
        e.move_to(lift);
        let rel = grasp.inverse().compose(&pose);
        world.objects.insert(obj.to_string(), lift.compose(&rel));
        world.held = Some((obj.to_string(), rel));
        Ok(rel)
    }

    fn set_weld_params(&self, e: &mut Emit<'_>) {
        let current = e.get(WELDING_CURRENT);
        let speed = e.get(WELDING_SPEED);
        e.push(
            SkillCall::SetWeldingCurrent { current },
            &[("current", WELDING_CURRENT)],
        );
        e.push(SkillCall::SetWeldingSpeed { speed }, &[("speed", WELDING_SPEED)]);
    }

    fn powered_path(e: &mut Emit<'_>, tool: Component, poses: &[Pose6D]) {
        e.move_to(e.raised(&poses[0]));
        e.push(SkillCall::SetToolPower { tool, on: true }, &[]);
        for p in poses {
            e.move_to(*p);
        }
        e.push(SkillCall::SetToolPower { tool, on: false }, &[]);
        e.move_to(e.raised(&poses[poses.len() - 1]));
    }

    /// Expands every instance in order.
    pub fn expand_all(&mut self, tasks: &[TaskInstance]) -> Result<Vec<SkillInvocation>, ExpandError> {
        let mut plan = Vec::new();
        for inst in tasks {
            plan.extend(self.expand(inst)?);
        }
        Ok(plan)
    }
}

/// Expands one instance against the cell's initial contents.
pub fn expand(
    instance: &TaskInstance,
    kb: &KnowledgeBase,
    cell: &CellConfiguration,
    models: &ModelStore,
    tables: &Tables,
) -> Result<Vec<SkillInvocation>, ExpandError> {
    let catalog = catalog::task_catalog();
    Planner::new(kb, cell, models, tables, &catalog).expand(instance)
}

/// Makes tool changes explicit for a whole plan: drops `attach_tool` calls
/// for a tool that is already attached and inserts one wherever the next
/// skill needs a different tool.
pub fn resolve_tool_changes(
    plan: Vec<SkillInvocation>,
    initial: Option<Component>,
) -> Vec<SkillInvocation> {
    let mut current = initial;
    let mut out = Vec::with_capacity(plan.len());
    for inv in plan {
        if let SkillCall::AttachTool { tool } = inv.call {
            if current != Some(tool) {
                current = Some(tool);
                out.push(inv);
            }
            continue;
        }
        if let Some(tool) = inv.call.required_tool() {
            if current != Some(tool) {
                out.push(SkillInvocation::new(SkillCall::AttachTool { tool }, &inv.instance));
                current = Some(tool);
            }
        }
        out.push(inv);
    }
    out
}
