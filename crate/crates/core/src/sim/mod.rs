//! Deterministic simulated cell.
//!
//! Every skill checks all of its guards before touching the state, so a
//! failed skill never leaves a partial change behind. Perception is perfect,
//! reach is a ball around the robot base and forces are only recorded.

mod trace;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use trace::{ExecutionTrace, Outcome, TraceEvent};

use crate::kb::CellConfiguration;
use crate::model::{Component, ModelStore, SkillCall, SkillId, SkillInvocation};
use crate::{Pose6D, Real};

/// A grasp succeeds when the TCP is this close to the object's grasp point.
pub const GRASP_TOLERANCE_M: Real = 0.005;
/// Maximum spacing between interpolated samples along seams and trajectories.
pub const SAMPLE_SPACING_M: Real = 0.005;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SkillError {
    #[error("{skill} needs {tool} attached, found {attached}")]
    ToolNotAttached {
        skill: SkillId,
        tool: Component,
        attached: String,
    },
    #[error("the cell has no gripper")]
    NoGripper,
    #[error("no object within grasp tolerance of the TCP")]
    NothingToGrasp,
    #[error("target is {distance:.4} m from the base, reach is {reach} m")]
    OutOfReach { distance: Real, reach: Real },
    #[error("welding current and speed must be set before welding")]
    WeldParamsUnset,
    #[error("object {0} is not in the cell")]
    ObjectVanished(String),
    #[error("{skill} needs components {missing:?}")]
    MissingComponents {
        skill: SkillId,
        missing: Vec<Component>,
    },
    #[error("dual-arm motion needs two robot arms")]
    SecondArmMissing,
    #[error("{0} is not a tool of this cell")]
    ToolUnavailable(Component),
    #[error("cannot change tools while holding {0}")]
    HoldingObject(String),
    #[error("gripper already holds {0}")]
    GripperOccupied(String),
    #[error("waiting for a human confirmation")]
    ConfirmationRequired,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl SkillError {
    pub fn code(&self) -> &'static str {
        match self {
            SkillError::ToolNotAttached { .. } => "ToolNotAttached",
            SkillError::NoGripper => "NoGripper",
            SkillError::NothingToGrasp => "NothingToGrasp",
            SkillError::OutOfReach { .. } => "OutOfReach",
            SkillError::WeldParamsUnset => "WeldParamsUnset",
            SkillError::ObjectVanished(_) => "ObjectVanished",
            SkillError::MissingComponents { .. } => "MissingComponents",
            SkillError::SecondArmMissing => "SecondArmMissing",
            SkillError::ToolUnavailable(_) => "ToolUnavailable",
            SkillError::HoldingObject(_) => "HoldingObject",
            SkillError::GripperOccupied(_) => "GripperOccupied",
            SkillError::ConfirmationRequired => "ConfirmationRequired",
            SkillError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("malformed snapshot: {0}")]
    MalformedSnapshot(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub model: String,
    pub pose: Pose6D,
    pub on_table: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeldKind {
    Point,
    Seam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldEvent {
    pub kind: WeldKind,
    pub current: Real,
    pub speed: Real,
    pub poses: Vec<Pose6D>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolEvent {
    pub tool: Component,
    pub skill: SkillId,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Real>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poses: Vec<Pose6D>,
}

/// Live world of a simulated cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    pub tcp: Pose6D,
    pub attached_tool: Option<Component>,
    pub held: Option<String>,
    /// Pose of the held object relative to the TCP.
    pub grip: Option<Pose6D>,
    pub tool_powered: bool,
    pub objects: BTreeMap<String, ObjectState>,
    pub detections: BTreeMap<String, Pose6D>,
    pub welding_current: Real,
    pub welding_speed: Real,
    pub weld_log: Vec<WeldEvent>,
    pub tool_log: Vec<ToolEvent>,
    /// Human confirmations delivered but not yet consumed.
    pub confirmations: u32,
    pub trace: ExecutionTrace,
}

#[derive(Serialize)]
struct View<'a> {
    tcp: &'a Pose6D,
    attached_tool: &'a Option<Component>,
    held: &'a Option<String>,
    grip: &'a Option<Pose6D>,
    tool_powered: bool,
    detections: &'a BTreeMap<String, Pose6D>,
    welding_current: Real,
    welding_speed: Real,
    confirmations: u32,
}

impl CellState {
    fn view(&self) -> BTreeMap<String, Value> {
        let v = View {
            tcp: &self.tcp,
            attached_tool: &self.attached_tool,
            held: &self.held,
            grip: &self.grip,
            tool_powered: self.tool_powered,
            detections: &self.detections,
            welding_current: self.welding_current,
            welding_speed: self.welding_speed,
            confirmations: self.confirmations,
        };
        let mut map: BTreeMap<String, Value> = match serde_json::to_value(v) {
            Ok(Value::Object(m)) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        for (id, o) in &self.objects {
            map.insert(
                format!("objects.{id}"),
                serde_json::to_value(o).expect("object state serialises"),
            );
        }
        map
    }

    /// Fields that differ from `before`, plus log entries appended since.
    fn deltas_since(&self, before: &BTreeMap<String, Value>, logs: (usize, usize)) -> BTreeMap<String, Value> {
        let mut out: BTreeMap<String, Value> = self
            .view()
            .into_iter()
            .filter(|(k, v)| before.get(k) != Some(v))
            .collect();
        if self.weld_log.len() > logs.0 {
            out.insert(
                "weld_log".into(),
                serde_json::to_value(&self.weld_log[logs.0..]).expect("weld log serialises"),
            );
        }
        if self.tool_log.len() > logs.1 {
            out.insert(
                "tool_log".into(),
                serde_json::to_value(&self.tool_log[logs.1..]).expect("tool log serialises"),
            );
        }
        out
    }

    pub fn held_object(&self) -> Option<&ObjectState> {
        self.held.as_ref().and_then(|id| self.objects.get(id))
    }

    /// Serialized state; identical states give identical bytes.
    pub fn snapshot(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("cell state serialises")
    }

    pub fn restore(bytes: &[u8]) -> Result<Self, SimError> {
        let state: CellState = serde_json::from_slice(bytes)
            .map_err(|e| SimError::MalformedSnapshot(e.to_string()))?;
        state.check().map_err(SimError::MalformedSnapshot)?;
        Ok(state)
    }

    /// Internal consistency: the held object exists and is the only object
    /// off the table, and welding settings are non-negative.
    pub fn check(&self) -> Result<(), String> {
        for (id, o) in &self.objects {
            let is_held = self.held.as_deref() == Some(id.as_str());
            if is_held == o.on_table {
                return Err(format!("object {id}: held and on-table flags disagree"));
            }
        }
        if let Some(id) = &self.held {
            if !self.objects.contains_key(id) {
                return Err(format!("held object {id} does not exist"));
            }
            if self.grip.is_none() {
                return Err("held object without grip offset".into());
            }
        }
        if !(self.welding_current >= 0.0 && self.welding_speed >= 0.0) {
            return Err("welding current and speed must be non-negative".into());
        }
        Ok(())
    }
}

/// Failure of a plan part-way through.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub index: usize,
    pub error: SkillError,
    /// State after the last successful skill, with the failure recorded in
    /// its trace.
    pub state: CellState,
}

/// Linear samples from `a` to `b`, at most `SAMPLE_SPACING_M` apart,
/// including both endpoints exactly.
pub fn sample_segment(a: &Pose6D, b: &Pose6D) -> Vec<Pose6D> {
    let length = a.position().distance(&b.position());
    let steps = ((length / SAMPLE_SPACING_M).ceil() as usize).max(1);
    (0..=steps)
        .map(|i| {
            if i == 0 {
                *a
            } else if i == steps {
                *b
            } else {
                a.interpolate(b, i as Real / steps as Real)
            }
        })
        .collect()
}

/// Samples along a polyline of poses.
pub fn sample_path(poses: &[Pose6D]) -> Vec<Pose6D> {
    let mut out: Vec<Pose6D> = Vec::new();
    for w in poses.windows(2) {
        let seg = sample_segment(&w[0], &w[1]);
        let skip = usize::from(!out.is_empty());
        out.extend(seg.into_iter().skip(skip));
    }
    if out.is_empty() {
        out.extend(poses.first().copied());
    }
    out
}

fn positive(name: &str, v: Real) -> Result<(), SkillError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SkillError::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

fn path_arg(poses: &[Pose6D]) -> Result<(), SkillError> {
    if poses.len() < 2 {
        return Err(SkillError::InvalidArgument(format!(
            "path needs at least 2 poses, got {}",
            poses.len()
        )));
    }
    Ok(())
}

/// Executes skills against a [`CellState`] for one cell configuration.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub cell: CellConfiguration,
    pub models: ModelStore,
}

impl Simulator {
    pub fn new(cell: CellConfiguration, models: ModelStore) -> Self {
        Self { cell, models }
    }

    /// The cell's initial contents: TCP at the robot base, everything on the
    /// table, the configured tool attached.
    pub fn initial_state(&self) -> CellState {
        CellState {
            tcp: self.cell.base_pose,
            attached_tool: self.cell.attached_tool,
            held: None,
            grip: None,
            tool_powered: false,
            objects: self
                .cell
                .objects
                .iter()
                .map(|o| {
                    (
                        o.model.clone(),
                        ObjectState {
                            model: o.model.clone(),
                            pose: o.pose,
                            on_table: true,
                        },
                    )
                })
                .collect(),
            detections: BTreeMap::new(),
            welding_current: 0.0,
            welding_speed: 0.0,
            weld_log: Vec::new(),
            tool_log: Vec::new(),
            confirmations: 0,
            trace: ExecutionTrace::new(),
        }
    }

    fn check_reach(&self, pose: &Pose6D) -> Result<(), SkillError> {
        let distance = pose.position().distance(&self.cell.base_pose.position());
        if distance <= self.cell.reach_radius {
            Ok(())
        } else {
            Err(SkillError::OutOfReach {
                distance,
                reach: self.cell.reach_radius,
            })
        }
    }

    fn check_components(&self, skill: SkillId, needed: &[Component]) -> Result<(), SkillError> {
        let missing: Vec<_> = needed
            .iter()
            .copied()
            .filter(|c| !self.cell.components.contains(*c))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(SkillError::MissingComponents { skill, missing })
        }
    }

    fn check_tool(&self, state: &CellState, call: &SkillCall) -> Result<(), SkillError> {
        let Some(tool) = call.required_tool() else {
            return Ok(());
        };
        if tool == Component::Gripper && !self.cell.components.contains(Component::Gripper) {
            return Err(SkillError::NoGripper);
        }
        if state.attached_tool != Some(tool) {
            return Err(SkillError::ToolNotAttached {
                skill: call.id(),
                tool,
                attached: state
                    .attached_tool
                    .map_or_else(|| "nothing".to_string(), |t| t.to_string()),
            });
        }
        Ok(())
    }

    fn move_tcp(state: &mut CellState, pose: Pose6D) {
        state.tcp = pose;
        if let (Some(id), Some(grip)) = (&state.held, &state.grip) {
            if let Some(o) = state.objects.get_mut(id) {
                o.pose = pose.compose(grip);
            }
        }
    }

    fn log_powered(state: &mut CellState, skill: SkillId, poses: Vec<Pose6D>) {
        if let (true, Some(tool)) = (state.tool_powered, state.attached_tool) {
            state.tool_log.push(ToolEvent {
                tool,
                skill,
                values: BTreeMap::new(),
                poses,
            });
        }
    }

    /// Applies one skill in place. On error the state is untouched.
    pub fn apply(&self, state: &mut CellState, call: &SkillCall) -> Result<(), SkillError> {
        self.check_tool(state, call)?;
        match call {
            SkillCall::MoveTo { pose, speed, accel } => {
                self.check_components(SkillId::MoveTo, &[Component::RobotArm])?;
                positive("speed", *speed)?;
                positive("accel", *accel)?;
                self.check_reach(pose)?;
                let from = state.tcp;
                Self::move_tcp(state, *pose);
                Self::log_powered(state, SkillId::MoveTo, sample_segment(&from, pose));
            }
            SkillCall::DualArmMoveTo {
                pose_a,
                pose_b,
                speed,
                accel,
            } => {
                if self.cell.components.count(Component::RobotArm) < 2 {
                    return Err(SkillError::SecondArmMissing);
                }
                positive("speed", *speed)?;
                positive("accel", *accel)?;
                self.check_reach(pose_a)?;
                self.check_reach(pose_b)?;
                Self::move_tcp(state, *pose_a);
            }
            SkillCall::DetectObject { model } => {
                self.check_components(
                    SkillId::DetectObject,
                    &[Component::DepthSensor, Component::VisionSw],
                )?;
                let pose = state
                    .objects
                    .get(model)
                    .map(|o| o.pose)
                    .ok_or_else(|| SkillError::ObjectVanished(model.clone()))?;
                state.detections.insert(model.clone(), pose);
            }
            SkillCall::OpenGripper => {
                if let Some(id) = state.held.take() {
                    let grip = state.grip.take().expect("held object has a grip");
                    let o = state.objects.get_mut(&id).expect("held object exists");
                    o.pose = state.tcp.compose(&grip);
                    o.on_table = true;
                }
            }
            SkillCall::CloseGripper { force } => {
                if let Some(id) = &state.held {
                    return Err(SkillError::GripperOccupied(id.clone()));
                }
                positive("force", *force)?;
                let tcp = state.tcp.position();
                let mut best: Option<(Real, &String)> = None;
                for (id, o) in &state.objects {
                    let Some(model) = self.models.get(&o.model) else {
                        continue;
                    };
                    let d = o.pose.transform_point(&model.grasp.point).distance(&tcp);
                    if d <= GRASP_TOLERANCE_M && best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, id));
                    }
                }
                let id = best.ok_or(SkillError::NothingToGrasp)?.1.clone();
                let o = state.objects.get_mut(&id).expect("candidate exists");
                state.grip = Some(state.tcp.inverse().compose(&o.pose));
                o.on_table = false;
                state.held = Some(id);
            }
            SkillCall::SetWeldingCurrent { current } => {
                positive("current", *current)?;
                state.welding_current = *current;
            }
            SkillCall::SetWeldingSpeed { speed } => {
                positive("speed", *speed)?;
                state.welding_speed = *speed;
            }
            SkillCall::WeldPoint { pose } => {
                if state.welding_current <= 0.0 || state.welding_speed <= 0.0 {
                    return Err(SkillError::WeldParamsUnset);
                }
                self.check_reach(pose)?;
                Self::move_tcp(state, *pose);
                state.weld_log.push(WeldEvent {
                    kind: WeldKind::Point,
                    current: state.welding_current,
                    speed: state.welding_speed,
                    poses: vec![*pose],
                });
            }
            SkillCall::WeldSeam { poses } => {
                if state.welding_current <= 0.0 || state.welding_speed <= 0.0 {
                    return Err(SkillError::WeldParamsUnset);
                }
                let samples = self.reachable_path(poses)?;
                Self::move_tcp(state, *samples.last().expect("non-empty path"));
                state.weld_log.push(WeldEvent {
                    kind: WeldKind::Seam,
                    current: state.welding_current,
                    speed: state.welding_speed,
                    poses: samples,
                });
            }
            SkillCall::SawAlongTrajectory { poses } => {
                let samples = self.reachable_path(poses)?;
                Self::move_tcp(state, *samples.last().expect("non-empty path"));
                state.tool_log.push(ToolEvent {
                    tool: Component::SawBlade,
                    skill: SkillId::SawAlongTrajectory,
                    values: BTreeMap::new(),
                    poses: samples,
                });
            }
            SkillCall::SetToolPower { tool, on } => {
                state.tool_powered = *on;
                state.tool_log.push(ToolEvent {
                    tool: *tool,
                    skill: SkillId::SetToolPower,
                    values: BTreeMap::from([("on".to_string(), if *on { 1.0 } else { 0.0 })]),
                    poses: Vec::new(),
                });
            }
            SkillCall::DrillScrew { depth, force } => {
                positive("depth", *depth)?;
                positive("force", *force)?;
                state.tool_log.push(ToolEvent {
                    tool: Component::DrillTool,
                    skill: SkillId::DrillScrew,
                    values: BTreeMap::from([
                        ("depth_mm".to_string(), *depth),
                        ("force_n".to_string(), *force),
                    ]),
                    poses: vec![state.tcp],
                });
            }
            SkillCall::ApplyGlue { amount, poses } => {
                positive("amount", *amount)?;
                let samples = self.reachable_path(poses)?;
                Self::move_tcp(state, *samples.last().expect("non-empty path"));
                state.tool_log.push(ToolEvent {
                    tool: Component::GlueTool,
                    skill: SkillId::ApplyGlue,
                    values: BTreeMap::from([("amount_ml".to_string(), *amount)]),
                    poses: samples,
                });
            }
            SkillCall::AttachTool { tool } => {
                if !tool.is_tool() || !self.cell.components.contains(*tool) {
                    return Err(SkillError::ToolUnavailable(*tool));
                }
                if let Some(id) = &state.held {
                    return Err(SkillError::HoldingObject(id.clone()));
                }
                state.attached_tool = Some(*tool);
                state.tool_powered = false;
            }
            SkillCall::AwaitConfirmation => {
                if state.confirmations == 0 {
                    return Err(SkillError::ConfirmationRequired);
                }
                state.confirmations -= 1;
            }
        }
        Ok(())
    }

    fn reachable_path(&self, poses: &[Pose6D]) -> Result<Vec<Pose6D>, SkillError> {
        path_arg(poses)?;
        let samples = sample_path(poses);
        for p in &samples {
            self.check_reach(p)?;
        }
        Ok(samples)
    }

    /// Executes one invocation, returning the successor state with one new
    /// trace event.
    pub fn execute_skill(
        &self,
        state: &CellState,
        inv: &SkillInvocation,
    ) -> Result<CellState, SkillError> {
        let mut next = state.clone();
        self.step(&mut next, inv)?;
        Ok(next)
    }

    /// In-place form of [`Simulator::execute_skill`]; records the success
    /// event, leaves the state untouched on error.
    pub fn step(&self, state: &mut CellState, inv: &SkillInvocation) -> Result<(), SkillError> {
        let before = state.view();
        let logs = (state.weld_log.len(), state.tool_log.len());
        self.apply(state, &inv.call)?;
        let deltas = state.deltas_since(&before, logs);
        state
            .trace
            .record(inv.id(), inv.call.args_json(), Outcome::Ok, deltas);
        Ok(())
    }

    /// Records a failure event for `inv`.
    pub fn record_failure(state: &mut CellState, inv: &SkillInvocation, error: &SkillError) {
        state.trace.record(
            inv.id(),
            inv.call.args_json(),
            Outcome::Failed {
                code: error.code().to_string(),
                message: error.to_string(),
            },
            BTreeMap::new(),
        );
    }

    /// Runs a plan, stopping at the first failing skill.
    pub fn run_plan(
        &self,
        state: CellState,
        plan: &[SkillInvocation],
    ) -> Result<CellState, Box<RunFailure>> {
        let mut state = state;
        for (index, inv) in plan.iter().enumerate() {
            if let Err(error) = self.step(&mut state, inv) {
                Self::record_failure(&mut state, inv, &error);
                return Err(Box::new(RunFailure {
                    index,
                    error,
                    state,
                }));
            }
        }
        Ok(state)
    }
}
