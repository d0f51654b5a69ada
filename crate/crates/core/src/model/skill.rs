use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Component;
use crate::Pose6D;

/// Identifier of a skill in the closed catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkillId {
    MoveTo,
    DualArmMoveTo,
    DetectObject,
    OpenGripper,
    CloseGripper,
    SetWeldingCurrent,
    SetWeldingSpeed,
    WeldPoint,
    WeldSeam,
    SawAlongTrajectory,
    SetToolPower,
    DrillScrew,
    ApplyGlue,
    AttachTool,
    AwaitConfirmation,
}

impl SkillId {
    pub const ALL: [SkillId; 15] = [
        SkillId::MoveTo,
        SkillId::DualArmMoveTo,
        SkillId::DetectObject,
        SkillId::OpenGripper,
        SkillId::CloseGripper,
        SkillId::SetWeldingCurrent,
        SkillId::SetWeldingSpeed,
        SkillId::WeldPoint,
        SkillId::WeldSeam,
        SkillId::SawAlongTrajectory,
        SkillId::SetToolPower,
        SkillId::DrillScrew,
        SkillId::ApplyGlue,
        SkillId::AttachTool,
        SkillId::AwaitConfirmation,
    ];

    /// Skills added for plumbing rather than drawn from a task definition.
    pub const PLUMBING: [SkillId; 2] = [SkillId::AttachTool, SkillId::AwaitConfirmation];

    pub fn name(self) -> &'static str {
        match self {
            SkillId::MoveTo => "move_to",
            SkillId::DualArmMoveTo => "dual_arm_move_to",
            SkillId::DetectObject => "detect_object",
            SkillId::OpenGripper => "open_gripper",
            SkillId::CloseGripper => "close_gripper",
            SkillId::SetWeldingCurrent => "set_welding_current",
            SkillId::SetWeldingSpeed => "set_welding_speed",
            SkillId::WeldPoint => "weld_point",
            SkillId::WeldSeam => "weld_seam",
            SkillId::SawAlongTrajectory => "saw_along_trajectory",
            SkillId::SetToolPower => "set_tool_power",
            SkillId::DrillScrew => "drill_screw",
            SkillId::ApplyGlue => "apply_glue",
            SkillId::AttachTool => "attach_tool",
            SkillId::AwaitConfirmation => "await_confirmation",
        }
    }
}

impl fmt::Display for SkillId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SkillId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown skill {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    MetersPerSecond,
    MetersPerSecondSquared,
    Newton,
    Ampere,
    Millimeter,
    Milliliter,
}

/// Kind of a formal skill argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArgKind {
    Pose,
    PoseArray,
    ObjectModelRef,
    Scalar(Quantity),
    Tool,
    Switch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormalParam {
    pub name: &'static str,
    pub kind: ArgKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkillSignature {
    pub id: SkillId,
    pub params: Vec<FormalParam>,
    /// Tool that must be attached. `set_tool_power` takes its tool as an
    /// argument, so its requirement is resolved per call.
    pub required_tool: Option<Component>,
    pub required_components: BTreeSet<Component>,
}

fn sig(
    id: SkillId,
    params: &[(&'static str, ArgKind)],
    tool: Option<Component>,
    components: &[Component],
) -> SkillSignature {
    SkillSignature {
        id,
        params: params
            .iter()
            .map(|&(name, kind)| FormalParam { name, kind })
            .collect(),
        required_tool: tool,
        required_components: components.iter().copied().collect(),
    }
}

/// The closed skill catalog.
pub fn skill_catalog() -> Vec<SkillSignature> {
    use ArgKind::*;
    use Component::*;
    use Quantity::*;
    vec![
        sig(
            SkillId::MoveTo,
            &[("pose", Pose), ("speed", Scalar(MetersPerSecond)), ("accel", Scalar(MetersPerSecondSquared))],
            None,
            &[RobotArm],
        ),
        sig(
            SkillId::DualArmMoveTo,
            &[
                ("pose_a", Pose),
                ("pose_b", Pose),
                ("speed", Scalar(MetersPerSecond)),
                ("accel", Scalar(MetersPerSecondSquared)),
            ],
            None,
            &[RobotArm],
        ),
        sig(SkillId::DetectObject, &[("model", ObjectModelRef)], None, &[DepthSensor, VisionSw]),
        sig(SkillId::OpenGripper, &[], Some(Gripper), &[]),
        sig(SkillId::CloseGripper, &[("force", Scalar(Newton))], Some(Gripper), &[]),
        sig(SkillId::SetWeldingCurrent, &[("current", Scalar(Ampere))], Some(WeldingGun), &[]),
        sig(SkillId::SetWeldingSpeed, &[("speed", Scalar(MetersPerSecond))], Some(WeldingGun), &[]),
        sig(SkillId::WeldPoint, &[("pose", Pose)], Some(WeldingGun), &[]),
        sig(SkillId::WeldSeam, &[("poses", PoseArray)], Some(WeldingGun), &[]),
        sig(SkillId::SawAlongTrajectory, &[("poses", PoseArray)], Some(SawBlade), &[]),
        sig(SkillId::SetToolPower, &[("tool", Tool), ("on", Switch)], None, &[]),
        sig(
            SkillId::DrillScrew,
            &[("depth", Scalar(Millimeter)), ("force", Scalar(Newton))],
            Some(DrillTool),
            &[],
        ),
        sig(
            SkillId::ApplyGlue,
            &[("amount", Scalar(Milliliter)), ("poses", PoseArray)],
            Some(GlueTool),
            &[],
        ),
        sig(SkillId::AttachTool, &[("tool", Tool)], None, &[]),
        sig(SkillId::AwaitConfirmation, &[], None, &[]),
    ]
}

/// Looks up a skill signature by its wire name.
pub fn find_skill(name: &str) -> Option<SkillSignature> {
    let id: SkillId = name.parse().ok()?;
    skill_catalog().into_iter().find(|s| s.id == id)
}

/// A skill call with bound arguments.
///
/// The enum mirrors the catalog one-to-one, so every value already matches
/// its signature in arity and kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "skill", content = "args", rename_all = "snake_case")]
pub enum SkillCall {
    MoveTo {
        pose: Pose6D,
        speed: f64,
        accel: f64,
    },
    DualArmMoveTo {
        pose_a: Pose6D,
        pose_b: Pose6D,
        speed: f64,
        accel: f64,
    },
    DetectObject {
        model: String,
    },
    OpenGripper,
    CloseGripper {
        force: f64,
    },
    SetWeldingCurrent {
        current: f64,
    },
    SetWeldingSpeed {
        speed: f64,
    },
    WeldPoint {
        pose: Pose6D,
    },
    WeldSeam {
        poses: Vec<Pose6D>,
    },
    SawAlongTrajectory {
        poses: Vec<Pose6D>,
    },
    SetToolPower {
        tool: Component,
        on: bool,
    },
    DrillScrew {
        depth: f64,
        force: f64,
    },
    ApplyGlue {
        amount: f64,
        poses: Vec<Pose6D>,
    },
    AttachTool {
        tool: Component,
    },
    AwaitConfirmation,
}

impl SkillCall {
    pub fn id(&self) -> SkillId {
        match self {
            SkillCall::MoveTo { .. } => SkillId::MoveTo,
            SkillCall::DualArmMoveTo { .. } => SkillId::DualArmMoveTo,
            SkillCall::DetectObject { .. } => SkillId::DetectObject,
            SkillCall::OpenGripper => SkillId::OpenGripper,
            SkillCall::CloseGripper { .. } => SkillId::CloseGripper,
            SkillCall::SetWeldingCurrent { .. } => SkillId::SetWeldingCurrent,
            SkillCall::SetWeldingSpeed { .. } => SkillId::SetWeldingSpeed,
            SkillCall::WeldPoint { .. } => SkillId::WeldPoint,
            SkillCall::WeldSeam { .. } => SkillId::WeldSeam,
            SkillCall::SawAlongTrajectory { .. } => SkillId::SawAlongTrajectory,
            SkillCall::SetToolPower { .. } => SkillId::SetToolPower,
            SkillCall::DrillScrew { .. } => SkillId::DrillScrew,
            SkillCall::ApplyGlue { .. } => SkillId::ApplyGlue,
            SkillCall::AttachTool { .. } => SkillId::AttachTool,
            SkillCall::AwaitConfirmation => SkillId::AwaitConfirmation,
        }
    }

    /// Tool that must be attached when this call executes.
    pub fn required_tool(&self) -> Option<Component> {
        match self {
            SkillCall::SetToolPower { tool, .. } => Some(*tool),
            other => skill_catalog()
                .into_iter()
                .find(|s| s.id == other.id())
                .and_then(|s| s.required_tool),
        }
    }

    /// Arguments as a JSON object (`{}` for argument-less skills).
    pub fn args_json(&self) -> serde_json::Value {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(mut map)) => map
                .remove("args")
                .unwrap_or_else(|| serde_json::Value::Object(Default::default())),
            _ => serde_json::Value::Object(Default::default()),
        }
    }
}

/// A skill call attributed to the task instance it was expanded from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillInvocation {
    #[serde(flatten)]
    pub call: SkillCall,
    pub instance: String,
    /// Argument name → where an inferred value came from.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inferred: BTreeMap<String, String>,
}

impl SkillInvocation {
    pub fn new(call: SkillCall, instance: &str) -> Self {
        Self {
            call,
            instance: instance.to_string(),
            inferred: BTreeMap::new(),
        }
    }

    pub fn with_source(mut self, arg: &str, source: impl Into<String>) -> Self {
        self.inferred.insert(arg.to_string(), source.into());
        self
    }

    pub fn id(&self) -> SkillId {
        self.call.id()
    }
}
