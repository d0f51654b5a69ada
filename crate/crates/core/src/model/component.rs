use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Hardware and software building blocks a robot cell can declare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    Touchscreen,
    DepthSensor,
    Microphone,
    InfraredCameraPair,
    TrackedPen,
    Projector,
    Keyboard,
    Mouse,
    RobotArm,
    Gripper,
    WeldingGun,
    SawBlade,
    GrindTool,
    DeburrTool,
    MillTool,
    DrillTool,
    GlueTool,
    GestureRecognizerSw,
    SpeechRecognizerSw,
    PenTrackerSw,
    VisionSw,
    WizardConsole,
}

impl Component {
    pub const ALL: [Component; 22] = [
        Component::Touchscreen,
        Component::DepthSensor,
        Component::Microphone,
        Component::InfraredCameraPair,
        Component::TrackedPen,
        Component::Projector,
        Component::Keyboard,
        Component::Mouse,
        Component::RobotArm,
        Component::Gripper,
        Component::WeldingGun,
        Component::SawBlade,
        Component::GrindTool,
        Component::DeburrTool,
        Component::MillTool,
        Component::DrillTool,
        Component::GlueTool,
        Component::GestureRecognizerSw,
        Component::SpeechRecognizerSw,
        Component::PenTrackerSw,
        Component::VisionSw,
        Component::WizardConsole,
    ];

    /// End effectors that can be mounted on the arm.
    pub const TOOLS: [Component; 8] = [
        Component::Gripper,
        Component::WeldingGun,
        Component::SawBlade,
        Component::GrindTool,
        Component::DeburrTool,
        Component::MillTool,
        Component::DrillTool,
        Component::GlueTool,
    ];

    pub fn is_tool(self) -> bool {
        Self::TOOLS.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Touchscreen => "Touchscreen",
            Component::DepthSensor => "DepthSensor",
            Component::Microphone => "Microphone",
            Component::InfraredCameraPair => "InfraredCameraPair",
            Component::TrackedPen => "TrackedPen",
            Component::Projector => "Projector",
            Component::Keyboard => "Keyboard",
            Component::Mouse => "Mouse",
            Component::RobotArm => "RobotArm",
            Component::Gripper => "Gripper",
            Component::WeldingGun => "WeldingGun",
            Component::SawBlade => "SawBlade",
            Component::GrindTool => "GrindTool",
            Component::DeburrTool => "DeburrTool",
            Component::MillTool => "MillTool",
            Component::DrillTool => "DrillTool",
            Component::GlueTool => "GlueTool",
            Component::GestureRecognizerSw => "GestureRecognizerSw",
            Component::SpeechRecognizerSw => "SpeechRecognizerSw",
            Component::PenTrackerSw => "PenTrackerSw",
            Component::VisionSw => "VisionSw",
            Component::WizardConsole => "WizardConsole",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Component::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown component {s:?}"))
    }
}

/// Components declared by a cell, with multiplicity.
///
/// Rules treat this as a set; multiplicity only matters for hardware that
/// can legitimately appear twice (a second `RobotArm`). Serialised as a
/// sorted JSON list with repeats.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentSet {
    counts: BTreeMap<Component, usize>,
}

impl ComponentSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, c: Component) {
        *self.counts.entry(c).or_insert(0) += 1;
    }

    pub fn contains(&self, c: Component) -> bool {
        self.counts.contains_key(&c)
    }

    pub fn count(&self, c: Component) -> usize {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    pub fn contains_all<'a, I: IntoIterator<Item = &'a Component>>(&self, required: I) -> bool {
        required.into_iter().all(|c| self.contains(*c))
    }

    /// Distinct components in enumeration order.
    pub fn iter(&self) -> impl Iterator<Item = Component> + '_ {
        self.counts.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

impl FromIterator<Component> for ComponentSet {
    fn from_iter<I: IntoIterator<Item = Component>>(iter: I) -> Self {
        let mut set = ComponentSet::new();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl Serialize for ComponentSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let flat: Vec<Component> = self
            .counts
            .iter()
            .flat_map(|(c, n)| std::iter::repeat_n(*c, *n))
            .collect();
        flat.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComponentSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Vec::<Component>::deserialize(d)?.into_iter().collect())
    }
}
