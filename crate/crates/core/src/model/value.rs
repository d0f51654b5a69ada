use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Pose6D;

/// Channels a person can use to supply a parameter value.
///
/// The declaration order is the fixed tie-break order used wherever
/// modalities need a deterministic ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InputModality {
    Touch,
    Gesture,
    Speech,
    Pen,
    KeyboardMouse,
}

impl InputModality {
    pub const ALL: [InputModality; 5] = [
        InputModality::Touch,
        InputModality::Gesture,
        InputModality::Speech,
        InputModality::Pen,
        InputModality::KeyboardMouse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InputModality::Touch => "Touch",
            InputModality::Gesture => "Gesture",
            InputModality::Speech => "Speech",
            InputModality::Pen => "Pen",
            InputModality::KeyboardMouse => "KeyboardMouse",
        }
    }

    /// Bridge topic on which values for this modality arrive.
    pub fn input_topic(self) -> &'static str {
        match self {
            InputModality::Touch => "/input/touch",
            InputModality::Gesture => "/input/gesture",
            InputModality::Speech => "/input/speech",
            InputModality::Pen => "/input/pen",
            InputModality::KeyboardMouse => "/input/keyboard_mouse",
        }
    }

    pub fn from_input_topic(topic: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.input_topic() == topic)
    }

    /// Modalities whose values are delivered by a recogniser (or wizard)
    /// rather than by the UI itself.
    pub fn is_recognized(self) -> bool {
        matches!(
            self,
            InputModality::Gesture | InputModality::Speech | InputModality::Pen
        )
    }
}

impl fmt::Display for InputModality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputModality {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown input modality {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OutputModality {
    Display,
    Projection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "mm")]
    Millimeter,
    #[serde(rename = "ml")]
    Milliliter,
    #[serde(rename = "N")]
    Newton,
    #[serde(rename = "A")]
    Ampere,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Millimeter => "mm",
            Unit::Milliliter => "ml",
            Unit::Newton => "N",
            Unit::Ampere => "A",
        })
    }
}

/// Type of a task parameter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DataType {
    ObjectModelRef,
    Location3D,
    Pose6D,
    /// Ordered poses; at least two when used as a trajectory or seam.
    PoseArray,
    VertexRef,
    EdgeRef,
    Number {
        unit: Unit,
    },
    ListSelection {
        catalog: String,
    },
    ConstraintSet,
    MaterialRef,
}

impl DataType {
    pub fn kind(&self) -> DataKind {
        match self {
            DataType::ObjectModelRef => DataKind::ObjectModelRef,
            DataType::Location3D => DataKind::Location3D,
            DataType::Pose6D => DataKind::Pose6D,
            DataType::PoseArray => DataKind::PoseArray,
            DataType::VertexRef => DataKind::VertexRef,
            DataType::EdgeRef => DataKind::EdgeRef,
            DataType::Number { .. } => DataKind::Number,
            DataType::ListSelection { .. } => DataKind::ListSelection,
            DataType::ConstraintSet => DataKind::ConstraintSet,
            DataType::MaterialRef => DataKind::MaterialRef,
        }
    }

    pub fn number(unit: Unit) -> Self {
        DataType::Number { unit }
    }

    pub fn list(catalog: &str) -> Self {
        DataType::ListSelection {
            catalog: catalog.to_string(),
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::Number { unit } => write!(f, "Number({unit})"),
            DataType::ListSelection { catalog } => write!(f, "ListSelection({catalog})"),
            other => f.write_str(other.kind().name()),
        }
    }
}

/// The variant of a [`DataType`] without its payload; keys of the
/// preference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataKind {
    ObjectModelRef,
    Location3D,
    Pose6D,
    PoseArray,
    VertexRef,
    EdgeRef,
    Number,
    ListSelection,
    ConstraintSet,
    MaterialRef,
}

impl DataKind {
    pub const ALL: [DataKind; 10] = [
        DataKind::ObjectModelRef,
        DataKind::Location3D,
        DataKind::Pose6D,
        DataKind::PoseArray,
        DataKind::VertexRef,
        DataKind::EdgeRef,
        DataKind::Number,
        DataKind::ListSelection,
        DataKind::ConstraintSet,
        DataKind::MaterialRef,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DataKind::ObjectModelRef => "ObjectModelRef",
            DataKind::Location3D => "Location3D",
            DataKind::Pose6D => "Pose6D",
            DataKind::PoseArray => "PoseArray",
            DataKind::VertexRef => "VertexRef",
            DataKind::EdgeRef => "EdgeRef",
            DataKind::Number => "Number",
            DataKind::ListSelection => "ListSelection",
            DataKind::ConstraintSet => "ConstraintSet",
            DataKind::MaterialRef => "MaterialRef",
        }
    }
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DataKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown data type {s:?}"))
    }
}

impl Serialize for DataKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for DataKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A typed task input together with the modalities that can supply it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterSpec {
    pub name: String,
    pub data_type: DataType,
    pub modalities: BTreeSet<InputModality>,
    pub required: bool,
}

impl ParameterSpec {
    pub fn new(name: &str, data_type: DataType, modalities: &[InputModality]) -> Self {
        assert!(!modalities.is_empty(), "parameter {name} has no modalities");
        Self {
            name: name.to_string(),
            data_type,
            modalities: modalities.iter().copied().collect(),
            required: true,
        }
    }
}

/// Point in the table frame (origin at table centre, z up), meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Location3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Location3D {
    pub fn to_vec(self) -> crate::Vec3 {
        crate::Vec3::new(self.x, self.y, self.z)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// `object.feature` reference into an object model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureRef {
    pub object: String,
    pub feature: String,
}

impl FeatureRef {
    pub fn new(object: &str, feature: &str) -> Self {
        Self {
            object: object.to_string(),
            feature: feature.to_string(),
        }
    }
}

impl fmt::Display for FeatureRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.object, self.feature)
    }
}

impl FromStr for FeatureRef {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('.') {
            Some((o, f)) if !o.is_empty() && !f.is_empty() => Ok(FeatureRef::new(o, f)),
            _ => Err(format!("feature reference {s:?} is not of the form object.feature")),
        }
    }
}

impl Serialize for FeatureRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Geometric relation between two features of two object models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Constraint {
    Concentric { a: FeatureRef, b: FeatureRef },
    Coplanar { a: FeatureRef, b: FeatureRef },
    Distance { a: FeatureRef, b: FeatureRef, mm: f64 },
    AgainstCollar { a: FeatureRef, b: FeatureRef },
}

impl Constraint {
    pub fn features(&self) -> (&FeatureRef, &FeatureRef) {
        match self {
            Constraint::Concentric { a, b }
            | Constraint::Coplanar { a, b }
            | Constraint::Distance { a, b, .. }
            | Constraint::AgainstCollar { a, b } => (a, b),
        }
    }
}

/// A concrete value for a task parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ParameterValue {
    ObjectModelRef {
        id: String,
    },
    Location3D {
        x: f64,
        y: f64,
        z: f64,
    },
    Pose6D {
        pose: Pose6D,
    },
    PoseArray {
        poses: Vec<Pose6D>,
    },
    VertexRef {
        id: String,
    },
    EdgeRef {
        id: String,
    },
    Number {
        value: f64,
        unit: Unit,
    },
    ListSelection {
        item: String,
    },
    ConstraintSet {
        constraints: Vec<Constraint>,
    },
    /// Row key of the material table. Welding tasks need the thickness
    /// here; the define-material task takes it as a separate parameter.
    MaterialRef {
        material: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        thickness_mm: Option<f64>,
    },
}

impl ParameterValue {
    pub fn kind(&self) -> DataKind {
        match self {
            ParameterValue::ObjectModelRef { .. } => DataKind::ObjectModelRef,
            ParameterValue::Location3D { .. } => DataKind::Location3D,
            ParameterValue::Pose6D { .. } => DataKind::Pose6D,
            ParameterValue::PoseArray { .. } => DataKind::PoseArray,
            ParameterValue::VertexRef { .. } => DataKind::VertexRef,
            ParameterValue::EdgeRef { .. } => DataKind::EdgeRef,
            ParameterValue::Number { .. } => DataKind::Number,
            ParameterValue::ListSelection { .. } => DataKind::ListSelection,
            ParameterValue::ConstraintSet { .. } => DataKind::ConstraintSet,
            ParameterValue::MaterialRef { .. } => DataKind::MaterialRef,
        }
    }

    pub fn object(id: &str) -> Self {
        ParameterValue::ObjectModelRef { id: id.to_string() }
    }

    pub fn location(x: f64, y: f64, z: f64) -> Self {
        ParameterValue::Location3D { x, y, z }
    }

    pub fn number(value: f64, unit: Unit) -> Self {
        ParameterValue::Number { value, unit }
    }

    /// Why this value cannot fill a slot of type `ty`, if it cannot.
    pub fn type_error(&self, ty: &DataType) -> Option<String> {
        if self.kind() != ty.kind() {
            return Some(format!("expected {ty}, got {}", self.kind()));
        }
        match (self, ty) {
            (ParameterValue::Number { value, unit }, DataType::Number { unit: want }) => {
                if unit != want {
                    Some(format!("expected unit {want}, got {unit}"))
                } else if !value.is_finite() {
                    Some("number is not finite".to_string())
                } else {
                    None
                }
            }
            (ParameterValue::Location3D { x, y, z }, _) => {
                (!(x.is_finite() && y.is_finite() && z.is_finite()))
                    .then(|| "location has a non-finite component".to_string())
            }
            (ParameterValue::PoseArray { poses }, _) if poses.len() < 2 => {
                Some(format!("pose array needs at least 2 poses, got {}", poses.len()))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_format_of_object_ref() {
        let v: ParameterValue =
            serde_json::from_str(r#"{"kind":"ObjectModelRef","id":"bearing"}"#).unwrap();
        assert_eq!(v, ParameterValue::object("bearing"));
    }

    #[test]
    fn number_unit_is_checked() {
        let v = ParameterValue::number(2.0, Unit::Milliliter);
        assert!(v.type_error(&DataType::number(Unit::Millimeter)).is_some());
        assert!(v.type_error(&DataType::number(Unit::Milliliter)).is_none());
    }

    #[test]
    fn feature_ref_parsing() {
        assert_eq!("bearing.bore".parse::<FeatureRef>().unwrap(), FeatureRef::new("bearing", "bore"));
        assert!("bearing".parse::<FeatureRef>().is_err());
    }

    #[test]
    fn constraint_wire_format() {
        let c: Constraint =
            serde_json::from_str(r#"{"type":"Distance","a":"bearing.bore","b":"axis.shaft","mm":3.5}"#)
                .unwrap();
        assert_eq!(
            c,
            Constraint::Distance {
                a: FeatureRef::new("bearing", "bore"),
                b: FeatureRef::new("axis", "shaft"),
                mm: 3.5
            }
        );
    }
}
