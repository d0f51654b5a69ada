use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{Component, ComponentSet, ModelStore};
use crate::Pose6D;

#[derive(Debug, thiserror::Error)]
pub enum CellError {
    #[error("malformed cell configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("reach radius must be positive, got {0}")]
    BadReach(f64),
    #[error("object {0} placed twice")]
    DuplicateObject(String),
    #[error("initially attached {0} is not a tool declared by the cell")]
    BadInitialTool(Component),
    #[error("object {0} has no model")]
    UnknownModel(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedObject {
    pub model: String,
    pub pose: Pose6D,
}

/// Declared components and initial contents of a robot cell. All poses are
/// in the table frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellConfiguration {
    pub id: String,
    pub components: ComponentSet,
    #[serde(default)]
    pub base_pose: Pose6D,
    pub reach_radius: f64,
    #[serde(default)]
    pub objects: Vec<PlacedObject>,
    #[serde(default)]
    pub attached_tool: Option<Component>,
}

impl CellConfiguration {
    /// A cell with the given components, base at the origin and a 1 m reach.
    pub fn with_components<I: IntoIterator<Item = Component>>(id: &str, components: I) -> Self {
        Self {
            id: id.to_string(),
            components: components.into_iter().collect(),
            base_pose: Pose6D::identity(),
            reach_radius: 1.0,
            objects: Vec::new(),
            attached_tool: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CellError> {
        let cell: CellConfiguration = serde_json::from_str(text)?;
        cell.validate()?;
        Ok(cell)
    }

    pub fn validate(&self) -> Result<(), CellError> {
        if !(self.reach_radius > 0.0 && self.reach_radius.is_finite()) {
            return Err(CellError::BadReach(self.reach_radius));
        }
        let mut seen = BTreeSet::new();
        for o in &self.objects {
            if !seen.insert(o.model.as_str()) {
                return Err(CellError::DuplicateObject(o.model.clone()));
            }
        }
        if let Some(tool) = self.attached_tool {
            if !tool.is_tool() || !self.components.contains(tool) {
                return Err(CellError::BadInitialTool(tool));
            }
        }
        Ok(())
    }

    /// Validation plus a check that every placed object has a model.
    pub fn validate_with_models(&self, models: &ModelStore) -> Result<(), CellError> {
        self.validate()?;
        match self.objects.iter().find(|o| !models.contains(&o.model)) {
            Some(o) => Err(CellError::UnknownModel(o.model.clone())),
            None => Ok(()),
        }
    }

    pub fn object_pose(&self, model: &str) -> Option<Pose6D> {
        self.objects.iter().find(|o| o.model == model).map(|o| o.pose)
    }
}
