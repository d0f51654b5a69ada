use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::Axis;
use crate::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("object model {model}: edge {edge} references unknown vertex {vertex}")]
    DanglingEdge {
        model: String,
        edge: String,
        vertex: String,
    },
    #[error("object model {model}: feature {feature} direction is not unit length")]
    NonUnitDirection { model: String, feature: String },
    #[error("object model {model}: {what} is not finite")]
    NonFinite { model: String, what: String },
    #[error("duplicate object model id {0}")]
    DuplicateModel(String),
    #[error("malformed object model: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Cylindrical feature: an axis with a radius. `point` is the feature's
/// reference point on the axis (a face or shoulder position).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderFeature {
    pub point: Vec3,
    pub direction: Vec3,
    pub radius: f64,
}

impl CylinderFeature {
    pub fn axis(&self) -> Axis<f64> {
        Axis {
            point: self.point,
            direction: self.direction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grasp {
    /// Grasp point in the model frame; the TCP goes here.
    pub point: Vec3,
    /// Direction the gripper travels while approaching, in the model frame.
    pub approach: Vec3,
}

/// Geometry of a workpiece. The model frame has its origin at the bottom
/// centre of the object, z up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectModel {
    pub id: String,
    #[serde(default)]
    pub vertices: BTreeMap<String, Vec3>,
    #[serde(default)]
    pub edges: BTreeMap<String, (String, String)>,
    #[serde(default)]
    pub features: BTreeMap<String, CylinderFeature>,
    pub grasp: Grasp,
    pub height: f64,
}

impl ObjectModel {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let model: ObjectModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let non_finite = |what: String| ModelError::NonFinite {
            model: self.id.clone(),
            what,
        };
        for (id, v) in &self.vertices {
            if !v.is_finite() {
                return Err(non_finite(format!("vertex {id}")));
            }
        }
        for (id, (a, b)) in &self.edges {
            for v in [a, b] {
                if !self.vertices.contains_key(v) {
                    return Err(ModelError::DanglingEdge {
                        model: self.id.clone(),
                        edge: id.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        for (id, f) in &self.features {
            if !f.point.is_finite() || !f.radius.is_finite() {
                return Err(non_finite(format!("feature {id}")));
            }
            if (f.direction.norm() - 1.0).abs() > 1e-9 {
                return Err(ModelError::NonUnitDirection {
                    model: self.id.clone(),
                    feature: id.clone(),
                });
            }
        }
        if !self.grasp.point.is_finite() || !self.grasp.approach.is_finite() {
            return Err(non_finite("grasp".into()));
        }
        if !self.height.is_finite() {
            return Err(non_finite("height".into()));
        }
        Ok(())
    }

    pub fn edge_endpoints(&self, edge: &str) -> Option<(Vec3, Vec3)> {
        let (a, b) = self.edges.get(edge)?;
        Some((*self.vertices.get(a)?, *self.vertices.get(b)?))
    }
}

/// Object models keyed by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelStore {
    models: BTreeMap<String, ObjectModel>,
}

impl ModelStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, model: ObjectModel) -> Result<(), ModelError> {
        model.validate()?;
        if self.models.contains_key(&model.id) {
            return Err(ModelError::DuplicateModel(model.id));
        }
        self.models.insert(model.id.clone(), model);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&ObjectModel> {
        self.models.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.models.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObjectModel> {
        self.models.values()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Loads every `*.json` file in `dir`, in file name order.
    pub fn load_dir(dir: &Path) -> Result<Self, ModelError> {
        let io = |source| ModelError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut store = ModelStore::new();
        for path in paths {
            let text = std::fs::read_to_string(&path).map_err(|source| ModelError::Io {
                path: path.display().to_string(),
                source,
            })?;
            store.insert(ObjectModel::from_json(&text)?)?;
        }
        Ok(store)
    }
}

impl FromIterator<ObjectModel> for ModelStore {
    fn from_iter<I: IntoIterator<Item = ObjectModel>>(iter: I) -> Self {
        let mut store = ModelStore::new();
        for m in iter {
            store.models.insert(m.id.clone(), m);
        }
        store
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> ObjectModel {
        serde_json::from_str(
            r#"{
                "id": "cube",
                "vertices": {"a": [0,0,0], "b": [1,0,0]},
                "edges": {"e": ["a", "b"]},
                "features": {"hole": {"point": [0,0,0], "direction": [0,0,1], "radius": 0.01}},
                "grasp": {"point": [0,0,0.5], "approach": [0,0,-1]},
                "height": 1.0
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn valid_model_passes() {
        cube().validate().unwrap();
    }

    #[test]
    fn dangling_edge_rejected() {
        let mut m = cube();
        m.edges.insert("bad".into(), ("a".into(), "zz".into()));
        assert!(matches!(m.validate(), Err(ModelError::DanglingEdge { .. })));
    }

    #[test]
    fn non_unit_feature_rejected() {
        let mut m = cube();
        m.features.get_mut("hole").unwrap().direction = Vec3::new(0.0, 0.0, 2.0);
        assert!(matches!(m.validate(), Err(ModelError::NonUnitDirection { .. })));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut store = ModelStore::new();
        store.insert(cube()).unwrap();
        assert!(matches!(store.insert(cube()), Err(ModelError::DuplicateModel(_))));
    }
}
