//! Configuration tables consulted when inferring skill-level arguments.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::Quaternion;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("malformed table: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("material {material} ({thickness_mm} mm): {reason}")]
    BadEntry {
        material: String,
        thickness_mm: f64,
        reason: &'static str,
    },
    #[error("defaults: {0}")]
    BadDefault(&'static str),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialEntry {
    pub material: String,
    pub thickness_mm: f64,
    pub current_a: f64,
    pub speed_m_s: f64,
}

/// (material, thickness) → welding current and speed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaterialTable {
    entries: Vec<MaterialEntry>,
}

impl MaterialTable {
    pub fn new(entries: Vec<MaterialEntry>) -> Result<Self, TableError> {
        for e in &entries {
            let bad = |reason| TableError::BadEntry {
                material: e.material.clone(),
                thickness_mm: e.thickness_mm,
                reason,
            };
            if !(e.current_a > 0.0 && e.current_a.is_finite()) {
                return Err(bad("current must be positive"));
            }
            if !(e.speed_m_s > 0.0 && e.speed_m_s.is_finite()) {
                return Err(bad("speed must be positive"));
            }
            if !(e.thickness_mm > 0.0 && e.thickness_mm.is_finite()) {
                return Err(bad("thickness must be positive"));
            }
        }
        for (i, a) in entries.iter().enumerate() {
            if entries[..i]
                .iter()
                .any(|b| b.material == a.material && same_thickness(a.thickness_mm, b.thickness_mm))
            {
                return Err(TableError::BadEntry {
                    material: a.material.clone(),
                    thickness_mm: a.thickness_mm,
                    reason: "duplicate entry",
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn from_json(text: &str) -> Result<Self, TableError> {
        Self::new(serde_json::from_str(text)?)
    }

    pub fn lookup(&self, material: &str, thickness_mm: f64) -> Option<&MaterialEntry> {
        self.entries
            .iter()
            .find(|e| e.material == material && same_thickness(e.thickness_mm, thickness_mm))
    }

    pub fn entries(&self) -> &[MaterialEntry] {
        &self.entries
    }
}

fn same_thickness(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

fn default_speed() -> f64 {
    0.25
}
fn default_accel() -> f64 {
    0.5
}
fn default_screw_depth() -> f64 {
    12.0
}
fn default_drill_force() -> f64 {
    40.0
}

/// Configured fallbacks for skill arguments no task parameter determines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub approach_offset_m: f64,
    pub gripper_force_n: f64,
    /// Tool orientation for welding and other top-down tool work, (w,x,y,z).
    pub weld_orientation: Quaternion,
    #[serde(default = "default_speed")]
    pub move_speed_m_s: f64,
    #[serde(default = "default_accel")]
    pub move_accel_m_s2: f64,
    #[serde(default = "default_screw_depth")]
    pub screw_depth_mm: f64,
    #[serde(default = "default_drill_force")]
    pub drill_force_n: f64,
}

impl Defaults {
    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let d: Defaults = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), TableError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.approach_offset_m) {
            return Err(TableError::BadDefault("approach_offset_m must be positive"));
        }
        if !positive(self.gripper_force_n) {
            return Err(TableError::BadDefault("gripper_force_n must be positive"));
        }
        if !positive(self.move_speed_m_s) || !positive(self.move_accel_m_s2) {
            return Err(TableError::BadDefault("move speed and acceleration must be positive"));
        }
        if !positive(self.screw_depth_mm) || !positive(self.drill_force_n) {
            return Err(TableError::BadDefault("screw depth and drill force must be positive"));
        }
        if self.weld_orientation.normalized().is_none() {
            return Err(TableError::BadDefault("weld_orientation must be a non-zero quaternion"));
        }
        Ok(())
    }

    pub fn weld_orientation(&self) -> Quaternion {
        self.weld_orientation
            .normalized()
            .unwrap_or_else(Quaternion::identity)
    }
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            approach_offset_m: 0.10,
            gripper_force_n: 20.0,
            // half turn about x: tool axis pointing down the table's -z
            weld_orientation: Quaternion::from_wxyz(0.0, 1.0, 0.0, 0.0),
            move_speed_m_s: default_speed(),
            move_accel_m_s2: default_accel(),
            screw_depth_mm: default_screw_depth(),
            drill_force_n: default_drill_force(),
        }
    }
}

/// Material table and defaults, as loaded from `materials.json` and
/// `defaults.json`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tables {
    pub materials: MaterialTable,
    pub defaults: Defaults,
}

impl Tables {
    /// Loads `materials.json` and `defaults.json` from `dir`; a missing
    /// defaults file falls back to [`Defaults::default`].
    pub fn load_dir(dir: &Path) -> Result<Self, TableError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| TableError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        let materials = MaterialTable::from_json(&read("materials.json")?)?;
        let defaults = if dir.join("defaults.json").exists() {
            Defaults::from_json(&read("defaults.json")?)?
        } else {
            Defaults::default()
        };
        Ok(Self {
            materials,
            defaults,
        })
    }
}
