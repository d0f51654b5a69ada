use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Component, DataKind, ParameterSpec, ParameterValue, SkillId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Domain {
    Assembly,
    Welding,
    Woodworking,
    MetalProcessing,
}

/// One way of realising a task with skills, feasible when the cell has
/// every listed component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillMapping {
    pub id: String,
    pub required_components: BTreeSet<Component>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskDefinition {
    pub id: String,
    pub domain: Domain,
    pub params: Vec<ParameterSpec>,
    /// Skills named on the task's own definition.
    pub required_skills: BTreeSet<SkillId>,
    /// Tasks whose parameters and skills this task reuses (e.g. point
    /// welding embeds the define-material step).
    pub includes: Vec<String>,
    pub mappings: Vec<SkillMapping>,
}

impl TaskDefinition {
    pub fn param(&self, name: &str) -> Option<&ParameterSpec> {
        self.params.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub id: String,
    pub task: String,
    /// Parameter name → value; `null` marks a slot still to be acquired.
    #[serde(default)]
    pub params: BTreeMap<String, Option<ParameterValue>>,
}

impl TaskInstance {
    pub fn new(id: &str, task: &str) -> Self {
        Self {
            id: id.to_string(),
            task: task.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: ParameterValue) -> Self {
        self.params.insert(name.to_string(), Some(value));
        self
    }

    pub fn value(&self, name: &str) -> Option<&ParameterValue> {
        self.params.get(name).and_then(|v| v.as_ref())
    }
}

/// An abstract robot program: an ordered list of task instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessDefinition {
    pub id: String,
    #[serde(default)]
    pub tasks: Vec<TaskInstance>,
}

impl ProcessDefinition {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("process serialises")
    }

    pub fn instance(&self, id: &str) -> Option<&TaskInstance> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn instance_mut(&mut self, id: &str) -> Option<&mut TaskInstance> {
        self.tasks.iter_mut().find(|t| t.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum ValidationIssue {
    UnknownTask { instance: String, task: String },
    DuplicateInstance { instance: String },
    MissingParameter { instance: String, param: String },
    UnknownParameter { instance: String, param: String },
    TypeMismatch { instance: String, param: String, detail: String },
    OffTable { instance: String, param: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::UnknownTask { instance, task } => {
                write!(f, "{instance}: unknown task {task}")
            }
            ValidationIssue::DuplicateInstance { instance } => {
                write!(f, "{instance}: duplicate instance id")
            }
            ValidationIssue::MissingParameter { instance, param } => {
                write!(f, "{instance}: missing required parameter {param}")
            }
            ValidationIssue::UnknownParameter { instance, param } => {
                write!(f, "{instance}: unknown parameter {param}")
            }
            ValidationIssue::TypeMismatch { instance, param, detail } => {
                write!(f, "{instance}: parameter {param}: {detail}")
            }
            ValidationIssue::OffTable { instance, param } => {
                write!(f, "{instance}: parameter {param} lies below the table plane")
            }
        }
    }
}

/// Checks a process against a task catalog. An empty report means the
/// process can be expanded as-is.
pub fn validate_process(process: &ProcessDefinition, catalog: &[TaskDefinition]) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let mut seen = BTreeSet::new();
    for inst in &process.tasks {
        if !seen.insert(inst.id.as_str()) {
            issues.push(ValidationIssue::DuplicateInstance {
                instance: inst.id.clone(),
            });
        }
        let Some(def) = catalog.iter().find(|d| d.id == inst.task) else {
            issues.push(ValidationIssue::UnknownTask {
                instance: inst.id.clone(),
                task: inst.task.clone(),
            });
            continue;
        };
        for name in inst.params.keys() {
            if def.param(name).is_none() {
                issues.push(ValidationIssue::UnknownParameter {
                    instance: inst.id.clone(),
                    param: name.clone(),
                });
            }
        }
        for spec in &def.params {
            match inst.value(&spec.name) {
                None if spec.required => issues.push(ValidationIssue::MissingParameter {
                    instance: inst.id.clone(),
                    param: spec.name.clone(),
                }),
                None => {}
                Some(value) => {
                    if let Some(detail) = value.type_error(&spec.data_type) {
                        issues.push(ValidationIssue::TypeMismatch {
                            instance: inst.id.clone(),
                            param: spec.name.clone(),
                            detail,
                        });
                    } else if let ParameterValue::Location3D { z, .. } = value {
                        if spec.data_type.kind() == DataKind::Location3D && *z < 0.0 {
                            issues.push(ValidationIssue::OffTable {
                                instance: inst.id.clone(),
                                param: spec.name.clone(),
                            });
                        }
                    }
                }
            }
        }
    }
    issues
}
