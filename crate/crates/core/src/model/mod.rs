//! Shared vocabulary: components, modalities, data types, object models,
//! parameter values and the process representation.

mod component;
mod object;
mod process;
mod skill;
mod value;

pub use component::{Component, ComponentSet};
pub use object::{CylinderFeature, Grasp, ModelError, ModelStore, ObjectModel};
pub use process::{
    validate_process, Domain, ProcessDefinition, SkillMapping, TaskDefinition, TaskInstance,
    ValidationIssue,
};
pub use skill::{
    find_skill, skill_catalog, ArgKind, FormalParam, Quantity, SkillCall, SkillId, SkillInvocation,
    SkillSignature,
};
pub use value::{
    Constraint, DataKind, DataType, FeatureRef, InputModality, Location3D, OutputModality,
    ParameterSpec, ParameterValue, Unit,
};
