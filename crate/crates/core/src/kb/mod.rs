//! Knowledge base: which modalities a cell offers, how they rank per data
//! type, and which skill mapping of a task a cell can realise.
//!
//! Availability is a closed rule set: a modality is available iff at least
//! one of its alternative component sets is fully present in the cell. A
//! `WizardConsole` stands in for recogniser software (never for sensors),
//! so a cell with mounted but unplugged sensors plus an operator still
//! offers gesture, speech and pen input.

mod cell;
mod preferences;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use cell::{CellConfiguration, CellError, PlacedObject};
pub use preferences::{PreferenceTable, PREFERENCES_JSON};

use crate::model::{
    Component, ComponentSet, InputModality, OutputModality, ParameterSpec, SkillMapping,
    TaskDefinition,
};

/// Compiled-in availability rules.
pub const RULES_JSON: &str = include_str!("../../data/rules.json");

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("malformed preference table: {0}")]
    MalformedTable(String),
    #[error("malformed rule set: {0}")]
    MalformedRules(String),
    #[error("no skill mapping of task {task} is feasible in cell {cell}")]
    NoFeasibleMapping { task: String, cell: String },
}

/// Availability condition for one modality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModalityRule<M> {
    pub modality: M,
    pub requires_any: Vec<BTreeSet<Component>>,
}

impl<M> ModalityRule<M> {
    pub fn satisfied_by(&self, components: &ComponentSet) -> bool {
        self.requires_any
            .iter()
            .any(|alt| components.contains_all(alt))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub input: Vec<ModalityRule<InputModality>>,
    #[serde(default)]
    pub output: Vec<ModalityRule<OutputModality>>,
}

impl RuleSet {
    pub fn from_json(text: &str) -> Result<Self, KbError> {
        let rules: RuleSet =
            serde_json::from_str(text).map_err(|e| KbError::MalformedRules(e.to_string()))?;
        for r in &rules.input {
            if r.requires_any.is_empty() || r.requires_any.iter().any(BTreeSet::is_empty) {
                return Err(KbError::MalformedRules(format!(
                    "rule for {} has an empty alternative",
                    r.modality
                )));
            }
        }
        let distinct: BTreeSet<_> = rules.input.iter().map(|r| r.modality).collect();
        if distinct.len() != rules.input.len() {
            return Err(KbError::MalformedRules("duplicate modality rule".into()));
        }
        Ok(rules)
    }

    /// Components mentioned by any input rule.
    pub fn relevant_components(&self) -> BTreeSet<Component> {
        self.input
            .iter()
            .flat_map(|r| r.requires_any.iter().flatten().copied())
            .collect()
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::from_json(RULES_JSON).expect("shipped rules are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KnowledgeBase {
    pub rules: RuleSet,
    pub preferences: PreferenceTable,
}

impl KnowledgeBase {
    pub fn new(rules: RuleSet, preferences: PreferenceTable) -> Self {
        Self { rules, preferences }
    }

    pub fn available_modalities(&self, cell: &CellConfiguration) -> BTreeSet<InputModality> {
        self.available_for(&cell.components)
    }

    pub fn available_for(&self, components: &ComponentSet) -> BTreeSet<InputModality> {
        self.rules
            .input
            .iter()
            .filter(|r| r.satisfied_by(components))
            .map(|r| r.modality)
            .collect()
    }

    pub fn available_outputs(&self, cell: &CellConfiguration) -> BTreeSet<OutputModality> {
        self.rules
            .output
            .iter()
            .filter(|r| r.satisfied_by(&cell.components))
            .map(|r| r.modality)
            .collect()
    }

    /// Applicable ∩ available, best first.
    pub fn modalities_for_parameter(
        &self,
        spec: &ParameterSpec,
        cell: &CellConfiguration,
    ) -> Vec<InputModality> {
        self.rank(spec.data_type.kind(), &spec.modalities, &cell.components)
    }

    pub fn preferred_modality(
        &self,
        spec: &ParameterSpec,
        cell: &CellConfiguration,
    ) -> Option<InputModality> {
        self.modalities_for_parameter(spec, cell).first().copied()
    }

    /// Orders `applicable ∩ available(components)` by the preference row
    /// for `kind`; unlisted modalities follow in enumeration order.
    pub fn rank(
        &self,
        kind: crate::model::DataKind,
        applicable: &BTreeSet<InputModality>,
        components: &ComponentSet,
    ) -> Vec<InputModality> {
        let available = self.available_for(components);
        let row = self.preferences.row(kind);
        let mut ranked: Vec<InputModality> = applicable
            .iter()
            .copied()
            .filter(|m| available.contains(m))
            .collect();
        ranked.sort_by_key(|m| {
            let pos = row.iter().position(|r| r == m).unwrap_or(usize::MAX);
            (pos, *m)
        });
        ranked
    }

    /// First mapping, in declaration order, whose components the cell has.
    pub fn select_mapping<'t>(
        &self,
        task: &'t TaskDefinition,
        cell: &CellConfiguration,
    ) -> Result<&'t SkillMapping, KbError> {
        task.mappings
            .iter()
            .find(|m| cell.components.contains_all(&m.required_components))
            .ok_or_else(|| KbError::NoFeasibleMapping {
                task: task.id.clone(),
                cell: cell.id.clone(),
            })
    }
}
