use std::collections::{BTreeMap, BTreeSet};

use super::KbError;
use crate::model::{DataKind, InputModality};

/// Compiled-in preference table.
pub const PREFERENCES_JSON: &str = include_str!("../../data/preferences.json");

/// Per data type ranking of input modalities, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceTable {
    rows: BTreeMap<DataKind, Vec<InputModality>>,
}

impl PreferenceTable {
    pub fn empty() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }

    /// Builds a table, rejecting rows with duplicate modalities.
    pub fn from_rows(rows: BTreeMap<DataKind, Vec<InputModality>>) -> Result<Self, KbError> {
        for (kind, row) in &rows {
            let distinct: BTreeSet<_> = row.iter().collect();
            if distinct.len() != row.len() {
                return Err(KbError::MalformedTable(format!(
                    "row {kind} lists a modality twice"
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Parses a `preferences.json` document.
    pub fn load(text: &str) -> Result<Self, KbError> {
        if text.trim().is_empty() {
            return Err(KbError::MalformedTable("empty document".into()));
        }
        let raw: BTreeMap<String, Vec<String>> =
            serde_json::from_str(text).map_err(|e| KbError::MalformedTable(e.to_string()))?;
        let mut rows = BTreeMap::new();
        for (kind, row) in raw {
            let kind: DataKind = kind.parse().map_err(KbError::MalformedTable)?;
            let row = row
                .iter()
                .map(|m| m.parse::<InputModality>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(KbError::MalformedTable)?;
            rows.insert(kind, row);
        }
        Self::from_rows(rows)
    }

    pub fn row(&self, kind: DataKind) -> &[InputModality] {
        self.rows.get(&kind).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn rows(&self) -> &BTreeMap<DataKind, Vec<InputModality>> {
        &self.rows
    }

    pub fn to_json_pretty(&self) -> String {
        let raw: BTreeMap<&str, Vec<&str>> = self
            .rows
            .iter()
            .map(|(k, row)| (k.name(), row.iter().map(|m| m.name()).collect()))
            .collect();
        serde_json::to_string_pretty(&raw).expect("table serialises")
    }

    /// Rows restricted to the given data kinds.
    pub fn restricted_to(&self, kinds: &BTreeSet<DataKind>) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .filter(|(k, _)| kinds.contains(k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }
}

impl Default for PreferenceTable {
    fn default() -> Self {
        Self::load(PREFERENCES_JSON).expect("shipped preference table is valid")
    }
}
