//! Everything needed to plan and run processes for one cell. Next to a cell
//! file the loader expects `models/*.json`, `materials.json` and optionally
//! `defaults.json`.

use std::path::{Path, PathBuf};

use crate::kb::{CellConfiguration, CellError, KnowledgeBase};
use crate::model::{ModelError, ModelStore, ProcessDefinition, SkillInvocation, TaskDefinition};
use crate::sim::Simulator;
use crate::tasks::{resolve_tool_changes, task_catalog, ExpandError, Planner, TableError, Tables};

#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone)]
pub struct Setup {
    pub cell: CellConfiguration,
    pub models: ModelStore,
    pub tables: Tables,
    pub kb: KnowledgeBase,
    pub catalog: Vec<TaskDefinition>,
}

impl Setup {
    pub fn new(cell: CellConfiguration, models: ModelStore, tables: Tables) -> Self {
        Self {
            cell,
            models,
            tables,
            kb: KnowledgeBase::default(),
            catalog: task_catalog(),
        }
    }

    /// Loads a cell file with models and tables from the same directory.
    pub fn load(cell_path: &Path) -> Result<Self, SetupError> {
        let dir = cell_path.parent().unwrap_or_else(|| Path::new("."));
        Self::load_with(cell_path, &dir.join("models"), dir)
    }

    pub fn load_with(cell_path: &Path, models_dir: &Path, tables_dir: &Path) -> Result<Self, SetupError> {
        let text = std::fs::read_to_string(cell_path).map_err(|source| SetupError::Io {
            path: cell_path.to_path_buf(),
            source,
        })?;
        let cell = CellConfiguration::from_json(&text)?;
        let models = if models_dir.is_dir() {
            ModelStore::load_dir(models_dir)?
        } else {
            ModelStore::new()
        };
        cell.validate_with_models(&models)?;
        let tables = Tables::load_dir(tables_dir)?;
        Ok(Self::new(cell, models, tables))
    }

    pub fn planner(&self) -> Planner<'_> {
        Planner::new(&self.kb, &self.cell, &self.models, &self.tables, &self.catalog)
    }

    /// Expands a whole process and makes tool changes explicit.
    pub fn plan(&self, process: &ProcessDefinition) -> Result<Vec<SkillInvocation>, ExpandError> {
        let plan = self.planner().expand_all(&process.tasks)?;
        Ok(resolve_tool_changes(plan, self.cell.attached_tool))
    }

    pub fn simulator(&self) -> Simulator {
        Simulator::new(self.cell.clone(), self.models.clone())
    }
}
