use serde::{Deserialize, Serialize};

use super::Engine;
use crate::model::{InputModality, ParameterValue, ProcessDefinition};
use crate::setup::Setup;

/// One engine operation as recorded in the command log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Command {
    Start {
        process: ProcessDefinition,
    },
    Choose {
        instance: String,
        param: String,
        modality: InputModality,
    },
    Submit {
        channel: InputModality,
        value: ParameterValue,
    },
    Execute,
    Confirm,
}

impl Engine {
    /// Applies a recorded command. Errors are returned as they were when the
    /// command was first applied.
    pub fn apply(&mut self, command: Command) -> Result<(), super::EngineError> {
        match command {
            Command::Start { process } => self.start_session(process).map(drop),
            Command::Choose {
                instance,
                param,
                modality,
            } => self.choose_modality(&instance, &param, modality),
            Command::Submit { channel, value } => self.submit_value(channel, value).map(drop),
            Command::Execute => self.execute().map(drop),
            Command::Confirm => self.confirm_human_step().map(drop),
        }
    }
}

/// Re-runs a command log on a fresh engine.
pub fn replay(setup: Setup, commands: &[Command]) -> Engine {
    let mut engine = Engine::new(setup);
    for c in commands {
        let _ = engine.apply(c.clone());
    }
    engine.drain();
    engine
}
