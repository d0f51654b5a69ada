use std::collections::BTreeSet;

use serde::Deserialize;
use serde_json::{json, Value};

use super::broker::Host;
use crate::model::{DataKind, InputModality, ParameterValue, ProcessDefinition};
use crate::session::{Engine, EngineError, Phase, TOPIC_PARAMETER_REQUEST, TOPIC_STATE};
use crate::tasks::applicable_for_kind;

/// Exposes an [`Engine`] and its knowledge base as bridge services.
///
/// | service | args |
/// |---|---|
/// | `engine.start_session` | `{process?}`; falls back to the default process |
/// | `engine.choose_modality` | `{instance, param, modality}` |
/// | `engine.submit_parameter` | `{channel, value}` |
/// | `engine.execute` | `{}` |
/// | `engine.confirm` | `{}` |
/// | `engine.status` | `{}` |
/// | `kb.modalities_for_parameter` | `{dataType, task?, param?}` |
/// | `kb.available_modalities` | `{}` |
pub struct EngineHost {
    engine: Engine,
    default_process: Option<ProcessDefinition>,
    pending: Vec<(String, Value)>,
}

fn bad_args(e: impl std::fmt::Display) -> Value {
    json!({ "code": "BadArguments", "message": e.to_string() })
}

fn parse_args<T: for<'de> Deserialize<'de>>(args: &Value) -> Result<T, Value> {
    serde_json::from_value(args.clone()).map_err(bad_args)
}

#[derive(Deserialize)]
struct StartArgs {
    process: Option<ProcessDefinition>,
}

#[derive(Deserialize)]
struct ChooseArgs {
    instance: String,
    param: String,
    modality: InputModality,
}

#[derive(Deserialize)]
struct SubmitArgs {
    channel: InputModality,
    value: ParameterValue,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ModalitiesArgs {
    data_type: String,
    task: Option<String>,
    param: Option<String>,
}

impl EngineHost {
    pub fn new(engine: Engine) -> Self {
        Self {
            engine,
            default_process: None,
            pending: Vec::new(),
        }
    }

    /// Process started by `engine.start_session` when the call names none.
    pub fn with_default_process(mut self, process: ProcessDefinition) -> Self {
        self.default_process = Some(process);
        self
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn engine_mut(&mut self) -> &mut Engine {
        &mut self.engine
    }

    fn status(&self) -> Value {
        match self.engine.session() {
            None => json!({ "session": null }),
            Some(s) => json!({
                "session": s.id,
                "phase": s.phase,
                "unset": self.engine.unset_required(&s.process).len(),
                "request": s.request(),
                "trace_len": s.trace().len(),
            }),
        }
    }

    fn modalities(&self, args: &Value) -> Result<Value, Value> {
        let a: ModalitiesArgs = parse_args(args)?;
        let kind: DataKind = a.data_type.parse().map_err(bad_args)?;
        let setup = self.engine.setup();
        let applicable: BTreeSet<InputModality> = match (&a.task, &a.param) {
            (Some(task), Some(param)) => {
                let spec = setup
                    .catalog
                    .iter()
                    .find(|t| &t.id == task)
                    .and_then(|t| t.param(param))
                    .ok_or_else(|| bad_args(format!("unknown parameter {task}.{param}")))?;
                if spec.data_type.kind() != kind {
                    return Err(bad_args(format!(
                        "{task}.{param} is {}, not {kind}",
                        spec.data_type
                    )));
                }
                spec.modalities.clone()
            }
            (None, None) => applicable_for_kind(&setup.catalog, kind),
            _ => return Err(bad_args("task and param must be given together")),
        };
        let ranked = setup.kb.rank(kind, &applicable, &setup.cell.components);
        Ok(json!(ranked))
    }

    fn engine_result<T: serde::Serialize>(r: Result<T, EngineError>) -> Result<Value, Value> {
        r.map(|v| json!(v)).map_err(|e| e.to_json())
    }
}

impl Host for EngineHost {
    fn call_service(&mut self, service: &str, args: &Value) -> Option<Result<Value, Value>> {
        let result = match service {
            "engine.start_session" => (|| {
                let a: StartArgs = parse_args(args)?;
                let process = a
                    .process
                    .or_else(|| self.default_process.clone())
                    .ok_or_else(|| bad_args("no process given and no default process"))?;
                let request = self.engine.start_session(process).map_err(|e| e.to_json())?;
                let session = self.engine.session().map(|s| s.id.clone());
                Ok(json!({ "session": session, "request": request }))
            })(),
            "engine.choose_modality" => (|| {
                let a: ChooseArgs = parse_args(args)?;
                Self::engine_result(self.engine.choose_modality(&a.instance, &a.param, a.modality))?;
                Ok(json!({ "phase": self.engine.phase() }))
            })(),
            "engine.submit_parameter" => (|| {
                let a: SubmitArgs = parse_args(args)?;
                match self.engine.submit_value(a.channel, a.value) {
                    Ok(crate::session::SubmitOutcome::Next(r)) => Ok(json!({ "next": r })),
                    Ok(crate::session::SubmitOutcome::ReadyToExecute) => Ok(json!({ "ready": true })),
                    Err(e) => Err(e.to_json()),
                }
            })(),
            "engine.execute" => self.engine.execute().map_err(|e| e.to_json()).map(|events| {
                json!({ "phase": self.engine.phase(), "events": events.len() })
            }),
            "engine.confirm" => self
                .engine
                .confirm_human_step()
                .map_err(|e| e.to_json())
                .map(|events| json!({ "phase": self.engine.phase(), "events": events.len() })),
            "engine.status" => Ok(self.status()),
            "kb.modalities_for_parameter" => self.modalities(args),
            "kb.available_modalities" => {
                let setup = self.engine.setup();
                Ok(json!(setup.kb.available_modalities(&setup.cell)))
            }
            _ => return None,
        };
        Some(result)
    }

    fn on_publish(&mut self, topic: &str, msg: &Value) {
        let Some(result) = self.engine.handle_input(topic, msg) else {
            return;
        };
        let Err(e) = result else { return };
        // the engine publishes type and channel mismatches itself
        if matches!(e, EngineError::TypeMismatch { .. } | EngineError::ChannelMismatch { .. }) {
            return;
        }
        let mut out = json!({ "error": e.to_json() });
        if let Some(s) = self.engine.session() {
            out["session"] = json!(s.id);
            out["phase"] = json!(s.phase);
        }
        self.pending.push((TOPIC_STATE.to_string(), out));
    }

    fn on_subscribe(&mut self, topic: &str) -> Vec<Value> {
        if topic != TOPIC_PARAMETER_REQUEST {
            return Vec::new();
        }
        match self.engine.session() {
            Some(s) if matches!(s.phase, Phase::Editing | Phase::AwaitingValue { .. }) => {
                s.request().map(|r| json!(r)).into_iter().collect()
            }
            _ => Vec::new(),
        }
    }

    fn take_notifications(&mut self) -> Vec<(String, Value)> {
        let mut out: Vec<_> = self.engine.drain().into_iter().map(|n| (n.topic, n.msg)).collect();
        out.append(&mut self.pending);
        out
    }
}
