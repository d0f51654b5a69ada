//! Interactive programming sessions.
//!
//! The engine walks the unset parameters of a process in document order,
//! offers the ranked modalities for each, accepts a value on the chosen
//! channel only, then expands and runs the process on the simulated cell.
//! Everything the outside world should see is queued as a [`Notification`]
//! and drained by whoever hosts the engine.

mod command;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use command::{replay, Command};

use crate::model::{
    validate_process, DataType, InputModality, ParameterValue, ProcessDefinition, SkillId,
    ValidationIssue,
};
use crate::setup::Setup;
use crate::sim::{CellState, ExecutionTrace, Simulator, SkillError, TraceEvent};

pub const TOPIC_PARAMETER_REQUEST: &str = "/engine/parameter_request";
pub const TOPIC_STATE: &str = "/engine/state";
pub const TOPIC_TRACE: &str = "/engine/trace";
pub const TOPIC_CONFIRM: &str = "/engine/confirm";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("no active session")]
    NoSession,
    #[error("process is not structurally valid: {}", issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidProcess { issues: Vec<ValidationIssue> },
    #[error("{instance}.{param}: no input modality is available in this cell")]
    NoModalityAvailable { instance: String, param: String },
    #[error("{modality} is not offered for the current parameter")]
    ModalityNotOffered { modality: InputModality },
    #[error("{op} is not allowed while {phase}")]
    WrongPhase { op: &'static str, phase: String },
    #[error("{instance}.{param} is not the parameter being requested")]
    NotRequested { instance: String, param: String },
    #[error("type mismatch: {detail}")]
    TypeMismatch { detail: String },
    #[error("value arrived on {got}, expected {expected}")]
    ChannelMismatch {
        expected: InputModality,
        got: InputModality,
    },
    #[error("no human step is waiting for confirmation")]
    NothingPending,
    #[error("{unset} required parameters are still unset")]
    NotReady { unset: usize },
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::NoSession => "NoSession",
            EngineError::InvalidProcess { .. } => "InvalidProcess",
            EngineError::NoModalityAvailable { .. } => "NoModalityAvailable",
            EngineError::ModalityNotOffered { .. } => "ModalityNotOffered",
            EngineError::WrongPhase { .. } => "WrongPhase",
            EngineError::NotRequested { .. } => "NotRequested",
            EngineError::TypeMismatch { .. } => "TypeMismatch",
            EngineError::ChannelMismatch { .. } => "ChannelMismatch",
            EngineError::NothingPending => "NothingPending",
            EngineError::NotReady { .. } => "NotReady",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "code": self.code(), "message": self.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase")]
pub enum Phase {
    Editing,
    AwaitingValue {
        instance: String,
        param: String,
        modality: InputModality,
    },
    Executing {
        awaiting_confirmation: bool,
    },
    Done,
    Failed {
        code: String,
        reason: String,
    },
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::Editing => "Editing",
            Phase::AwaitingValue { .. } => "AwaitingValue",
            Phase::Executing { .. } => "Executing",
            Phase::Done => "Done",
            Phase::Failed { .. } => "Failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterRequest {
    pub session: String,
    pub instance: String,
    pub param: String,
    pub data_type: DataType,
    pub ranked: Vec<InputModality>,
    pub prompt: String,
}

/// Result of an accepted value.
#[derive(Debug, Clone, PartialEq)]
pub enum SubmitOutcome {
    Next(ParameterRequest),
    ReadyToExecute,
}

/// Something the engine wants published.
#[derive(Debug, Clone, PartialEq)]
pub struct Notification {
    pub topic: String,
    pub msg: Value,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub process: ProcessDefinition,
    pub phase: Phase,
    pub state: CellState,
    request: Option<ParameterRequest>,
    plan: Vec<crate::model::SkillInvocation>,
    cursor: usize,
}

impl Session {
    pub fn request(&self) -> Option<&ParameterRequest> {
        self.request.as_ref()
    }

    pub fn trace(&self) -> &ExecutionTrace {
        &self.state.trace
    }
}

/// Single-session engine. Not thread-safe by itself; hosts serialize calls.
#[derive(Debug)]
pub struct Engine {
    setup: Setup,
    sim: Simulator,
    session: Option<Session>,
    sessions_started: u64,
    outbox: Vec<Notification>,
    log: Vec<Command>,
}

impl Engine {
    pub fn new(setup: Setup) -> Self {
        let sim = setup.simulator();
        Self {
            setup,
            sim,
            session: None,
            sessions_started: 0,
            outbox: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn setup(&self) -> &Setup {
        &self.setup
    }

    pub fn session(&self) -> Option<&Session> {
        self.session.as_ref()
    }

    pub fn phase(&self) -> Option<&Phase> {
        self.session.as_ref().map(|s| &s.phase)
    }

    /// Commands applied so far, in order.
    pub fn command_log(&self) -> &[Command] {
        &self.log
    }

    /// Takes the queued notifications.
    pub fn drain(&mut self) -> Vec<Notification> {
        std::mem::take(&mut self.outbox)
    }

    fn notify(&mut self, topic: &str, msg: Value) {
        self.outbox.push(Notification {
            topic: topic.to_string(),
            msg,
        });
    }

    fn publish_state(&mut self, error: Option<&EngineError>) {
        let Some(s) = &self.session else { return };
        let mut msg = json!({
            "session": s.id,
            "phase": s.phase,
            "unset": self.unset_required(&s.process).len(),
        });
        if let Some(e) = error {
            msg["error"] = e.to_json();
        }
        self.notify(TOPIC_STATE, msg);
    }

    fn session_mut(&mut self) -> Result<&mut Session, EngineError> {
        self.session.as_mut().ok_or(EngineError::NoSession)
    }

    fn wrong_phase(op: &'static str, phase: &Phase) -> EngineError {
        EngineError::WrongPhase {
            op,
            phase: phase.name().to_string(),
        }
    }

    /// Unset required parameters in document order: instances as listed,
    /// parameters in task definition order.
    pub fn unset_required(&self, process: &ProcessDefinition) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for inst in &process.tasks {
            let Some(def) = self.setup.catalog.iter().find(|d| d.id == inst.task) else {
                continue;
            };
            for spec in def.params.iter().filter(|p| p.required) {
                if inst.value(&spec.name).is_none() {
                    out.push((inst.id.clone(), spec.name.clone()));
                }
            }
        }
        out
    }

    fn make_request(&self, session: &str, process: &ProcessDefinition, instance: &str, param: &str) -> ParameterRequest {
        let inst = process.instance(instance).expect("instance exists");
        let def = self
            .setup
            .catalog
            .iter()
            .find(|d| d.id == inst.task)
            .expect("validated task");
        let spec = def.param(param).expect("validated parameter");
        ParameterRequest {
            session: session.to_string(),
            instance: instance.to_string(),
            param: param.to_string(),
            data_type: spec.data_type.clone(),
            ranked: self.setup.kb.modalities_for_parameter(spec, &self.setup.cell),
            prompt: format!("{} {}: set {} ({})", def.id, instance, param, spec.data_type),
        }
    }

    fn next_request(&self, session: &Session) -> Option<ParameterRequest> {
        let (instance, param) = self.unset_required(&session.process).into_iter().next()?;
        Some(self.make_request(&session.id, &session.process, &instance, &param))
    }

    /// Re-queues the pending request, for late subscribers.
    pub fn reemit_request(&mut self) {
        if let Some(r) = self.session.as_ref().and_then(|s| s.request.clone()) {
            self.notify(TOPIC_PARAMETER_REQUEST, json!(r));
        }
    }

    pub fn start_session(&mut self, process: ProcessDefinition) -> Result<Option<ParameterRequest>, EngineError> {
        self.log.push(Command::Start {
            process: process.clone(),
        });
        let issues: Vec<_> = validate_process(&process, &self.setup.catalog)
            .into_iter()
            .filter(|i| !matches!(i, ValidationIssue::MissingParameter { .. }))
            .collect();
        if !issues.is_empty() {
            return Err(EngineError::InvalidProcess { issues });
        }
        for (instance, param) in self.unset_required(&process) {
            let probe = self.make_request("", &process, &instance, &param);
            if probe.ranked.is_empty() {
                return Err(EngineError::NoModalityAvailable { instance, param });
            }
        }
        self.sessions_started += 1;
        let mut session = Session {
            id: format!("s{}", self.sessions_started),
            process,
            phase: Phase::Editing,
            state: self.sim.initial_state(),
            request: None,
            plan: Vec::new(),
            cursor: 0,
        };
        session.request = self.next_request(&session);
        let request = session.request.clone();
        self.session = Some(session);
        self.publish_state(None);
        self.reemit_request();
        Ok(request)
    }

    pub fn choose_modality(
        &mut self,
        instance: &str,
        param: &str,
        modality: InputModality,
    ) -> Result<(), EngineError> {
        self.log.push(Command::Choose {
            instance: instance.to_string(),
            param: param.to_string(),
            modality,
        });
        let session = self.session_mut()?;
        if !matches!(session.phase, Phase::Editing | Phase::AwaitingValue { .. }) {
            return Err(Self::wrong_phase("choose_modality", &session.phase));
        }
        let request = match &session.request {
            Some(r) if r.instance == instance && r.param == param => r,
            Some(_) => {
                return Err(EngineError::NotRequested {
                    instance: instance.to_string(),
                    param: param.to_string(),
                })
            }
            None => return Err(Self::wrong_phase("choose_modality", &session.phase)),
        };
        if !request.ranked.contains(&modality) {
            return Err(EngineError::ModalityNotOffered { modality });
        }
        let data_type = request.data_type.clone();
        session.phase = Phase::AwaitingValue {
            instance: instance.to_string(),
            param: param.to_string(),
            modality,
        };
        let sid = session.id.clone();
        if modality.is_recognized() {
            self.notify(
                modality.input_topic(),
                json!({
                    "activate": true,
                    "session": sid,
                    "instance": instance,
                    "param": param,
                    "data_type": data_type,
                }),
            );
        }
        self.publish_state(None);
        Ok(())
    }

    pub fn submit_value(
        &mut self,
        channel: InputModality,
        value: ParameterValue,
    ) -> Result<SubmitOutcome, EngineError> {
        self.log.push(Command::Submit {
            channel,
            value: value.clone(),
        });
        let result = self.try_submit(channel, value);
        if let Err(e) = &result {
            if matches!(e, EngineError::ChannelMismatch { .. } | EngineError::TypeMismatch { .. }) {
                self.publish_state(Some(e));
            }
        }
        result
    }

    fn try_submit(&mut self, channel: InputModality, value: ParameterValue) -> Result<SubmitOutcome, EngineError> {
        let session = self.session.as_ref().ok_or(EngineError::NoSession)?;
        let Phase::AwaitingValue {
            instance,
            param,
            modality,
        } = &session.phase
        else {
            return Err(Self::wrong_phase("submit_value", &session.phase));
        };
        if channel != *modality {
            return Err(EngineError::ChannelMismatch {
                expected: *modality,
                got: channel,
            });
        }
        let request = session.request.as_ref().expect("awaiting implies a request");
        if let Some(detail) = value.type_error(&request.data_type) {
            return Err(EngineError::TypeMismatch { detail });
        }
        let (instance, param) = (instance.clone(), param.clone());
        let session = self.session.as_mut().expect("checked above");
        session
            .process
            .instance_mut(&instance)
            .expect("requested instance exists")
            .params
            .insert(param, Some(value));
        session.phase = Phase::Editing;
        let snapshot = session.clone();
        let next = self.next_request(&snapshot);
        self.session.as_mut().expect("checked above").request = next.clone();
        self.publish_state(None);
        match next {
            Some(r) => {
                self.notify(TOPIC_PARAMETER_REQUEST, json!(r));
                Ok(SubmitOutcome::Next(r))
            }
            None => Ok(SubmitOutcome::ReadyToExecute),
        }
    }

    /// Expands and runs the process. Returns the events produced by this call;
    /// the run may pause on a human step.
    pub fn execute(&mut self) -> Result<Vec<TraceEvent>, EngineError> {
        self.log.push(Command::Execute);
        let session = self.session.as_ref().ok_or(EngineError::NoSession)?;
        if session.phase != Phase::Editing {
            return Err(Self::wrong_phase("execute", &session.phase));
        }
        let unset = self.unset_required(&session.process).len();
        if unset > 0 {
            return Err(EngineError::NotReady { unset });
        }
        let plan = self.setup.plan(&session.process);
        let session = self.session.as_mut().expect("checked above");
        match plan {
            Ok(plan) => {
                session.plan = plan;
                session.cursor = 0;
                session.phase = Phase::Executing {
                    awaiting_confirmation: false,
                };
                Ok(self.run())
            }
            Err(e) => {
                let code = match &e {
                    crate::tasks::ExpandError::NoFeasibleMapping { .. } => "NoFeasibleMapping",
                    _ => "ExpansionFailed",
                };
                session.phase = Phase::Failed {
                    code: code.to_string(),
                    reason: e.to_string(),
                };
                self.publish_state(None);
                Ok(Vec::new())
            }
        }
    }

    /// Unblocks one pending human step and continues the run.
    pub fn confirm_human_step(&mut self) -> Result<Vec<TraceEvent>, EngineError> {
        self.log.push(Command::Confirm);
        let session = self.session_mut()?;
        if session.phase
            != (Phase::Executing {
                awaiting_confirmation: true,
            })
        {
            return Err(EngineError::NothingPending);
        }
        session.state.confirmations += 1;
        session.phase = Phase::Executing {
            awaiting_confirmation: false,
        };
        Ok(self.run())
    }

    fn run(&mut self) -> Vec<TraceEvent> {
        let session = self.session.as_mut().expect("running session");
        let start = session.state.trace.len();
        while session.cursor < session.plan.len() {
            let inv = &session.plan[session.cursor];
            match self.sim.step(&mut session.state, inv) {
                Ok(()) => session.cursor += 1,
                Err(SkillError::ConfirmationRequired) if inv.id() == SkillId::AwaitConfirmation => {
                    session.phase = Phase::Executing {
                        awaiting_confirmation: true,
                    };
                    break;
                }
                Err(e) => {
                    Simulator::record_failure(&mut session.state, inv, &e);
                    session.phase = Phase::Failed {
                        code: e.code().to_string(),
                        reason: format!("skill {} of {}: {e}", session.cursor, inv.instance),
                    };
                    break;
                }
            }
        }
        if session.cursor == session.plan.len() && matches!(session.phase, Phase::Executing { .. }) {
            session.phase = Phase::Done;
        }
        let events = session.state.trace.since(start).to_vec();
        for e in &events {
            self.notify(TOPIC_TRACE, json!(e));
        }
        self.publish_state(None);
        events
    }

    /// Handles a message published on an input topic or the confirm topic.
    /// Messages without a `value` (such as the engine's own activation
    /// notices) are ignored.
    pub fn handle_input(&mut self, topic: &str, msg: &Value) -> Option<Result<Value, EngineError>> {
        if topic == TOPIC_CONFIRM {
            return Some(self.confirm_human_step().map(|events| json!({ "events": events })));
        }
        let channel = InputModality::from_input_topic(topic)?;
        let value = msg.get("value")?;
        let value: ParameterValue = match serde_json::from_value(value.clone()) {
            Ok(v) => v,
            Err(e) => {
                let err = EngineError::TypeMismatch {
                    detail: e.to_string(),
                };
                self.publish_state(Some(&err));
                return Some(Err(err));
            }
        };
        Some(self.submit_value(channel, value).map(|o| match o {
            SubmitOutcome::Next(r) => json!({ "next": r }),
            SubmitOutcome::ReadyToExecute => json!({ "ready": true }),
        }))
    }

    /// Process with all values supplied so far.
    pub fn process(&self) -> Option<&ProcessDefinition> {
        self.session.as_ref().map(|s| &s.process)
    }
}
