use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::SkillId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    Failed { code: String, message: String },
}

/// One executed (or failed) skill. Field order is the wire order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub seq: u64,
    pub skill: SkillId,
    pub args: Value,
    pub outcome: Outcome,
    /// Changed state fields and their new values; appended log entries for
    /// the weld and tool logs.
    pub deltas: BTreeMap<String, Value>,
}

impl TraceEvent {
    pub fn is_ok(&self) -> bool {
        self.outcome == Outcome::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExecutionTrace {
    events: Vec<TraceEvent>,
}

impl ExecutionTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an event, numbering it after the last one.
    pub fn record(
        &mut self,
        skill: SkillId,
        args: Value,
        outcome: Outcome,
        deltas: BTreeMap<String, Value>,
    ) -> &TraceEvent {
        let seq = self.events.last().map_or(0, |e| e.seq + 1);
        self.events.push(TraceEvent {
            seq,
            skill,
            args,
            outcome,
            deltas,
        });
        self.events.last().expect("just pushed")
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn count(&self, skill: SkillId) -> usize {
        self.events
            .iter()
            .filter(|e| e.skill == skill && e.is_ok())
            .count()
    }

    /// Events from index `from` on.
    pub fn since(&self, from: usize) -> &[TraceEvent] {
        &self.events[from.min(self.events.len())..]
    }

    /// Newline-delimited JSON, one event per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("trace event serialises"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<TraceEvent>, _>>()?;
        Ok(Self { events })
    }
}
