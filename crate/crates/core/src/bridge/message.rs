use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One frame of the bridge protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum BridgeMessage {
    Subscribe {
        topic: String,
    },
    Unsubscribe {
        topic: String,
    },
    Publish {
        topic: String,
        msg: Value,
    },
    CallService {
        service: String,
        id: String,
        #[serde(default)]
        args: Value,
    },
    ServiceResponse {
        id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        service: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        result: Option<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<Value>,
    },
    Status {
        level: StatusLevel,
        code: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        msg: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        topic: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatusLevel {
    Info,
    Error,
}

impl BridgeMessage {
    pub fn status(level: StatusLevel, code: &str, msg: impl Into<String>) -> Self {
        BridgeMessage::Status {
            level,
            code: code.to_string(),
            msg: Some(msg.into()),
            id: None,
            topic: None,
        }
    }

    pub fn error(code: &str, msg: impl Into<String>) -> Self {
        Self::status(StatusLevel::Error, code, msg)
    }

    pub fn publish(topic: &str, msg: Value) -> Self {
        BridgeMessage::Publish {
            topic: topic.to_string(),
            msg,
        }
    }

    pub fn subscribe(topic: &str) -> Self {
        BridgeMessage::Subscribe {
            topic: topic.to_string(),
        }
    }

    pub fn call(service: &str, id: &str, args: Value) -> Self {
        BridgeMessage::CallService {
            service: service.to_string(),
            id: id.to_string(),
            args,
        }
    }

    /// Parses and checks one text frame. The error is the status frame to
    /// send back.
    pub fn parse(text: &str) -> Result<Self, BridgeMessage> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Self::error("malformed", format!("invalid JSON: {e}")))?;
        if !value.is_object() {
            return Err(Self::error("malformed", "frame must be a JSON object"));
        }
        let msg: BridgeMessage = serde_json::from_value(value)
            .map_err(|e| Self::error("malformed", format!("invalid message: {e}")))?;
        match &msg {
            BridgeMessage::Publish { msg: payload, .. } if !payload.is_object() => {
                Err(Self::error("malformed", "publish payload must be a JSON object"))
            }
            BridgeMessage::CallService { args, .. } if !(args.is_object() || args.is_null()) => {
                Err(Self::error("malformed", "service args must be a JSON object"))
            }
            _ => Ok(msg),
        }
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("bridge message serialises")
    }
}
