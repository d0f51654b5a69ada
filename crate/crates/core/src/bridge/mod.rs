//! JSON message bridge: topic publish/subscribe and request/response
//! services over text frames. Transports (the in-process loopback here, a
//! websocket server in the CLI) only move frames in and out of a [`Hub`].

mod broker;
mod engine_host;
mod hub;
mod message;

pub use broker::{Broker, ConnId, Host, NullHost, Outbound};
pub use engine_host::EngineHost;
pub use hub::{Hub, HubHandle, LoopbackClient};
pub use message::{BridgeMessage, StatusLevel};
