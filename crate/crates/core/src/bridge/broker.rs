use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use super::message::{BridgeMessage, StatusLevel};

pub type ConnId = u64;

/// Where frames for one connection go. Sends must not block.
pub trait Outbound: Send {
    fn send(&self, frame: String);
}

impl Outbound for std::sync::mpsc::Sender<String> {
    fn send(&self, frame: String) {
        // a closed receiver means the client went away; dropping is fine
        let _ = std::sync::mpsc::Sender::send(self, frame);
    }
}

/// Application behind the broker: services, input topics and whatever it
/// wants published.
pub trait Host: Send {
    /// `None` when the service does not exist.
    fn call_service(&mut self, service: &str, args: &Value) -> Option<Result<Value, Value>>;

    /// Sees every client publish after fan-out.
    fn on_publish(&mut self, _topic: &str, _msg: &Value) {}

    /// Messages to deliver to a connection that just subscribed to `topic`.
    fn on_subscribe(&mut self, _topic: &str) -> Vec<Value> {
        Vec::new()
    }

    /// Queued (topic, msg) pairs to publish.
    fn take_notifications(&mut self) -> Vec<(String, Value)> {
        Vec::new()
    }
}

/// Host with no services.
pub struct NullHost;

impl Host for NullHost {
    fn call_service(&mut self, _: &str, _: &Value) -> Option<Result<Value, Value>> {
        None
    }
}

/// Topic fan-out and service dispatch. Single-threaded; the hub serializes
/// access.
pub struct Broker<H> {
    host: H,
    conns: BTreeMap<ConnId, Box<dyn Outbound>>,
    subs: BTreeMap<String, BTreeSet<ConnId>>,
}

impl<H: Host> Broker<H> {
    pub fn new(host: H) -> Self {
        Self {
            host,
            conns: BTreeMap::new(),
            subs: BTreeMap::new(),
        }
    }

    pub fn host(&self) -> &H {
        &self.host
    }

    pub fn host_mut(&mut self) -> &mut H {
        &mut self.host
    }

    pub fn connect(&mut self, id: ConnId, out: Box<dyn Outbound>) {
        self.conns.insert(id, out);
    }

    pub fn disconnect(&mut self, id: ConnId) {
        self.conns.remove(&id);
        for set in self.subs.values_mut() {
            set.remove(&id);
        }
    }

    pub fn connection_count(&self) -> usize {
        self.conns.len()
    }

    fn send(&self, conn: ConnId, msg: &BridgeMessage) {
        if let Some(out) = self.conns.get(&conn) {
            out.send(msg.to_text());
        }
    }

    /// Delivers `msg` on `topic` to every current subscriber.
    pub fn publish(&self, topic: &str, msg: Value) {
        let Some(set) = self.subs.get(topic) else { return };
        if set.is_empty() {
            return;
        }
        let frame = BridgeMessage::publish(topic, msg).to_text();
        for id in set {
            if let Some(out) = self.conns.get(id) {
                out.send(frame.clone());
            }
        }
    }

    fn flush(&mut self) {
        for (topic, msg) in self.host.take_notifications() {
            self.publish(&topic, msg);
        }
    }

    /// Handles one text frame from `conn`.
    pub fn handle_frame(&mut self, conn: ConnId, text: &str) {
        match BridgeMessage::parse(text) {
            Ok(msg) => self.handle(conn, msg),
            Err(status) => self.send(conn, &status),
        }
    }

    pub fn handle(&mut self, conn: ConnId, msg: BridgeMessage) {
        match msg {
            BridgeMessage::Subscribe { topic } => {
                self.subs.entry(topic.clone()).or_default().insert(conn);
                self.send(
                    conn,
                    &BridgeMessage::Status {
                        level: StatusLevel::Info,
                        code: "subscribed".into(),
                        msg: None,
                        id: None,
                        topic: Some(topic.clone()),
                    },
                );
                for m in self.host.on_subscribe(&topic) {
                    self.send(conn, &BridgeMessage::publish(&topic, m));
                }
            }
            BridgeMessage::Unsubscribe { topic } => {
                if let Some(set) = self.subs.get_mut(&topic) {
                    set.remove(&conn);
                }
                self.send(
                    conn,
                    &BridgeMessage::Status {
                        level: StatusLevel::Info,
                        code: "unsubscribed".into(),
                        msg: None,
                        id: None,
                        topic: Some(topic),
                    },
                );
            }
            BridgeMessage::Publish { topic, msg } => {
                self.publish(&topic, msg.clone());
                self.host.on_publish(&topic, &msg);
                self.flush();
            }
            BridgeMessage::CallService { service, id, args } => {
                let args = if args.is_null() {
                    Value::Object(Default::default())
                } else {
                    args
                };
                let reply = match self.host.call_service(&service, &args) {
                    None => BridgeMessage::Status {
                        level: StatusLevel::Error,
                        code: "unknown_service".into(),
                        msg: Some(format!("no service named {service}")),
                        id: Some(id),
                        topic: None,
                    },
                    Some(Ok(result)) => BridgeMessage::ServiceResponse {
                        id,
                        service: Some(service),
                        result: Some(result),
                        error: None,
                    },
                    Some(Err(error)) => BridgeMessage::ServiceResponse {
                        id,
                        service: Some(service),
                        result: None,
                        error: Some(error),
                    },
                };
                self.send(conn, &reply);
                self.flush();
            }
            BridgeMessage::ServiceResponse { .. } | BridgeMessage::Status { .. } => {
                self.send(
                    conn,
                    &BridgeMessage::error("unsupported", "clients may not send this op"),
                );
            }
        }
    }
}
