use std::cell::RefCell;
use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use super::broker::{Broker, ConnId, Host, Outbound};
use super::message::BridgeMessage;

enum HubCommand {
    Connect(ConnId, Box<dyn Outbound>),
    Frame(ConnId, String),
    Disconnect(ConnId),
    Shutdown,
}

/// Handle to the thread that owns the broker and its host. Every frame from
/// every connection goes through one queue and is applied in arrival order.
#[derive(Clone)]
pub struct HubHandle {
    tx: Sender<HubCommand>,
    next_id: Arc<AtomicU64>,
}

pub struct Hub {
    handle: HubHandle,
    thread: Option<JoinHandle<()>>,
}

impl Hub {
    pub fn spawn<H: Host + 'static>(host: H) -> Self {
        let (tx, rx) = mpsc::channel::<HubCommand>();
        let thread = std::thread::Builder::new()
            .name("bridge-hub".into())
            .spawn(move || {
                let mut broker = Broker::new(host);
                for cmd in rx {
                    match cmd {
                        HubCommand::Connect(id, out) => broker.connect(id, out),
                        HubCommand::Frame(id, text) => broker.handle_frame(id, &text),
                        HubCommand::Disconnect(id) => broker.disconnect(id),
                        HubCommand::Shutdown => break,
                    }
                }
            })
            .expect("spawn hub thread");
        Self {
            handle: HubHandle {
                tx,
                next_id: Arc::new(AtomicU64::new(1)),
            },
            thread: Some(thread),
        }
    }

    pub fn handle(&self) -> HubHandle {
        self.handle.clone()
    }

    /// In-process client with the same semantics as a websocket client.
    pub fn loopback(&self) -> LoopbackClient {
        self.handle.loopback()
    }
}

impl Drop for Hub {
    fn drop(&mut self) {
        let _ = self.handle.tx.send(HubCommand::Shutdown);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl HubHandle {
    pub fn connect(&self, out: Box<dyn Outbound>) -> ConnId {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let _ = self.tx.send(HubCommand::Connect(id, out));
        id
    }

    pub fn frame(&self, id: ConnId, text: String) {
        let _ = self.tx.send(HubCommand::Frame(id, text));
    }

    pub fn disconnect(&self, id: ConnId) {
        let _ = self.tx.send(HubCommand::Disconnect(id));
    }

    pub fn loopback(&self) -> LoopbackClient {
        let (tx, rx) = mpsc::channel();
        let id = self.connect(Box::new(tx));
        LoopbackClient {
            id,
            hub: self.clone(),
            rx,
            skipped: RefCell::new(VecDeque::new()),
        }
    }
}

pub struct LoopbackClient {
    id: ConnId,
    hub: HubHandle,
    rx: Receiver<String>,
    /// Frames skipped over by `recv_matching`, delivered before new ones.
    skipped: RefCell<VecDeque<BridgeMessage>>,
}

impl LoopbackClient {
    pub fn id(&self) -> ConnId {
        self.id
    }

    pub fn send(&self, msg: &BridgeMessage) {
        self.hub.frame(self.id, msg.to_text());
    }

    /// Sends raw text, which need not be valid.
    pub fn send_raw(&self, text: &str) {
        self.hub.frame(self.id, text.to_string());
    }

    pub fn recv_timeout(&self, timeout: Duration) -> Option<BridgeMessage> {
        if let Some(m) = self.skipped.borrow_mut().pop_front() {
            return Some(m);
        }
        self.recv_wire(timeout)
    }

    fn recv_wire(&self, timeout: Duration) -> Option<BridgeMessage> {
        match self.rx.recv_timeout(timeout) {
            Ok(text) => Some(BridgeMessage::parse(&text).unwrap_or_else(|status| status)),
            Err(RecvTimeoutError::Timeout | RecvTimeoutError::Disconnected) => None,
        }
    }

    pub fn recv(&self) -> Option<BridgeMessage> {
        self.recv_timeout(Duration::from_secs(5))
    }

    /// Next frame that satisfies `pred`. Frames passed over stay queued for
    /// later `recv` calls.
    pub fn recv_matching(&self, pred: impl Fn(&BridgeMessage) -> bool) -> Option<BridgeMessage> {
        {
            let mut skipped = self.skipped.borrow_mut();
            if let Some(pos) = skipped.iter().position(&pred) {
                return skipped.remove(pos);
            }
        }
        while let Some(m) = self.recv_wire(Duration::from_secs(5)) {
            if pred(&m) {
                return Some(m);
            }
            self.skipped.borrow_mut().push_back(m);
        }
        None
    }

    /// Drops queued frames and anything arriving within `quiet`.
    pub fn drain(&self, quiet: Duration) -> Vec<BridgeMessage> {
        let mut out: Vec<_> = self.skipped.borrow_mut().drain(..).collect();
        while let Some(m) = self.recv_wire(quiet) {
            out.push(m);
        }
        out
    }

    /// Calls a service and waits for its response or status.
    pub fn call(&self, service: &str, id: &str, args: serde_json::Value) -> Option<BridgeMessage> {
        self.send(&BridgeMessage::call(service, id, args));
        self.recv_matching(|m| match m {
            BridgeMessage::ServiceResponse { id: rid, .. } => rid == id,
            BridgeMessage::Status { id: Some(rid), .. } => rid == id,
            _ => false,
        })
    }

    /// Subscribes and waits for the acknowledgment.
    pub fn subscribe(&self, topic: &str) {
        self.send(&BridgeMessage::subscribe(topic));
        self.recv_matching(|m| {
            matches!(m, BridgeMessage::Status { code, topic: Some(t), .. } if code == "subscribed" && t == topic)
        });
    }
}

impl Drop for LoopbackClient {
    fn drop(&mut self) {
        self.hub.disconnect(self.id);
    }
}
