//! Websocket front of the bridge hub. Each connection gets a reader task
//! that forwards text frames to the hub and a writer task fed by the hub.

use std::path::Path;

use futures_util::{SinkExt, StreamExt};
use log::{debug, info, warn};
use taskbench::bridge::{EngineHost, Hub, HubHandle, Outbound};
use taskbench::session::Engine;
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::mpsc::{unbounded_channel, UnboundedSender};
use tokio_tungstenite::tungstenite::Message;

use crate::commands::{load_process, load_setup};
use crate::{out, CliError};

struct WsOutbound(UnboundedSender<String>);

impl Outbound for WsOutbound {
    fn send(&self, frame: String) {
        // the writer task is gone once the socket closed
        let _ = self.0.send(frame);
    }
}

pub fn run(cell: &Path, host: &str, port: u16, process: Option<&Path>) -> Result<(), CliError> {
    let mut engine_host = EngineHost::new(Engine::new(load_setup(cell)?));
    if let Some(p) = process {
        engine_host = engine_host.with_default_process(load_process(p)?);
    }
    let hub = Hub::spawn(engine_host);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Invalid(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async {
        let listener = TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::Usage(format!("cannot listen on {host}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| CliError::Invalid(e.to_string()))?;
        out!("listening on ws://{addr}");
        loop {
            tokio::select! {
                accepted = listener.accept() => match accepted {
                    Ok((stream, peer)) => {
                        debug!("connection from {peer}");
                        tokio::spawn(serve_connection(stream, hub.handle()));
                    }
                    Err(e) => warn!("accept failed: {e}"),
                },
                _ = tokio::signal::ctrl_c() => {
                    info!("shutting down");
                    return Ok(());
                }
            }
        }
    })
}

async fn serve_connection(stream: TcpStream, hub: HubHandle) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            warn!("handshake failed: {e}");
            return;
        }
    };
    let (mut sink, mut source) = ws.split();
    let (tx, mut rx) = unbounded_channel::<String>();
    let id = hub.connect(Box::new(WsOutbound(tx)));
    let writer = tokio::spawn(async move {
        while let Some(frame) = rx.recv().await {
            if sink.send(Message::Text(frame)).await.is_err() {
                break;
            }
        }
        let _ = sink.close().await;
    });
    while let Some(msg) = source.next().await {
        match msg {
            Ok(Message::Text(text)) => hub.frame(id, text),
            // binary frames are answered like any other non-JSON input
            Ok(Message::Binary(bytes)) => hub.frame(id, String::from_utf8_lossy(&bytes).into_owned()),
            Ok(Message::Close(_)) => break,
            Ok(_) => {}
            Err(e) => {
                debug!("connection {id} read error: {e}");
                break;
            }
        }
    }
    // dropping the outbound ends the writer
    hub.disconnect(id);
    let _ = writer.await;
}
