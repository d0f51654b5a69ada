mod common;

use std::time::Duration;

use serde_json::{json, Value};
use taskbench::bridge::{BridgeMessage, EngineHost, Hub, NullHost, StatusLevel};
use taskbench::session::{Engine, TOPIC_PARAMETER_REQUEST, TOPIC_STATE};

fn engine_hub() -> Hub {
    let engine = Engine::new(common::study_setup());
    Hub::spawn(EngineHost::new(engine).with_default_process(common::load_process("study_template.json")))
}

fn result(msg: BridgeMessage) -> Value {
    match msg {
        BridgeMessage::ServiceResponse {
            result: Some(r),
            error: None,
            ..
        } => r,
        other => panic!("expected a result, got {other:?}"),
    }
}

fn error(msg: BridgeMessage) -> Value {
    match msg {
        BridgeMessage::ServiceResponse { error: Some(e), .. } => e,
        other => panic!("expected an error, got {other:?}"),
    }
}

#[test]
fn subscriber_sees_publish_once() {
    let hub = Hub::spawn(NullHost);
    let a = hub.loopback();
    let b = hub.loopback();
    a.subscribe("/t");
    a.subscribe("/t");
    b.send(&BridgeMessage::publish("/t", json!({"x": 1})));
    assert_eq!(a.recv(), Some(BridgeMessage::publish("/t", json!({"x": 1}))));
    assert!(a.recv_timeout(Duration::from_millis(100)).is_none());
}

#[test]
fn no_replay_for_late_subscribers() {
    let hub = Hub::spawn(NullHost);
    let a = hub.loopback();
    a.send(&BridgeMessage::publish("/t", json!({"x": 1})));
    a.subscribe("/t");
    assert!(a.recv_timeout(Duration::from_millis(100)).is_none());
}

#[test]
fn unsubscribe_stops_delivery() {
    let hub = Hub::spawn(NullHost);
    let a = hub.loopback();
    a.subscribe("/t");
    a.send(&BridgeMessage::Unsubscribe { topic: "/t".into() });
    a.send(&BridgeMessage::publish("/t", json!({})));
    let got = a.drain(Duration::from_millis(100));
    assert!(got.iter().all(|m| !matches!(m, BridgeMessage::Publish { .. })), "{got:?}");
}

#[test]
fn thousand_messages_in_order_across_topics() {
    let hub = Hub::spawn(NullHost);
    let sub = hub.loopback();
    sub.subscribe("/a");
    sub.subscribe("/b");
    let pub_a = hub.loopback();
    let pub_b = hub.loopback();
    let ta = std::thread::spawn(move || {
        for i in 0..1000 {
            pub_a.send(&BridgeMessage::publish("/a", json!({ "i": i })));
        }
        pub_a
    });
    let tb = std::thread::spawn(move || {
        for i in 0..1000 {
            pub_b.send(&BridgeMessage::publish("/b", json!({ "i": i })));
        }
        pub_b
    });
    let _keep = (ta.join().unwrap(), tb.join().unwrap());
    let mut next = [0u64; 2];
    for _ in 0..2000 {
        let Some(BridgeMessage::Publish { topic, msg }) = sub.recv() else {
            panic!("lost messages at {next:?}");
        };
        let slot = if topic == "/a" { 0 } else { 1 };
        assert_eq!(msg["i"].as_u64(), Some(next[slot]));
        next[slot] += 1;
    }
    assert_eq!(next, [1000, 1000]);
    assert!(sub.recv_timeout(Duration::from_millis(100)).is_none());
}

#[test]
fn malformed_frames_do_not_close_the_connection() {
    let hub = Hub::spawn(NullHost);
    let c = hub.loopback();
    for bad in ["{", "42", r#"{"op":"publish","topic":"/t","msg":[1]}"#, r#"{"op":"nope"}"#] {
        c.send_raw(bad);
        match c.recv() {
            Some(BridgeMessage::Status { level, code, .. }) => {
                assert_eq!(level, StatusLevel::Error);
                assert_eq!(code, "malformed");
            }
            other => panic!("{bad}: {other:?}"),
        }
    }
    c.subscribe("/t");
    c.send(&BridgeMessage::publish("/t", json!({"ok": true})));
    assert!(matches!(c.recv(), Some(BridgeMessage::Publish { .. })));
}

#[test]
fn unknown_service_gets_status_with_id() {
    let hub = Hub::spawn(NullHost);
    let c = hub.loopback();
    match c.call("no.such", "q7", json!({})) {
        Some(BridgeMessage::Status { code, id, .. }) => {
            assert_eq!(code, "unknown_service");
            assert_eq!(id.as_deref(), Some("q7"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn interleaved_calls_keep_their_ids() {
    let hub = engine_hub();
    let c = hub.loopback();
    for i in 0..50 {
        c.send(&BridgeMessage::call("engine.status", &format!("c{i}"), json!({})));
    }
    for i in 0..50 {
        match c.recv() {
            Some(BridgeMessage::ServiceResponse { id, .. }) => assert_eq!(id, format!("c{i}")),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn kb_services_on_study_cell() {
    let hub = engine_hub();
    let c = hub.loopback();
    let r = result(c.call("kb.modalities_for_parameter", "1", json!({"dataType": "Location3D"})).unwrap());
    assert_eq!(r, json!(["Touch", "Gesture", "Pen", "Speech"]));
    let r = result(
        c.call(
            "kb.modalities_for_parameter",
            "2",
            json!({"dataType": "ConstraintSet", "task": "AssembleObjects", "param": "assemblyConstraints"}),
        )
        .unwrap(),
    );
    assert_eq!(r, json!(["Touch", "Speech"]));
    let e = error(c.call("kb.modalities_for_parameter", "3", json!({"dataType": "Bogus"})).unwrap());
    assert_eq!(e["code"], "BadArguments");
    let r = result(c.call("kb.available_modalities", "4", json!({})).unwrap());
    assert_eq!(r, json!(["Touch", "Gesture", "Speech", "Pen"]));
}

#[test]
fn late_request_subscriber_gets_current_request() {
    let hub = engine_hub();
    let c = hub.loopback();
    let r = result(c.call("engine.start_session", "s", json!({})).unwrap());
    assert_eq!(r["request"]["param"], "objectToPick");
    c.subscribe(TOPIC_PARAMETER_REQUEST);
    match c.recv() {
        Some(BridgeMessage::Publish { topic, msg }) => {
            assert_eq!(topic, TOPIC_PARAMETER_REQUEST);
            assert_eq!(msg["instance"], "pick");
            assert_eq!(msg["ranked"], json!(["Gesture", "Touch", "Pen", "Speech"]));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn wizard_publish_reaches_engine() {
    let hub = engine_hub();
    let ui = hub.loopback();
    let wizard = hub.loopback();
    ui.subscribe(TOPIC_STATE);
    wizard.subscribe("/input/gesture");
    result(ui.call("engine.start_session", "s", json!({})).unwrap());
    result(
        ui.call(
            "engine.choose_modality",
            "m",
            json!({"instance": "pick", "param": "objectToPick", "modality": "Gesture"}),
        )
        .unwrap(),
    );
    let cue = wizard
        .recv_matching(|m| matches!(m, BridgeMessage::Publish { msg, .. } if msg.get("activate").is_some()))
        .expect("activation notice");
    let BridgeMessage::Publish { msg, .. } = cue else { unreachable!() };
    assert_eq!(msg["param"], "objectToPick");
    wizard.send(&BridgeMessage::publish(
        "/input/gesture",
        json!({"param": "objectToPick", "value": {"kind": "ObjectModelRef", "id": "bearing"}}),
    ));
    let status = result(ui.call("engine.status", "st", json!({})).unwrap());
    assert_eq!(status["request"]["instance"], "place");
    assert_eq!(status["phase"]["phase"], "Editing");
}

#[test]
fn wrong_channel_is_reported_on_state() {
    let hub = engine_hub();
    let ui = hub.loopback();
    ui.subscribe(TOPIC_STATE);
    result(ui.call("engine.start_session", "s", json!({})).unwrap());
    result(
        ui.call(
            "engine.choose_modality",
            "m",
            json!({"instance": "pick", "param": "objectToPick", "modality": "Touch"}),
        )
        .unwrap(),
    );
    ui.send(&BridgeMessage::publish(
        "/input/speech",
        json!({"value": {"kind": "ObjectModelRef", "id": "bearing"}}),
    ));
    let err = ui
        .recv_matching(|m| matches!(m, BridgeMessage::Publish { msg, .. } if msg.get("error").is_some()))
        .expect("error event");
    let BridgeMessage::Publish { msg, .. } = err else { unreachable!() };
    assert_eq!(msg["error"]["code"], "ChannelMismatch");
    let status = result(ui.call("engine.status", "st", json!({})).unwrap());
    assert_eq!(status["phase"]["phase"], "AwaitingValue");
}

#[test]
fn confirm_with_nothing_pending_publishes_error() {
    let hub = engine_hub();
    let ui = hub.loopback();
    ui.subscribe(TOPIC_STATE);
    result(ui.call("engine.start_session", "s", json!({})).unwrap());
    ui.send(&BridgeMessage::publish("/engine/confirm", json!({})));
    let err = ui
        .recv_matching(|m| matches!(m, BridgeMessage::Publish { msg, .. } if msg.get("error").is_some()))
        .expect("error event");
    let BridgeMessage::Publish { msg, .. } = err else { unreachable!() };
    assert_eq!(msg["error"]["code"], "NothingPending");
    let e = error(ui.call("engine.confirm", "c", json!({})).unwrap());
    assert_eq!(e["code"], "NothingPending");
}
