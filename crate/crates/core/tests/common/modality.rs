use std::collections::BTreeSet;

use taskbench::model::{Component, InputModality};

use Component::*;
use InputModality::*;

/// Components the availability rules look at.
pub const RELEVANT: [Component; 11] = [
    Touchscreen,
    DepthSensor,
    Microphone,
    InfraredCameraPair,
    TrackedPen,
    Keyboard,
    Mouse,
    GestureRecognizerSw,
    SpeechRecognizerSw,
    PenTrackerSw,
    WizardConsole,
];

/// The availability rules written out by hand.
pub fn oracle(has: impl Fn(Component) -> bool) -> BTreeSet<InputModality> {
    let recognizer = |sw| has(sw) || has(WizardConsole);
    let mut out = BTreeSet::new();
    if has(Touchscreen) {
        out.insert(Touch);
    }
    if has(DepthSensor) && recognizer(GestureRecognizerSw) {
        out.insert(Gesture);
    }
    if has(Microphone) && recognizer(SpeechRecognizerSw) {
        out.insert(Speech);
    }
    if has(InfraredCameraPair) && has(TrackedPen) && recognizer(PenTrackerSw) {
        out.insert(Pen);
    }
    if has(Keyboard) && has(Mouse) {
        out.insert(KeyboardMouse);
    }
    out
}

pub fn subset(mask: u32) -> Vec<Component> {
    RELEVANT
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, c)| *c)
        .collect()
}

