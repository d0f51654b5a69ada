use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taskbench::model::{Component, ParameterValue, SkillCall, SkillId, SkillInvocation, TaskInstance};
use taskbench::setup::Setup;
use taskbench::sim::CellState;
use taskbench::{Pose6D, Vec3};

pub fn reachable() -> Pose6D {
    Pose6D::from_translation(Vec3::new(0.0, 0.1, 0.2))
}

pub fn path() -> Vec<Pose6D> {
    vec![reachable(), Pose6D::from_translation(Vec3::new(0.05, 0.1, 0.2))]
}

/// A well-formed call of each skill.
pub fn sample_call(skill: SkillId, tool: Component) -> SkillCall {
    match skill {
        SkillId::MoveTo => SkillCall::MoveTo {
            pose: reachable(),
            speed: 0.2,
            accel: 0.5,
        },
        SkillId::DualArmMoveTo => SkillCall::DualArmMoveTo {
            pose_a: reachable(),
            pose_b: reachable(),
            speed: 0.2,
            accel: 0.5,
        },
        SkillId::DetectObject => SkillCall::DetectObject { model: "bearing".into() },
        SkillId::OpenGripper => SkillCall::OpenGripper,
        SkillId::CloseGripper => SkillCall::CloseGripper { force: 20.0 },
        SkillId::SetWeldingCurrent => SkillCall::SetWeldingCurrent { current: 90.0 },
        SkillId::SetWeldingSpeed => SkillCall::SetWeldingSpeed { speed: 0.005 },
        SkillId::WeldPoint => SkillCall::WeldPoint { pose: reachable() },
        SkillId::WeldSeam => SkillCall::WeldSeam { poses: path() },
        SkillId::SawAlongTrajectory => SkillCall::SawAlongTrajectory { poses: path() },
        SkillId::SetToolPower => SkillCall::SetToolPower { tool, on: true },
        SkillId::DrillScrew => SkillCall::DrillScrew { depth: 10.0, force: 30.0 },
        SkillId::ApplyGlue => SkillCall::ApplyGlue {
            amount: 1.0,
            poses: path(),
        },
        SkillId::AttachTool => SkillCall::AttachTool { tool },
        SkillId::AwaitConfirmation => SkillCall::AwaitConfirmation,
    }
}

#[derive(Debug, Clone)]
pub enum Step {
    PickPlace { object: &'static str, at: (f64, f64) },
    Assemble,
}

pub fn random_steps(seed: u64) -> Vec<Step> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                Step::Assemble
            } else {
                let object = ["bearing", "axis", "rake"][rng.gen_range(0..3)];
                Step::PickPlace {
                    object,
                    at: (rng.gen_range(-0.3..0.3), rng.gen_range(-0.2..0.3)),
                }
            }
        })
        .collect()
}

pub fn instances(steps: &[Step]) -> Vec<TaskInstance> {
    let mut out = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        match s {
            Step::PickPlace { object, at } => {
                out.push(TaskInstance::new(&format!("pick{i}"), "PickObject").with("objectToPick", ParameterValue::object(object)));
                out.push(
                    TaskInstance::new(&format!("place{i}"), "PlaceObject")
                        .with("locationToPlace", ParameterValue::location(at.0, at.1, 0.0)),
                );
            }
            Step::Assemble => {
                let constraints = serde_json::from_str(
                    r#"{"kind":"ConstraintSet","constraints":[
                        {"type":"Concentric","a":"bearing.bore","b":"axis.shaft"},
                        {"type":"AgainstCollar","a":"bearing.bore","b":"axis.collar"}]}"#,
                )
                .unwrap();
                out.push(
                    TaskInstance::new(&format!("asm{i}"), "AssembleObjects")
                        .with("objectToAssemble", ParameterValue::object("bearing"))
                        .with("assembly", ParameterValue::object("axis"))
                        .with("assemblyConstraints", constraints),
                );
            }
        }
    }
    out
}

pub fn run_steps(setup: &Setup, steps: &[Step]) -> Result<CellState, String> {
    let plan: Vec<SkillInvocation> = {
        let raw = setup.planner().expand_all(&instances(steps)).map_err(|e| e.to_string())?;
        taskbench::tasks::resolve_tool_changes(raw, setup.cell.attached_tool)
    };
    let sim = setup.simulator();
    let mut state = sim.initial_state();
    let ids: BTreeSet<String> = state.objects.keys().cloned().collect();
    for inv in &plan {
        sim.step(&mut state, inv).map_err(|e| format!("{}: {e}", inv.id()))?;
        state.check()?;
        let now: BTreeSet<String> = state.objects.keys().cloned().collect();
        if now != ids {
            return Err("object set changed".into());
        }
        let off_table = state.objects.values().filter(|o| !o.on_table).count();
        if off_table != usize::from(state.held.is_some()) {
            return Err("held and on-table flags disagree".into());
        }
    }
    Ok(state)
}


/// Runs every tool-bound skill with each possible attached tool. A skill
/// must fail with `ToolNotAttached` and leave the state untouched exactly
/// when its tool is missing. Returns the number of combinations checked.
pub fn check_tool_guards(sim: &taskbench::sim::Simulator) -> Result<usize, String> {
    use taskbench::sim::SkillError;
    let mut checked = 0;
    for sig in taskbench::model::skill_catalog() {
        for attached in std::iter::once(None).chain(Component::TOOLS.map(Some)) {
            // set_tool_power is checked against the grind tool it names
            let call = sample_call(sig.id, Component::GrindTool);
            let Some(needed) = call.required_tool() else { continue };
            let mut state = sim.initial_state();
            state.attached_tool = attached;
            state.welding_current = 90.0;
            state.welding_speed = 0.005;
            let before = state.snapshot();
            let result = sim.apply(&mut state, &call);
            let refused = matches!(result, Err(SkillError::ToolNotAttached { tool, .. }) if tool == needed);
            if (attached == Some(needed)) == refused {
                return Err(format!("{} with {attached:?}: {result:?}", sig.id));
            }
            if refused && state.snapshot() != before {
                return Err(format!("failed {} mutated state", sig.id));
            }
            checked += 1;
        }
    }
    Ok(checked)
}
