mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use proptest::prelude::*;
use taskbench::kb::{CellConfiguration, KnowledgeBase};
use taskbench::model::{Component, ComponentSet, DataKind, InputModality};
use taskbench::tasks::{applicable_for_kind, task_catalog};

use common::modality::{oracle, subset, RELEVANT};

use Component::*;
use InputModality::*;

#[test]
fn availability_matches_oracle_on_every_subset() {
    let kb = KnowledgeBase::default();
    assert_eq!(kb.rules.relevant_components(), RELEVANT.into_iter().collect());
    let started = Instant::now();
    let mut mismatches = Vec::new();
    for mask in 0..(1u32 << RELEVANT.len()) {
        let chosen = subset(mask);
        for extras in [&[][..], &[RobotArm, Gripper, Projector, VisionSw]] {
            let set: ComponentSet = chosen.iter().chain(extras).copied().collect();
            let want = oracle(|c| chosen.contains(&c));
            if kb.available_for(&set) != want {
                mismatches.push(chosen.clone());
            }
        }
    }
    assert!(mismatches.is_empty(), "{} mismatches, first {:?}", mismatches.len(), mismatches[0]);
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

fn study_ranking(kind: DataKind) -> Vec<InputModality> {
    let setup = common::study_setup();
    let applicable = applicable_for_kind(&setup.catalog, kind);
    setup.kb.rank(kind, &applicable, &setup.cell.components)
}

#[test]
fn study_cell_orderings() {
    assert_eq!(study_ranking(DataKind::Location3D), [Touch, Gesture, Pen, Speech]);
    assert_eq!(study_ranking(DataKind::VertexRef), [Gesture, Pen, Touch, Speech]);
    assert_eq!(study_ranking(DataKind::EdgeRef), [Gesture, Pen, Touch, Speech]);
    assert_eq!(study_ranking(DataKind::ConstraintSet), [Touch, Speech]);
    let setup = common::study_setup();
    for task in task_catalog() {
        for p in &task.params {
            let ranked = setup.kb.modalities_for_parameter(p, &setup.cell);
            if p.data_type.kind() == DataKind::ObjectModelRef {
                assert_eq!(setup.kb.preferred_modality(p, &setup.cell), Some(Gesture), "{}.{}", task.id, p.name);
            }
            // every parameter list is the kind's list restricted to what it accepts
            let full = study_ranking(p.data_type.kind());
            let restricted: Vec<_> = full.into_iter().filter(|m| p.modalities.contains(m)).collect();
            assert_eq!(ranked, restricted, "{}.{}", task.id, p.name);
        }
    }
}

#[test]
fn study_cell_offers_four_modalities() {
    let setup = common::study_setup();
    assert_eq!(
        setup.kb.available_modalities(&setup.cell),
        BTreeSet::from([Touch, Gesture, Speech, Pen])
    );
    let keyboard = CellConfiguration::with_components("kbm", [Keyboard, Mouse]);
    assert_eq!(setup.kb.available_modalities(&keyboard), BTreeSet::from([KeyboardMouse]));
}

fn components() -> impl Strategy<Value = Vec<Component>> {
    prop::collection::vec(prop::sample::select(Component::ALL.to_vec()), 0..12)
}

fn modalities() -> impl Strategy<Value = BTreeSet<InputModality>> {
    prop::collection::btree_set(prop::sample::select(InputModality::ALL.to_vec()), 1..=5)
}

proptest! {
    #[test]
    fn ranking_is_a_filtered_preference_order(
        comps in components(),
        applicable in modalities(),
        kind in prop::sample::select(DataKind::ALL.to_vec()),
    ) {
        let kb = KnowledgeBase::default();
        let set: ComponentSet = comps.iter().copied().collect();
        let ranked = kb.rank(kind, &applicable, &set);
        let available = kb.available_for(&set);
        let want: BTreeSet<_> = applicable.intersection(&available).copied().collect();
        prop_assert_eq!(ranked.iter().copied().collect::<BTreeSet<_>>(), want);
        prop_assert_eq!(ranked.len(), applicable.intersection(&available).count());
        // listed modalities keep their row order and come before unlisted ones
        let row = kb.preferences.row(kind);
        let keys: Vec<_> = ranked
            .iter()
            .map(|m| (row.iter().position(|r| r == m).unwrap_or(usize::MAX), *m))
            .collect();
        prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adding_components_never_removes_modalities(comps in components(), extra in components()) {
        let kb = KnowledgeBase::default();
        let base: ComponentSet = comps.iter().copied().collect();
        let more: ComponentSet = comps.iter().chain(&extra).copied().collect();
        prop_assert!(kb.available_for(&base).is_subset(&kb.available_for(&more)));
    }
}
