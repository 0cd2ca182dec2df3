//! Memory-cell pulse engine and protocols.

mod common;

use proptest::prelude::*;
use qram_core::cell::{
    apply_pulse, photon_storage_map, read_protocol, retrieval_map, write_protocol, Atom, AtomLevel,
    CellLabel, Condition, PulseSpec, StoredPhoton,
};
use qram_core::qstate::{Amplitude, BranchLabel, PhotonSite, Qubit, SparseState};
use qram_core::routing::{init_tree, TreeTopology};

const MEMORY_LEVELS: [AtomLevel; 4] = [AtomLevel::G, AtomLevel::S, AtomLevel::R, AtomLevel::RPrime];
const ANCILLA_LEVELS: [AtomLevel; 5] = [
    AtomLevel::G,
    AtomLevel::S,
    AtomLevel::R,
    AtomLevel::RPrime,
    AtomLevel::T,
];

fn memory_level() -> impl Strategy<Value = AtomLevel> {
    prop::sample::select(MEMORY_LEVELS.to_vec())
}

fn ancilla_level() -> impl Strategy<Value = AtomLevel> {
    prop::sample::select(ANCILLA_LEVELS.to_vec())
}

fn idle_cell() -> impl Strategy<Value = CellLabel> {
    (memory_level(), ancilla_level()).prop_map(|(m, a)| common::cell(m, a, 0))
}

fn carrier_pulse() -> impl Strategy<Value = PulseSpec> {
    (any::<bool>(), 0usize..5, 0usize..5, 0usize..3).prop_filter_map(
        "valid carrier",
        |(memory, from, to, cond)| {
            let (target, levels) = if memory {
                (Atom::Memory, &MEMORY_LEVELS[..])
            } else {
                (Atom::Ancilla, &ANCILLA_LEVELS[..])
            };
            let condition = [
                Condition::PartnerInRydberg,
                Condition::PartnerNotInRydberg,
                Condition::Unconditional,
            ][cond];
            let from = *levels.get(from)?;
            let to = *levels.get(to)?;
            PulseSpec::new(target, from, to, 0, condition, false).ok()
        },
    )
}

/// Depth-1 label carrying the two given cells.
fn two_cells(a: CellLabel, b: CellLabel) -> BranchLabel {
    let mut label = init_tree(1).unwrap().labels().next().unwrap().clone();
    label.photon = PhotonSite::Absorbed;
    label.cells = vec![a, b];
    label
}

fn partner(cell: &CellLabel, target: Atom) -> AtomLevel {
    match target {
        Atom::Memory => cell.ancilla,
        Atom::Ancilla => cell.memory,
    }
}

fn random_cells_state(cells: Vec<(CellLabel, CellLabel, f64)>) -> SparseState {
    let norm: f64 = cells.iter().map(|c| c.2 * c.2).sum::<f64>().sqrt();
    SparseState::from_terms(
        cells
            .into_iter()
            .map(|(a, b, w)| (two_cells(a, b), Amplitude::new(w / norm, 0.0))),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pulses_preserve_norm(
        cells in prop::collection::btree_set((idle_cell(), idle_cell()), 1..6),
        weights in prop::collection::vec(0.1f64..1.0, 6),
        pulse in carrier_pulse(),
    ) {
        let terms = cells.into_iter().zip(weights).map(|((a, b), w)| (a, b, w)).collect();
        let state = random_cells_state(terms);
        let topo = TreeTopology::new(1).unwrap();
        let out = apply_pulse(&state, &topo, &pulse).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-10);
        // A pi pulse is its own inverse.
        let back = apply_pulse(&out, &topo, &pulse).unwrap();
        prop_assert_eq!(back, state);
    }

    #[test]
    fn blockade_selectivity(a in idle_cell(), b in idle_cell(), pulse in carrier_pulse()) {
        prop_assume!(pulse.condition() == Condition::PartnerInRydberg);
        let topo = TreeTopology::new(1).unwrap();
        let before = two_cells(a, b);
        let out = apply_pulse(&SparseState::basis(before.clone()), &topo, &pulse).unwrap();
        let after = out.labels().next().unwrap();
        for (old, new) in before.cells.iter().zip(&after.cells) {
            if !partner(old, pulse.target()).is_rydberg() {
                prop_assert_eq!(old, new);
            }
        }
    }

    #[test]
    fn storage_then_retrieval_is_identity(q in common::qubit()) {
        let topo = TreeTopology::new(1).unwrap();
        let mut label = two_cells(CellLabel::resting(0), CellLabel::resting(0));
        let start = SparseState::from_terms(q.components().map(|(bit, amp)| {
            label.cells[0].photon = bit;
            (label.clone(), amp)
        }))
        .unwrap();
        let stored = photon_storage_map(&start, &topo, StoredPhoton::DataPhoton).unwrap();
        // The ancilla now carries the qubit.
        prop_assert!((common::cell_fidelity(&stored, 0, &[
            (common::cell(AtomLevel::G, AtomLevel::G, 0), q.alpha),
            (common::cell(AtomLevel::G, AtomLevel::S, 0), q.beta),
        ]) - 1.0).abs() <= 1e-10);
        let back = retrieval_map(&stored, &topo).unwrap();
        prop_assert!((back.fidelity(&start).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn write_checkpoints_and_bystander(
        old in common::qubit(),
        other in common::qubit(),
        data in common::qubit(),
    ) {
        let (start, topo) = common::selected_pair(&old, &other);
        let (end, trace) = write_protocol(&start, &topo, &data).unwrap();
        prop_assert_eq!(trace.steps.len(), 8);
        for rec in &trace.steps {
            prop_assert!((rec.state.norm_sqr() - 1.0).abs() <= 1e-10);
            let f = common::cell_fidelity(&rec.state, 1, &common::other_cell_during_write(&other, rec.index));
            prop_assert!(f >= 1.0 - 1e-10, "bystander at write step {}: {}", rec.index, f);
        }
        for (step, target) in common::write_checkpoints(&data) {
            let f = common::cell_fidelity(&trace.step(step).unwrap().state, 0, &target);
            prop_assert!(f >= 1.0 - 1e-10, "write step {}: {}", step, f);
        }
        let f = common::cell_fidelity(&end, 0, &[
            (CellLabel::resting(0), data.alpha),
            (CellLabel::resting(1), data.beta),
        ]);
        prop_assert!(f >= 1.0 - 1e-10);
    }

    #[test]
    fn read_checkpoints_and_bystander(stored in common::qubit(), other in common::qubit()) {
        let (start, topo) = common::selected_pair(&stored, &other);
        let (end, trace) = read_protocol(&start, &topo).unwrap();
        prop_assert_eq!(trace.steps.len(), 7);
        for rec in &trace.steps {
            prop_assert!((rec.state.norm_sqr() - 1.0).abs() <= 1e-10);
            let f = common::cell_fidelity(&rec.state, 1, &common::other_cell_during_read(&other, rec.index));
            prop_assert!(f >= 1.0 - 1e-10, "bystander at read step {}: {}", rec.index, f);
        }
        for (step, target) in common::read_checkpoints(&stored) {
            let f = common::cell_fidelity(&trace.step(step).unwrap().state, 0, &target);
            prop_assert!(f >= 1.0 - 1e-10, "read step {}: {}", step, f);
        }
        // Content now sits in the cavity; memory and ancilla are back in g.
        let mut photon = common::cell(AtomLevel::G, AtomLevel::G, 0);
        let empty = photon;
        photon.photon = 1;
        let f = common::cell_fidelity(&end, 0, &[(empty, stored.alpha), (photon, stored.beta)]);
        prop_assert!(f >= 1.0 - 1e-10);
    }
}

#[test]
fn basis_write_never_visits_r_prime() {
    let (start, topo) = common::selected_pair(&Qubit::one(), &Qubit::zero());
    let (_, trace) = write_protocol(&start, &topo, &Qubit::zero()).unwrap();
    for rec in &trace.steps {
        assert!(rec
            .state
            .labels()
            .all(|l| l.cells[0].memory != AtomLevel::RPrime));
    }
}

#[test]
fn reading_one_emits_one() {
    let (start, topo) = common::selected_pair(&Qubit::one(), &Qubit::zero());
    let (end, _) = read_protocol(&start, &topo).unwrap();
    assert_eq!(end.len(), 1);
    assert_eq!(end.labels().next().unwrap().cells[0].photon, 1);
}
