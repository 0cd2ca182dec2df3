#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use qram_core::cell::{AtomLevel, CellLabel};
use qram_core::qstate::{Amplitude, Qubit, SparseState};
use qram_core::routing::{
    dispatch_address, init_tree, prepare_address, select_cell, AddressSuperposition, TreeTopology,
};

pub fn qubit() -> impl Strategy<Value = Qubit> {
    (0.0..PI, 0.0..TAU).prop_map(|(theta, phi)| Qubit::from_bloch(theta, phi))
}

/// Distinct addresses with random complex amplitudes, normalized.
pub fn superposition(n: usize, max_terms: usize) -> impl Strategy<Value = AddressSuperposition> {
    let cells = 1u64 << n;
    prop::collection::btree_set(0..cells, 1..=max_terms.min(cells as usize))
        .prop_flat_map(|set| {
            let len = set.len();
            (
                Just(set.into_iter().collect::<Vec<_>>()),
                prop::collection::vec((0.1f64..1.0, 0.0..TAU), len),
            )
        })
        .prop_map(move |(xs, amps)| {
            let norm: f64 = amps.iter().map(|(r, _)| r * r).sum::<f64>().sqrt();
            let terms = xs
                .into_iter()
                .zip(amps)
                .map(|(x, (r, phi))| (x, Amplitude::from_polar(r / norm, phi)))
                .collect();
            AddressSuperposition::new(n, terms).unwrap()
        })
}

/// Depth-1 machine at address 0, selection photon stored in cell 0 and
/// cell 1 parked.
pub fn selected_pair(selected: &Qubit, other: &Qubit) -> (SparseState, TreeTopology) {
    let topo = TreeTopology::new(1).unwrap();
    let s = qram_core::cell::preload_cells(&init_tree(1).unwrap(), &topo, &[*selected, *other])
        .unwrap();
    let s = prepare_address(&s, &AddressSuperposition::classical(1, 0).unwrap()).unwrap();
    let (s, _) = dispatch_address(&s, &topo).unwrap();
    let (s, _) = select_cell(&s, &topo).unwrap();
    (s, topo)
}

pub fn uniform(n: usize, xs: &[u64]) -> AddressSuperposition {
    AddressSuperposition::uniform(n, xs).unwrap()
}

pub fn cell(memory: AtomLevel, ancilla: AtomLevel, mode: u8) -> CellLabel {
    CellLabel {
        memory,
        ancilla,
        mode,
        photon: 0,
        emissions: 0,
    }
}

/// Fidelity of cell `i` (levels, mode and cavity; emission record traced
/// out with everything else) against `target`.
pub fn cell_fidelity(state: &SparseState, i: usize, target: &[(CellLabel, Amplitude)]) -> f64 {
    let target = SparseState::from_terms(target.iter().copied()).unwrap();
    state
        .reduced_fidelity(
            |l| {
                let mut kept = l.cells[i];
                kept.emissions = 0;
                let mut rest = l.clone();
                rest.cells[i] = CellLabel {
                    emissions: l.cells[i].emissions,
                    ..CellLabel::resting(0)
                };
                (kept, rest)
            },
            &target,
        )
        .unwrap()
}

/// Selected-cell states after write steps 4, 6 and 7 for data `q`.
pub fn write_checkpoints(q: &Qubit) -> Vec<(usize, Vec<(CellLabel, Amplitude)>)> {
    use AtomLevel::*;
    vec![
        (4, vec![(cell(R, R, 0), q.alpha), (cell(R, R, 1), q.beta)]),
        (
            6,
            vec![(cell(R, R, 0), q.alpha), (cell(RPrime, R, 0), q.beta)],
        ),
        (7, vec![(cell(G, R, 0), q.alpha), (cell(S, R, 0), q.beta)]),
    ]
}

/// Selected-cell states after read steps 2 and 3 for stored content `q`.
pub fn read_checkpoints(q: &Qubit) -> Vec<(usize, Vec<(CellLabel, Amplitude)>)> {
    use AtomLevel::*;
    vec![
        (2, vec![(cell(R, R, 0), q.alpha), (cell(R, R, 1), q.beta)]),
        (
            3,
            vec![(cell(R, R, 0), q.alpha), (cell(R, RPrime, 0), q.beta)],
        ),
    ]
}

/// Expected state of the unselected cell holding `p` after each write step.
/// Its memory is driven `g -> r` with the others at step 3 and sent back at
/// step 5; its ancilla leaves the parking level at the final step.
pub fn other_cell_during_write(p: &Qubit, step: usize) -> Vec<(CellLabel, Amplitude)> {
    use AtomLevel::*;
    let ground = if (3..=4).contains(&step) { R } else { G };
    let ancilla = if step == 8 { G } else { T };
    vec![
        (cell(ground, ancilla, 0), p.alpha),
        (cell(S, ancilla, 0), p.beta),
    ]
}

pub fn other_cell_during_read(p: &Qubit, step: usize) -> Vec<(CellLabel, Amplitude)> {
    use AtomLevel::*;
    let ancilla = if step == 7 { G } else { T };
    vec![
        (cell(G, ancilla, 0), p.alpha),
        (cell(S, ancilla, 0), p.beta),
    ]
}
