//! Sparse engine against the brute-force dense oracles.

mod common;

use proptest::prelude::*;
use qram_core::cell::{read_protocol, write_protocol};
use qram_core::dense::{DenseCellPair, DenseQram, DenseRouting};
use qram_core::qstate::Qubit;
use qram_core::routing::{
    init_tree, inject_flying, load_address, memory_call, route_photon, run_call, unload_address,
    AddressSuperposition, Direction, Payload, TreeTopology,
};

const TOL: f64 = 1e-10;

fn routing_agrees(n: usize, address: &AddressSuperposition, photon: &Qubit) {
    let topo = TreeTopology::new(n).unwrap();
    let mut dense = DenseRouting::new(n).unwrap();
    dense.prepare(address).unwrap();
    dense.dispatch().unwrap();
    let (loaded, _) = load_address(&init_tree(n).unwrap(), &topo, address).unwrap();
    let dev = dense
        .project(&loaded)
        .unwrap()
        .max_modulus_deviation(dense.state())
        .unwrap();
    assert!(dev <= TOL, "after load: {dev}");

    dense.inject(photon).unwrap();
    dense.route().unwrap();
    let s = inject_flying(&loaded, photon).unwrap();
    let (routed, _) = route_photon(&s, &topo, Direction::ToCells).unwrap();
    let dev = dense
        .project(&routed)
        .unwrap()
        .max_modulus_deviation(dense.state())
        .unwrap();
    assert!(dev <= TOL, "after routing down: {dev}");

    dense.route().unwrap();
    dense.unload().unwrap();
    let (back, _) = route_photon(&routed, &topo, Direction::ToRegister).unwrap();
    let unloaded = unload_address(&back, &topo).unwrap();
    let dev = dense
        .project(&unloaded)
        .unwrap()
        .max_modulus_deviation(dense.state())
        .unwrap();
    assert!(dev <= TOL, "after unload: {dev}");
}

#[test]
fn routing_of_every_classical_address() {
    for n in 1..=3 {
        for x in 0..(1u64 << n) {
            routing_agrees(
                n,
                &AddressSuperposition::classical(n, x).unwrap(),
                &Qubit::one(),
            );
        }
    }
}

#[test]
fn routing_of_ghz_like_address() {
    let amp = Qubit::from_bloch(1.0, 0.3);
    routing_agrees(3, &common::uniform(3, &[0b000, 0b111]), &amp);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routing_of_random_superpositions(
        address in common::superposition(3, 4),
        photon in common::qubit(),
    ) {
        routing_agrees(3, &address, &photon);
    }

    #[test]
    fn superposed_read_call(
        address in common::superposition(3, 4),
        contents in prop::collection::vec(common::qubit(), 8),
    ) {
        let out = memory_call(3, &address, &contents, &Payload::Read).unwrap();
        let mut dense = DenseQram::new(3, &address, &contents, &Qubit::zero()).unwrap();
        dense.read_call().unwrap();
        let dev = dense.project(&out.state).unwrap().max_modulus_deviation(dense.state()).unwrap();
        prop_assert!(dev <= TOL, "deviation {}", dev);
    }

    #[test]
    fn write_then_read_calls(
        x in 0u64..8,
        data in common::qubit(),
        contents in prop::collection::vec(common::qubit(), 8),
    ) {
        let topo = TreeTopology::new(3).unwrap();
        let address = AddressSuperposition::classical(3, x).unwrap();
        let written = memory_call(3, &address, &contents, &Payload::Write(data)).unwrap();
        let read = run_call(&written.state, &topo, &Payload::Read).unwrap();

        let mut dense = DenseQram::new(3, &address, &contents, &data).unwrap();
        dense.write_call().unwrap();
        let dev = dense.project(&written.state).unwrap().max_modulus_deviation(dense.state()).unwrap();
        prop_assert!(dev <= TOL, "after write {}", dev);
        dense.read_call().unwrap();
        let dev = dense.project(&read.state).unwrap().max_modulus_deviation(dense.state()).unwrap();
        prop_assert!(dev <= TOL, "after read {}", dev);
    }

    #[test]
    fn cell_pair_write_steps(
        selected in common::qubit(),
        other in common::qubit(),
        data in common::qubit(),
    ) {
        let (start, topo) = common::selected_pair(&selected, &other);
        let mut dense = DenseCellPair::selected(&selected, &other).unwrap();
        let dev = DenseCellPair::project(&start).unwrap().max_modulus_deviation(dense.state()).unwrap();
        prop_assert!(dev <= TOL);
        let (_, trace) = write_protocol(&start, &topo, &data).unwrap();
        let steps = dense.write_steps(&data).unwrap();
        prop_assert_eq!(trace.steps.len(), steps.len());
        for (record, expected) in trace.steps.iter().zip(&steps) {
            let dev = DenseCellPair::project(&record.state).unwrap().max_modulus_deviation(expected).unwrap();
            prop_assert!(dev <= TOL, "write step {} deviates by {}", record.index, dev);
        }
    }

    #[test]
    fn cell_pair_read_steps(selected in common::qubit(), other in common::qubit()) {
        let (start, topo) = common::selected_pair(&selected, &other);
        let mut dense = DenseCellPair::selected(&selected, &other).unwrap();
        let (_, trace) = read_protocol(&start, &topo).unwrap();
        let steps = dense.read_steps().unwrap();
        prop_assert_eq!(trace.steps.len(), steps.len());
        for (record, expected) in trace.steps.iter().zip(&steps) {
            let dev = DenseCellPair::project(&record.state).unwrap().max_modulus_deviation(expected).unwrap();
            prop_assert!(dev <= TOL, "read step {} deviates by {}", record.index, dev);
        }
    }
}
