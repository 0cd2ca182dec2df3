//! State-vector algebra and routing invariants.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use qram_core::qstate::{Amplitude, BranchLabel, PhotonSite, SparseState};
use qram_core::routing::{
    init_tree, inject_flying, load_address, route_photon, unload_address, AddressSuperposition,
    Direction, TreeTopology,
};

fn random_state() -> impl Strategy<Value = SparseState<u32>> {
    prop::collection::btree_map(0u32..64, (0.1f64..1.0, 0.0..std::f64::consts::TAU), 1..12)
        .prop_map(|terms| {
            let norm: f64 = terms.values().map(|(r, _)| r * r).sum::<f64>().sqrt();
            SparseState::from_terms(
                terms
                    .into_iter()
                    .map(|(k, (r, phi))| (k, Amplitude::from_polar(r / norm, phi))),
            )
            .unwrap()
        })
}

/// Bijection on 0..64 given by xor with a key, plus a per-label phase.
fn phased_xor(key: u32, phase: f64) -> impl Fn(&u32) -> qram_core::Result<(u32, Amplitude)> {
    move |&k| Ok((k ^ key, Amplitude::from_polar(1.0, phase * k as f64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn label_maps_preserve_norm(s in random_state(), key in 0u32..64, phase in -3.0f64..3.0) {
        let out = s.apply_label_map(phased_xor(key, phase)).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn label_maps_compose(s in random_state(), k1 in 0u32..64, k2 in 0u32..64, p1 in -3.0f64..3.0, p2 in -3.0f64..3.0) {
        let f = phased_xor(k1, p1);
        let g = phased_xor(k2, p2);
        let stepwise = s.apply_label_map(&f).unwrap().apply_label_map(&g).unwrap();
        let fused = s
            .apply_label_map(|k| {
                let (a, x) = f(k)?;
                let (b, y) = g(&a)?;
                Ok((b, x * y))
            })
            .unwrap();
        prop_assert!((stepwise.fidelity(&fused).unwrap() - 1.0).abs() <= 1e-10);
        prop_assert!((stepwise.inner(&fused) - Amplitude::new(1.0, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in random_state(), b in random_state()) {
        let ab = a.fidelity(&b).unwrap();
        prop_assert!((ab - b.fidelity(&a).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((a.fidelity(&a).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn unload_inverts_load(address in (1usize..=5).prop_flat_map(|n| common::superposition(n, 4))) {
        let n = address.width();
        let topo = TreeTopology::new(n).unwrap();
        let fresh = init_tree(n).unwrap();
        let (loaded, _) = load_address(&fresh, &topo, &address).unwrap();
        let back = unload_address(&loaded, &topo).unwrap();
        let prepared = qram_core::routing::prepare_address(&fresh, &address).unwrap();
        prop_assert!((back.fidelity(&prepared).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn flips_match_popcount(n in 1usize..=10, x in any::<u64>()) {
        let x = x & ((1u64 << n) - 1);
        let topo = TreeTopology::new(n).unwrap();
        let (_, ledger) = load_address(&init_tree(n).unwrap(), &topo, &AddressSuperposition::classical(n, x).unwrap()).unwrap();
        prop_assert_eq!(ledger.classical_flips(), Some(x.count_ones()));
        prop_assert_eq!(ledger.pulse_broadcasts, n as u64);
    }

    #[test]
    fn superposed_flips_are_weighted_popcounts(address in common::superposition(4, 5)) {
        let topo = TreeTopology::new(4).unwrap();
        let (_, ledger) = load_address(&init_tree(4).unwrap(), &topo, &address).unwrap();
        let expected: f64 = address.terms().iter().map(|(x, a)| a.norm_sqr() * x.count_ones() as f64).sum();
        prop_assert!((ledger.node_flips - expected).abs() <= 1e-12);
    }

    #[test]
    fn photon_reaches_addressed_cell(address in common::superposition(3, 4), q in common::qubit()) {
        let topo = TreeTopology::new(3).unwrap();
        let (loaded, _) = load_address(&init_tree(3).unwrap(), &topo, &address).unwrap();
        let s = inject_flying(&loaded, &q).unwrap();
        let (down, _) = route_photon(&s, &topo, Direction::ToCells).unwrap();
        let reached = down.marginal(|l| match l.photon {
            PhotonSite::AtCell(c) => Some(c as u64),
            _ => None,
        });
        let expected: BTreeMap<Option<u64>, f64> =
            address.terms().iter().map(|(x, a)| (Some(*x), a.norm_sqr())).collect();
        prop_assert_eq!(reached.keys().collect::<Vec<_>>(), expected.keys().collect::<Vec<_>>());
        for (k, p) in &expected {
            prop_assert!((reached[k] - p).abs() <= 1e-12);
        }
        for label in down.labels() {
            prop_assert_eq!(label.photon, PhotonSite::AtCell(leaf_of(label)));
        }
        let (up, _) = route_photon(&down, &topo, Direction::ToRegister).unwrap();
        prop_assert!((up.fidelity(&s).unwrap() - 1.0).abs() <= 1e-12);
    }
}

/// Leaf reached by walking the routers of a label.
fn leaf_of(label: &BranchLabel) -> usize {
    let depth = label.address.width();
    let mut i = 0usize;
    for _ in 0..depth {
        i = 2 * i + 1 + label.nodes[i].is_right() as usize;
    }
    i + 1 - (1 << depth)
}

#[test]
fn measurement_frequency_of_equal_superposition() {
    // |+> on a two-label space, measured with 100k consecutive seeds.
    let h = Amplitude::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let s = SparseState::from_terms([(0u8, h), (1u8, h)]).unwrap();
    let mut counts: BTreeMap<u8, u64> = BTreeMap::new();
    let total = 100_000u64;
    for seed in 0..total {
        *counts
            .entry(s.sample_measurement(|l| *l, seed).unwrap().outcome)
            .or_default() += 1;
    }
    let freq = counts[&1] as f64 / total as f64;
    assert!((freq - 0.5).abs() <= 0.005, "frequency {freq}");
}
