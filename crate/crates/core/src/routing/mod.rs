//! Bucket-brigade control circuit.
//!
//! Address qubits are dispatched one per level; each one is absorbed by the
//! router it reaches, which flips `Left -> Right` only when the bit is 1
//! (`U|1>|L> = |0>|R>`, `U|0>|L> = |0>|L>`). Afterwards a photon follows the
//! router orientations down to the selected cell and back without touching
//! the routers.

mod call;
mod glm;
mod ledger;
mod topology;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{QramError, Result};
use crate::qstate::{AddressRegister, Amplitude, BranchLabel, PhotonSite, Qubit, SparseState};

pub use call::{memory_call, read_target_state, run_call, select_cell, CallOutcome, Payload};
pub use glm::{
    glm_closed_form, glm_memory_call, GlmEvent, GlmOutcome, GlmStage, GlmTree, TritState,
    MAX_GLM_DEPTH,
};
pub use ledger::{BranchTally, LevelTally, ManipulationLedger};
pub use topology::{NodeId, NodeOrientation, TreeTopology, MAX_DENSE_DEPTH, MAX_SPARSE_DEPTH};

const ONE: Amplitude = Amplitude::new(1.0, 0.0);

/// A normalized superposition of classical addresses.
#[derive(Clone, Debug, PartialEq)]
pub struct AddressSuperposition {
    width: usize,
    terms: Vec<(u64, Amplitude)>,
}

impl AddressSuperposition {
    pub fn new(width: usize, terms: Vec<(u64, Amplitude)>) -> Result<Self> {
        if width == 0 || width > 63 {
            return Err(QramError::config(format!(
                "address width {width} out of range"
            )));
        }
        let mut seen = BTreeSet::new();
        for (x, _) in &terms {
            if x >> width != 0 {
                return Err(QramError::config(format!(
                    "address {x} does not fit in {width} bits"
                )));
            }
            if !seen.insert(*x) {
                return Err(QramError::config(format!("address {x} listed twice")));
            }
        }
        if terms.is_empty() {
            return Err(QramError::EmptySupport);
        }
        let norm_sqr: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > crate::qstate::NORM_TOL {
            return Err(QramError::NotNormalized { norm_sqr });
        }
        Ok(Self { width, terms })
    }

    pub fn classical(width: usize, address: u64) -> Result<Self> {
        Self::new(width, vec![(address, ONE)])
    }

    /// Equal-weight superposition of the given addresses.
    pub fn uniform(width: usize, addresses: &[u64]) -> Result<Self> {
        let amp = Amplitude::new(1.0 / (addresses.len() as f64).sqrt(), 0.0);
        Self::new(width, addresses.iter().map(|&x| (x, amp)).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &[(u64, Amplitude)] {
        &self.terms
    }

    pub fn is_classical(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn as_classical(&self) -> Option<u64> {
        self.is_classical().then(|| self.terms[0].0)
    }
}

impl fmt::Display for AddressSuperposition {
    /// `001` for a classical address, `010@0.707107;101@0.707107` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(x) = self.as_classical() {
            return f.write_str(&crate::qstate::render_address(x, self.width));
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(x, a)| {
                let bits = crate::qstate::render_address(*x, self.width);
                if a.im.abs() < 1e-12 {
                    format!("{bits}@{:.6}", a.re)
                } else {
                    format!("{bits}@{:.6}{:+.6}i", a.re, a.im)
                }
            })
            .collect();
        f.write_str(&parts.join(";"))
    }
}

/// Fresh machine: every router `Left`, empty address register, photon at the
/// register, no cells in play.
pub fn init_tree(depth: usize) -> Result<SparseState> {
    let topology = TreeTopology::new(depth)?;
    Ok(SparseState::basis(BranchLabel {
        nodes: vec![NodeOrientation::Left; topology.node_count()],
        address: AddressRegister::zero(depth),
        photon: PhotonSite::AtRegister,
        data: 0,
        cells: Vec::new(),
    }))
}

/// Writes `address` into an empty address register.
pub fn prepare_address(state: &SparseState, address: &AddressSuperposition) -> Result<SparseState> {
    state.apply_branching_map(|label| {
        if label.address.width() != address.width() {
            return Err(QramError::config(format!(
                "address width {} does not match register width {}",
                address.width(),
                label.address.width()
            )));
        }
        if label.address.bits() != 0 {
            return Err(QramError::protocol(
                "prepare_address",
                format!("address register already holds {}", label.address),
            ));
        }
        Ok(address
            .terms()
            .iter()
            .map(|&(x, amp)| {
                let mut image = label.clone();
                image.address = AddressRegister::new(x, address.width());
                (image, amp)
            })
            .collect())
    })
}

/// One controlled pulse at one level, as seen by a single branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipEvent {
    pub level: usize,
    pub node: NodeId,
    /// Register contents before dispatch started.
    pub address: u64,
    /// Whether the incoming address bit flipped the router.
    pub flipped: bool,
}

/// Dispatches the address register into the routers (`U` at every level).
pub fn dispatch_address(
    state: &SparseState,
    topology: &TreeTopology,
) -> Result<(SparseState, ManipulationLedger)> {
    dispatch_address_with(state, topology, |_| None)
}

/// [`dispatch_address`] with a hook that may overwrite the router
/// orientation right after each pulse; used to inject errors.
pub fn dispatch_address_with<H>(
    state: &SparseState,
    topology: &TreeTopology,
    mut hook: H,
) -> Result<(SparseState, ManipulationLedger)>
where
    H: FnMut(&FlipEvent) -> Option<NodeOrientation>,
{
    let depth = topology.depth();
    let mut ledger = ManipulationLedger::new(depth);
    let mut branch_flips: BTreeMap<u64, BTreeSet<usize>> = BTreeMap::new();
    let mut flip_weight = vec![0.0; depth];

    let next = state.apply_label_map(|label| {
        check_geometry(label, topology, "load_address")?;
        let original = label.address.bits();
        let prob = state.amplitude(label).norm_sqr();
        let mut image = label.clone();
        let flips = branch_flips.entry(original).or_default();
        for (level, weight) in flip_weight.iter_mut().enumerate() {
            let node = topology.node_reached(&image.nodes, level);
            let slot = node.index();
            if image.nodes[slot] != NodeOrientation::Left {
                return Err(QramError::protocol(
                    "load_address",
                    format!("router {node:?} is not Left when address qubit {level} arrives"),
                ));
            }
            let bit = image.address.bit(level);
            if bit {
                image.nodes[slot] = NodeOrientation::Right;
                image.address = image.address.with_bit(level, false);
                *weight += prob;
                flips.insert(level);
            }
            let event = FlipEvent {
                level,
                node,
                address: original,
                flipped: bit,
            };
            if let Some(forced) = hook(&event) {
                image.nodes[slot] = forced;
            }
        }
        Ok((image, ONE))
    })?;

    for (level, &weight) in flip_weight.iter().enumerate() {
        ledger.record_broadcast(level);
        ledger.record_flip(level, weight);
    }
    for (address, levels) in branch_flips {
        ledger.branches.entry(address).or_default().node_flips = levels.len() as u32;
    }
    Ok((next, ledger))
}

/// Prepares the register with `address` and dispatches it.
pub fn load_address(
    state: &SparseState,
    topology: &TreeTopology,
    address: &AddressSuperposition,
) -> Result<(SparseState, ManipulationLedger)> {
    let prepared = prepare_address(state, address)?;
    dispatch_address(&prepared, topology)
}

/// Coherent reset: address qubits retrace the tree from the deepest level
/// up, each un-storing its bit from the router it set. Leaves every router
/// `Left` and the address register as it was before loading.
pub fn unload_address(state: &SparseState, topology: &TreeTopology) -> Result<SparseState> {
    let depth = topology.depth();
    state.apply_label_map(|label| {
        check_geometry(label, topology, "unload_address")?;
        let mut image = label.clone();
        for level in (0..depth).rev() {
            let node = topology.node_reached(&image.nodes, level);
            let slot = node.index();
            if image.address.bit(level) {
                return Err(QramError::protocol(
                    "unload_address",
                    format!("address qubit {level} is occupied before un-storing"),
                ));
            }
            if image.nodes[slot] == NodeOrientation::Right {
                image.nodes[slot] = NodeOrientation::Left;
                image.address = image.address.with_bit(level, true);
            }
        }
        if let Some(pos) = image.nodes.iter().position(|o| o.is_right()) {
            return Err(QramError::protocol(
                "unload_address",
                format!(
                    "router {:?} is still Right; node configuration matches no address",
                    NodeId::from_index(pos)
                ),
            ));
        }
        Ok((image, ONE))
    })
}

/// Fast reset for a known classical address: every router back to `Left`
/// and the register rewritten with `address`. Refuses superposed states.
pub fn reset_classical(
    state: &SparseState,
    topology: &TreeTopology,
    address: u64,
) -> Result<SparseState> {
    let expected: Vec<NodeOrientation> = {
        let mut nodes = vec![NodeOrientation::Left; topology.node_count()];
        for (level, node) in topology.path_to(address as usize).into_iter().enumerate() {
            let bit = (address >> (topology.depth() - 1 - level)) & 1 == 1;
            nodes[node.index()] = NodeOrientation::from_bit(bit);
        }
        nodes
    };
    state.apply_label_map(|label| {
        if label.nodes != expected || label.address.bits() != 0 {
            return Err(QramError::protocol(
                "reset_classical",
                "routers do not hold the stated classical address",
            ));
        }
        let mut image = label.clone();
        image.nodes.fill(NodeOrientation::Left);
        image.address = AddressRegister::new(address, topology.depth());
        Ok((image, ONE))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    ToCells,
    ToRegister,
}

/// Moves the flying photon one router at a time along the orientations.
/// Routers are never modified.
pub fn route_photon(
    state: &SparseState,
    topology: &TreeTopology,
    direction: Direction,
) -> Result<(SparseState, ManipulationLedger)> {
    let depth = topology.depth();
    let mut ledger = ManipulationLedger::new(depth);
    let mut branches: BTreeMap<u64, u32> = BTreeMap::new();
    let mut current = state.clone();

    match direction {
        Direction::ToCells => {
            current = current.apply_label_map(|label| {
                check_geometry(label, topology, "route_photon")?;
                if label.photon != PhotonSite::AtRegister {
                    return Err(QramError::protocol(
                        "route_photon",
                        format!("photon at {} cannot be sent toward the cells", label.photon),
                    ));
                }
                let mut image = label.clone();
                image.photon = PhotonSite::AtNode(0);
                Ok((image, ONE))
            })?;
            for level in 0..depth {
                let snapshot = current.clone();
                let mut weight = 0.0;
                current = snapshot.apply_label_map(|label| {
                    let PhotonSite::AtNode(index) = label.photon else {
                        return Err(QramError::protocol("route_photon", "photon left the tree"));
                    };
                    let node = NodeId::from_index(index);
                    debug_assert_eq!(node.level, level);
                    let next = node.child(label.nodes[index]);
                    let mut image = label.clone();
                    image.photon = if level + 1 == depth {
                        PhotonSite::AtCell(next.offset)
                    } else {
                        PhotonSite::AtNode(next.index())
                    };
                    weight += snapshot.amplitude(label).norm_sqr();
                    *branches.entry(routed_address(label, topology)).or_default() += 1;
                    Ok((image, ONE))
                })?;
                ledger.record_traversal(level, weight);
            }
        }
        Direction::ToRegister => {
            current = current.apply_label_map(|label| {
                check_geometry(label, topology, "route_photon")?;
                let PhotonSite::AtCell(cell) = label.photon else {
                    return Err(QramError::protocol(
                        "route_photon",
                        format!(
                            "photon at {} cannot be sent back to the register",
                            label.photon
                        ),
                    ));
                };
                let mut image = label.clone();
                image.photon = PhotonSite::AtNode(topology.cell_parent(cell).index());
                let side = NodeOrientation::from_bit(cell % 2 == 1);
                check_return(label, topology.cell_parent(cell), side)?;
                Ok((image, ONE))
            })?;
            for level in (0..depth).rev() {
                let snapshot = current.clone();
                let mut weight = 0.0;
                current = snapshot.apply_label_map(|label| {
                    let PhotonSite::AtNode(index) = label.photon else {
                        return Err(QramError::protocol("route_photon", "photon left the tree"));
                    };
                    let node = NodeId::from_index(index);
                    debug_assert_eq!(node.level, level);
                    let mut image = label.clone();
                    image.photon = match node.parent() {
                        Some(parent) => {
                            let side = NodeOrientation::from_bit(node.offset % 2 == 1);
                            check_return(label, parent, side)?;
                            PhotonSite::AtNode(parent.index())
                        }
                        None => PhotonSite::AtRegister,
                    };
                    weight += snapshot.amplitude(label).norm_sqr();
                    *branches.entry(routed_address(label, topology)).or_default() += 1;
                    Ok((image, ONE))
                })?;
                ledger.record_traversal(level, weight);
            }
        }
    }

    // Every term of a branch is counted once per level; keep one count per level.
    let terms_per_branch = count_terms_per_branch(state, topology);
    for (address, hops) in branches {
        let terms = terms_per_branch.get(&address).copied().unwrap_or(1);
        ledger
            .branches
            .entry(address)
            .or_default()
            .photon_node_traversals = hops / terms;
    }
    Ok((current, ledger))
}

/// Address currently stored in the routers of this branch.
fn routed_address(label: &BranchLabel, topology: &TreeTopology) -> u64 {
    topology.selected_cell(&label.nodes) as u64
}

fn count_terms_per_branch(state: &SparseState, topology: &TreeTopology) -> BTreeMap<u64, u32> {
    let mut counts = BTreeMap::new();
    for label in state.labels() {
        *counts.entry(routed_address(label, topology)).or_default() += 1;
    }
    counts
}

fn check_return(label: &BranchLabel, node: NodeId, arriving_from: NodeOrientation) -> Result<()> {
    if label.nodes[node.index()] != arriving_from {
        return Err(QramError::protocol(
            "route_photon",
            format!("router {node:?} does not point toward the returning photon"),
        ));
    }
    Ok(())
}

fn check_geometry(label: &BranchLabel, topology: &TreeTopology, step: &str) -> Result<()> {
    if label.nodes.len() != topology.node_count() || label.address.width() != topology.depth() {
        return Err(QramError::protocol(
            step,
            format!(
                "label does not match a depth-{} tree ({} routers, {}-bit register)",
                topology.depth(),
                label.nodes.len(),
                label.address.width()
            ),
        ));
    }
    Ok(())
}

/// Puts a fresh flying qubit at the register. The flying mode must be empty.
pub fn inject_flying(state: &SparseState, qubit: &Qubit) -> Result<SparseState> {
    state.apply_branching_map(|label| {
        if !matches!(label.photon, PhotonSite::AtRegister | PhotonSite::Absorbed) || label.data != 0
        {
            return Err(QramError::protocol(
                "inject_flying",
                format!(
                    "flying mode busy (photon at {}, occupation {})",
                    label.photon, label.data
                ),
            ));
        }
        Ok(qubit
            .components()
            .map(|(bit, amp)| {
                let mut image = label.clone();
                image.photon = PhotonSite::AtRegister;
                image.data = bit;
                (image, amp)
            })
            .collect())
    })
}

/// Hands the flying mode over to the cavity of the cell it reached.
pub fn deliver_to_cell(state: &SparseState) -> Result<SparseState> {
    state.apply_label_map(|label| {
        let PhotonSite::AtCell(cell) = label.photon else {
            return Err(QramError::protocol(
                "deliver_to_cell",
                format!("photon at {} has not reached a cell", label.photon),
            ));
        };
        let mut image = label.clone();
        let slot = image.cells.get_mut(cell).ok_or_else(|| {
            QramError::protocol("deliver_to_cell", format!("cell {cell} is not in play"))
        })?;
        std::mem::swap(&mut slot.photon, &mut image.data);
        image.photon = PhotonSite::Absorbed;
        Ok((image, ONE))
    })
}

/// Releases the cavity mode of the selected cell as the flying photon.
pub fn emit_from_cell(state: &SparseState, topology: &TreeTopology) -> Result<SparseState> {
    state.apply_label_map(|label| {
        if label.photon != PhotonSite::Absorbed || label.data != 0 {
            return Err(QramError::protocol(
                "emit_from_cell",
                "flying mode must be empty and parked at a cell",
            ));
        }
        let cell = topology.selected_cell(&label.nodes);
        let mut image = label.clone();
        let slot = image.cells.get_mut(cell).ok_or_else(|| {
            QramError::protocol("emit_from_cell", format!("cell {cell} is not in play"))
        })?;
        std::mem::swap(&mut slot.photon, &mut image.data);
        image.photon = PhotonSite::AtCell(cell);
        Ok((image, ONE))
    })
}

/// Exact mean of `popcount` over all `2^n` addresses, computed as the
/// binomially weighted sum `sum_k k C(n,k) / 2^n`.
pub fn expected_flip_count(depth: usize) -> Result<f64> {
    if depth == 0 || depth > 62 {
        return Err(QramError::config(format!("depth {depth} outside 1..=62")));
    }
    let mut binom = 1.0f64;
    let mut total = 0.0;
    for k in 0..=depth {
        total += k as f64 * binom;
        binom = binom * (depth - k) as f64 / (k + 1) as f64;
    }
    Ok(total / 2f64.powi(depth as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodes_string(label: &BranchLabel) -> String {
        label.nodes.iter().map(|o| o.to_string()).collect()
    }

    fn only_label(state: &SparseState) -> &BranchLabel {
        assert_eq!(state.len(), 1);
        state.labels().next().unwrap()
    }

    #[test]
    fn init_tree_examples() {
        let s = init_tree(1).unwrap();
        assert_eq!(nodes_string(only_label(&s)), "L");
        let s = init_tree(3).unwrap();
        assert_eq!(nodes_string(only_label(&s)), "LLLLLLL");
        assert_eq!(only_label(&s).photon, PhotonSite::AtRegister);
        assert!(matches!(init_tree(0), Err(QramError::Config(_))));
    }

    #[test]
    fn routing_flip_example() {
        // |1>_addr |Left>_node -> |0>_addr |Right>_node at n = 1.
        let topo = TreeTopology::new(1).unwrap();
        let s = init_tree(1).unwrap();
        let (s, ledger) =
            load_address(&s, &topo, &AddressSuperposition::classical(1, 1).unwrap()).unwrap();
        let label = only_label(&s);
        assert_eq!(label.address.bits(), 0);
        assert_eq!(label.nodes, vec![NodeOrientation::Right]);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(ledger.node_flips, 1.0);
    }

    #[test]
    fn load_001_selects_expected_routers() {
        let topo = TreeTopology::new(3).unwrap();
        let s = init_tree(3).unwrap();
        let (s, ledger) = load_address(
            &s,
            &topo,
            &AddressSuperposition::classical(3, 0b001).unwrap(),
        )
        .unwrap();
        let label = only_label(&s);
        // Root Left, level-1 left router Left, level-2 router (2,0) Right.
        assert_eq!(nodes_string(label), "LLLRLLL");
        assert_eq!(ledger.node_flips, 1.0);
        assert_eq!(ledger.pulse_broadcasts, 3);
        assert_eq!(ledger.classical_flips(), Some(1));
    }

    #[test]
    fn all_zero_address_flips_nothing() {
        let topo = TreeTopology::new(4).unwrap();
        let (s, ledger) = load_address(
            &init_tree(4).unwrap(),
            &topo,
            &AddressSuperposition::classical(4, 0).unwrap(),
        )
        .unwrap();
        assert!(only_label(&s)
            .nodes
            .iter()
            .all(|o| *o == NodeOrientation::Left));
        assert_eq!(ledger.node_flips, 0.0);
    }

    #[test]
    fn superposed_load_has_two_branches() {
        let topo = TreeTopology::new(3).unwrap();
        let addr = AddressSuperposition::uniform(3, &[0b000, 0b111]).unwrap();
        let (s, ledger) = load_address(&init_tree(3).unwrap(), &topo, &addr).unwrap();
        assert_eq!(s.len(), 2);
        for (_, a) in s.iter() {
            assert!((a.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
        assert!((ledger.node_flips - 1.5).abs() < 1e-12);
        assert_eq!(ledger.branches[&0b000].node_flips, 0);
        assert_eq!(ledger.branches[&0b111].node_flips, 3);
    }

    #[test]
    fn load_requires_left_routers() {
        let topo = TreeTopology::new(2).unwrap();
        let tilted = init_tree(2)
            .unwrap()
            .apply_label_map(|l| {
                let mut l = l.clone();
                l.nodes[0] = NodeOrientation::Right;
                Ok((l, ONE))
            })
            .unwrap();
        let addr = AddressSuperposition::classical(2, 0b10).unwrap();
        assert!(matches!(
            load_address(&tilted, &topo, &addr),
            Err(QramError::Protocol { .. })
        ));
    }

    #[test]
    fn unload_inverts_load() {
        let topo = TreeTopology::new(3).unwrap();
        let s0 = init_tree(3).unwrap();
        let addr = AddressSuperposition::classical(3, 0b001).unwrap();
        let (loaded, _) = load_address(&s0, &topo, &addr).unwrap();
        let back = unload_address(&loaded, &topo).unwrap();
        let expected = prepare_address(&s0, &addr).unwrap();
        assert!((back.fidelity(&expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unload_rejects_corrupted_routers() {
        let topo = TreeTopology::new(3).unwrap();
        let addr = AddressSuperposition::classical(3, 0b001).unwrap();
        let (loaded, _) = load_address(&init_tree(3).unwrap(), &topo, &addr).unwrap();
        // Router (2,3) is off the selected path.
        let corrupted = loaded
            .apply_label_map(|l| {
                let mut l = l.clone();
                l.nodes[6] = NodeOrientation::Right;
                Ok((l, ONE))
            })
            .unwrap();
        assert!(matches!(
            unload_address(&corrupted, &topo),
            Err(QramError::Protocol { .. })
        ));
    }

    #[test]
    fn classical_reset_fast_path() {
        let topo = TreeTopology::new(3).unwrap();
        let s0 = init_tree(3).unwrap();
        let addr = AddressSuperposition::classical(3, 0b110).unwrap();
        let (loaded, _) = load_address(&s0, &topo, &addr).unwrap();
        let fast = reset_classical(&loaded, &topo, 0b110).unwrap();
        let slow = unload_address(&loaded, &topo).unwrap();
        assert_eq!(fast, slow);
        assert!(reset_classical(&loaded, &topo, 0b111).is_err());
    }

    #[test]
    fn photon_reaches_cell_001() {
        let topo = TreeTopology::new(3).unwrap();
        let addr = AddressSuperposition::classical(3, 0b001).unwrap();
        let (loaded, _) = load_address(&init_tree(3).unwrap(), &topo, &addr).unwrap();
        let (routed, ledger) = route_photon(&loaded, &topo, Direction::ToCells).unwrap();
        assert_eq!(only_label(&routed).photon, PhotonSite::AtCell(1));
        assert_eq!(only_label(&routed).nodes, only_label(&loaded).nodes);
        assert_eq!(ledger.photon_node_traversals, 3.0);
        assert_eq!(ledger.node_flips, 0.0);
        assert_eq!(ledger.branches[&1].photon_node_traversals, 3);
        let (back, _) = route_photon(&routed, &topo, Direction::ToRegister).unwrap();
        assert_eq!(only_label(&back).photon, PhotonSite::AtRegister);
    }

    #[test]
    fn single_router_routing() {
        let topo = TreeTopology::new(1).unwrap();
        let addr = AddressSuperposition::classical(1, 0).unwrap();
        let (loaded, _) = load_address(&init_tree(1).unwrap(), &topo, &addr).unwrap();
        let (routed, ledger) = route_photon(&loaded, &topo, Direction::ToCells).unwrap();
        assert_eq!(only_label(&routed).photon, PhotonSite::AtCell(0));
        assert_eq!(ledger.photon_node_traversals, 1.0);
    }

    #[test]
    fn route_rejects_wrong_site() {
        let topo = TreeTopology::new(2).unwrap();
        let s = init_tree(2).unwrap();
        assert!(matches!(
            route_photon(&s, &topo, Direction::ToRegister),
            Err(QramError::Protocol { .. })
        ));
    }

    #[test]
    fn expected_flip_count_values() {
        assert_eq!(expected_flip_count(1).unwrap(), 0.5);
        assert_eq!(expected_flip_count(3).unwrap(), 1.5);
        assert_eq!(expected_flip_count(10).unwrap(), 5.0);
        assert!(expected_flip_count(0).is_err());
    }

    #[test]
    fn address_rendering() {
        assert_eq!(
            AddressSuperposition::classical(3, 1).unwrap().to_string(),
            "001"
        );
        let s = AddressSuperposition::uniform(3, &[0b010, 0b101]).unwrap();
        assert_eq!(s.to_string(), "010@0.707107;101@0.707107");
        assert!(AddressSuperposition::new(2, vec![(4, ONE)]).is_err());
        assert!(AddressSuperposition::new(2, vec![(1, Amplitude::new(0.5, 0.0))]).is_err());
    }
}
