use std::collections::BTreeMap;

use serde::Serialize;

/// Per-level tallies.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LevelTally {
    /// Probability-weighted node flips.
    pub node_flips: f64,
    pub pulse_broadcasts: u64,
    /// Probability-weighted photon passes through this level.
    pub photon_node_traversals: f64,
    pub glm_trit_ops: u64,
}

/// Exact counts for one classical address branch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BranchTally {
    pub node_flips: u32,
    pub photon_node_traversals: u32,
}

/// Manipulation counters for one memory call.
///
/// Flip and traversal totals are expectations over the address
/// superposition; `branches` keeps the exact integers for each classical
/// address that carried amplitude.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ManipulationLedger {
    pub node_flips: f64,
    pub pulse_broadcasts: u64,
    pub photon_node_traversals: f64,
    pub glm_trit_ops: u64,
    pub per_level: Vec<LevelTally>,
    pub branches: BTreeMap<u64, BranchTally>,
}

impl ManipulationLedger {
    pub fn new(depth: usize) -> Self {
        Self {
            per_level: vec![LevelTally::default(); depth],
            ..Self::default()
        }
    }

    pub fn record_broadcast(&mut self, level: usize) {
        self.pulse_broadcasts += 1;
        self.per_level[level].pulse_broadcasts += 1;
    }

    pub fn record_flip(&mut self, level: usize, probability: f64) {
        self.node_flips += probability;
        self.per_level[level].node_flips += probability;
    }

    pub fn record_traversal(&mut self, level: usize, probability: f64) {
        self.photon_node_traversals += probability;
        self.per_level[level].photon_node_traversals += probability;
    }

    pub fn record_glm_op(&mut self, level: usize) {
        self.glm_trit_ops += 1;
        self.per_level[level].glm_trit_ops += 1;
    }

    /// Adds another ledger's counts to this one.
    pub fn absorb(&mut self, other: &ManipulationLedger) {
        if self.per_level.len() < other.per_level.len() {
            self.per_level
                .resize(other.per_level.len(), LevelTally::default());
        }
        self.node_flips += other.node_flips;
        self.pulse_broadcasts += other.pulse_broadcasts;
        self.photon_node_traversals += other.photon_node_traversals;
        self.glm_trit_ops += other.glm_trit_ops;
        for (mine, theirs) in self.per_level.iter_mut().zip(&other.per_level) {
            mine.node_flips += theirs.node_flips;
            mine.pulse_broadcasts += theirs.pulse_broadcasts;
            mine.photon_node_traversals += theirs.photon_node_traversals;
            mine.glm_trit_ops += theirs.glm_trit_ops;
        }
        for (address, tally) in &other.branches {
            let entry = self.branches.entry(*address).or_default();
            entry.node_flips += tally.node_flips;
            entry.photon_node_traversals += tally.photon_node_traversals;
        }
    }

    /// Exact flip count of a classical call, if exactly one branch ran.
    pub fn classical_flips(&self) -> Option<u32> {
        match self.branches.len() {
            1 => self.branches.values().next().map(|b| b.node_flips),
            _ => None,
        }
    }
}
