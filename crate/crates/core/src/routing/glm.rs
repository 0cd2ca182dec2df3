//! Step simulation of the three-state (wait/left/right) bucket brigade used
//! as the comparison baseline. Every pass of a flying qubit through a router
//! costs one trit manipulation there.

use std::fmt;

use super::{ManipulationLedger, NodeId, NodeOrientation};
use crate::error::{QramError, Result};

/// Deepest baseline tree accepted.
pub const MAX_GLM_DEPTH: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TritState {
    #[default]
    Wait,
    Left,
    Right,
}

impl TritState {
    fn orientation(self) -> Option<NodeOrientation> {
        match self {
            TritState::Wait => None,
            TritState::Left => Some(NodeOrientation::Left),
            TritState::Right => Some(NodeOrientation::Right),
        }
    }

    fn from_orientation(o: NodeOrientation) -> Self {
        match o {
            NodeOrientation::Left => TritState::Left,
            NodeOrientation::Right => TritState::Right,
        }
    }
}

impl fmt::Display for TritState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TritState::Wait => "W",
            TritState::Left => "L",
            TritState::Right => "R",
        })
    }
}

/// What caused a trit manipulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlmStage {
    /// Address qubit `qubit` passing an already-activated router.
    AddressPass {
        qubit: usize,
    },
    /// Address qubit `qubit` activating a waiting router.
    Activation {
        qubit: usize,
    },
    BusDown,
    BusUp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GlmEvent {
    pub level: usize,
    pub node: NodeId,
    pub stage: GlmStage,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlmOutcome {
    pub ledger: ManipulationLedger,
    /// Cell reached by the bus photon, if it reached one.
    pub arrived: Option<usize>,
    /// Whether the bus photon made it back to the data register.
    pub returned: bool,
}

impl GlmOutcome {
    pub fn succeeded(&self, address: u64) -> bool {
        self.arrived == Some(address as usize) && self.returned
    }
}

/// Trit tree for one baseline memory call.
#[derive(Clone, Debug)]
pub struct GlmTree {
    depth: usize,
    trits: Vec<TritState>,
}

impl GlmTree {
    pub fn new(depth: usize) -> Result<Self> {
        if depth == 0 || depth > MAX_GLM_DEPTH {
            return Err(QramError::config(format!(
                "baseline depth {depth} outside 1..={MAX_GLM_DEPTH}"
            )));
        }
        Ok(Self {
            depth,
            trits: vec![TritState::Wait; (1 << depth) - 1],
        })
    }

    pub fn trits(&self) -> &[TritState] {
        &self.trits
    }

    /// Runs one call for a classical `address`. The hook sees every trit
    /// manipulation with the orientation it leaves, and may overwrite it.
    pub fn call_with<H>(&mut self, address: u64, mut hook: H) -> Result<GlmOutcome>
    where
        H: FnMut(&GlmEvent, NodeOrientation) -> Option<NodeOrientation>,
    {
        let n = self.depth;
        if address >> n != 0 {
            return Err(QramError::config(format!(
                "address {address} wider than {n} bits"
            )));
        }
        let bit = |j: usize| (address >> (n - 1 - j)) & 1 == 1;
        let mut ledger = ManipulationLedger::new(n);

        for qubit in 0..n {
            let mut node = NodeId::root();
            loop {
                let slot = node.index();
                match self.trits[slot].orientation() {
                    Some(_) => {
                        let event = GlmEvent {
                            level: node.level,
                            node,
                            stage: GlmStage::AddressPass { qubit },
                        };
                        self.manipulate(&event, &mut ledger, &mut hook);
                        let o = self.trits[slot].orientation().expect("set trit");
                        if node.level + 1 == n {
                            // Fell out of the tree into a cell: the qubit is lost.
                            break;
                        }
                        node = node.child(o);
                    }
                    None => {
                        self.trits[slot] =
                            TritState::from_orientation(NodeOrientation::from_bit(bit(qubit)));
                        let event = GlmEvent {
                            level: node.level,
                            node,
                            stage: GlmStage::Activation { qubit },
                        };
                        self.manipulate(&event, &mut ledger, &mut hook);
                        break;
                    }
                }
            }
        }

        // Bus photon down.
        let mut node = NodeId::root();
        let mut arrived = None;
        for level in 0..n {
            let slot = node.index();
            if self.trits[slot] == TritState::Wait {
                break;
            }
            let event = GlmEvent {
                level,
                node,
                stage: GlmStage::BusDown,
            };
            self.manipulate(&event, &mut ledger, &mut hook);
            let o = self.trits[slot].orientation().expect("set trit");
            let next = node.child(o);
            if level + 1 == n {
                arrived = Some(next.offset);
            } else {
                node = next;
            }
        }

        // And back up the same way.
        let mut returned = false;
        if let Some(cell) = arrived {
            let mut child = NodeId {
                level: n,
                offset: cell,
            };
            returned = true;
            while let Some(parent) = child.parent() {
                let event = GlmEvent {
                    level: parent.level,
                    node: parent,
                    stage: GlmStage::BusUp,
                };
                self.manipulate(&event, &mut ledger, &mut hook);
                let side = NodeOrientation::from_bit(child.offset % 2 == 1);
                if self.trits[parent.index()].orientation() != Some(side) {
                    returned = false;
                    break;
                }
                child = parent;
            }
        }

        Ok(GlmOutcome {
            ledger,
            arrived,
            returned,
        })
    }

    fn manipulate<H>(&mut self, event: &GlmEvent, ledger: &mut ManipulationLedger, hook: &mut H)
    where
        H: FnMut(&GlmEvent, NodeOrientation) -> Option<NodeOrientation>,
    {
        ledger.record_glm_op(event.level);
        let slot = event.node.index();
        let current = self.trits[slot]
            .orientation()
            .expect("manipulated trit is set");
        if let Some(forced) = hook(event, current) {
            self.trits[slot] = TritState::from_orientation(forced);
        }
    }
}

/// Noiseless baseline call; the ledger holds the step-simulated trit count.
pub fn glm_memory_call(depth: usize, address: u64) -> Result<ManipulationLedger> {
    let mut tree = GlmTree::new(depth)?;
    let outcome = tree.call_with(address, |_, _| None)?;
    if !outcome.succeeded(address) {
        return Err(QramError::protocol(
            "glm_memory_call",
            "noiseless baseline call failed to route",
        ));
    }
    Ok(outcome.ledger)
}

/// `n(n+5)/2`, for checking the step count.
pub fn glm_closed_form(depth: usize) -> u64 {
    let n = depth as u64;
    n * (n + 5) / 2
}
