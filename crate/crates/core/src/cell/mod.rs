//! Memory cell: a memory atom and an ancillary atom sharing a cavity and,
//! while both are Rydberg-excited, a motional normal mode.
//!
//! Pulses are ideal instantaneous swaps between two `(level, mode)` pairs.
//! Blockade selectivity is a condition on the partner atom: a pulse tuned to
//! the interaction-shifted line only acts when the partner sits in `r` or
//! `r'`, and one tuned to the bare line only acts when it does not.

mod protocol;

use std::fmt;

use crate::error::{QramError, Result};
use crate::qstate::{Amplitude, BranchLabel, Qubit, SparseState};
use crate::routing::TreeTopology;

pub use protocol::{
    initialize_selected, park_ancillas, read_protocol, write_protocol, write_protocol_with,
    ProtocolTrace, StepRecord,
};

/// Coefficient picked up by each swapped amplitude. The checkpoints carry no
/// phases, so a real symmetric swap is used.
pub const PI_PULSE_PHASE: Amplitude = Amplitude::new(1.0, 0.0);

const ONE: Amplitude = Amplitude::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomLevel {
    G,
    S,
    R,
    RPrime,
    /// Parking level, ancilla only.
    T,
}

impl AtomLevel {
    pub fn is_rydberg(self) -> bool {
        matches!(self, AtomLevel::R | AtomLevel::RPrime)
    }
}

impl fmt::Display for AtomLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomLevel::G => "g",
            AtomLevel::S => "s",
            AtomLevel::R => "r",
            AtomLevel::RPrime => "r'",
            AtomLevel::T => "t",
        })
    }
}

/// Basis state of one memory cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellLabel {
    pub memory: AtomLevel,
    pub ancilla: AtomLevel,
    /// Quanta in the shared normal mode, 0 or 1.
    pub mode: u8,
    /// Cavity photon occupation, 0 or 1.
    pub photon: u8,
    /// Record of spontaneous-emission resets of the memory atom, one bit per
    /// reset (newest last). Keeps the reset an isometry.
    pub emissions: u64,
}

impl CellLabel {
    /// Memory atom holding `g` (bit 0) or `s` (bit 1), everything else idle.
    pub fn resting(bit: u8) -> Self {
        Self {
            memory: if bit == 0 { AtomLevel::G } else { AtomLevel::S },
            ancilla: AtomLevel::G,
            mode: 0,
            photon: 0,
            emissions: 0,
        }
    }

    fn level(&self, atom: Atom) -> AtomLevel {
        match atom {
            Atom::Memory => self.memory,
            Atom::Ancilla => self.ancilla,
        }
    }

    fn set_level(&mut self, atom: Atom, level: AtomLevel) {
        match atom {
            Atom::Memory => self.memory = level,
            Atom::Ancilla => self.ancilla = level,
        }
    }
}

impl fmt::Display for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/{}",
            self.memory, self.ancilla, self.mode, self.photon
        )?;
        if self.emissions != 0 {
            write!(f, "/e{:b}", self.emissions)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Memory,
    Ancilla,
}

impl Atom {
    fn partner(self) -> Self {
        match self {
            Atom::Memory => Atom::Ancilla,
            Atom::Ancilla => Atom::Memory,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    PartnerInRydberg,
    PartnerNotInRydberg,
    Unconditional,
}

impl Condition {
    fn holds(self, partner: AtomLevel) -> bool {
        match self {
            Condition::PartnerInRydberg => partner.is_rydberg(),
            Condition::PartnerNotInRydberg => !partner.is_rydberg(),
            Condition::Unconditional => true,
        }
    }
}

/// One idealized pi pulse: swaps `(from, m)` with `(to, m + mode_delta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PulseSpec {
    target: Atom,
    from: AtomLevel,
    to: AtomLevel,
    mode_delta: i8,
    condition: Condition,
    selected_only: bool,
}

impl PulseSpec {
    pub fn new(
        target: Atom,
        from: AtomLevel,
        to: AtomLevel,
        mode_delta: i8,
        condition: Condition,
        selected_only: bool,
    ) -> Result<Self> {
        if !(-1..=1).contains(&mode_delta) {
            return Err(QramError::config(format!(
                "mode change {mode_delta} not in -1..=1"
            )));
        }
        if mode_delta != 0 && condition != Condition::PartnerInRydberg {
            return Err(QramError::config(
                "sideband pulses need the blockade-coupled normal mode (partner in Rydberg)",
            ));
        }
        if target == Atom::Memory && (from == AtomLevel::T || to == AtomLevel::T) {
            return Err(QramError::config("the memory atom has no parking level"));
        }
        if from == to && mode_delta == 0 {
            return Err(QramError::config("pulse couples a level to itself"));
        }
        Ok(Self {
            target,
            from,
            to,
            mode_delta,
            condition,
            selected_only,
        })
    }

    /// Carrier pi pulse on every cell.
    pub fn pi(target: Atom, from: AtomLevel, to: AtomLevel, condition: Condition) -> Self {
        Self::new(target, from, to, 0, condition, false).expect("valid carrier pulse")
    }

    /// Sideband pulse, necessarily blockade-conditioned.
    pub fn sideband(target: Atom, from: AtomLevel, to: AtomLevel, mode_delta: i8) -> Self {
        Self::new(
            target,
            from,
            to,
            mode_delta,
            Condition::PartnerInRydberg,
            false,
        )
        .expect("valid sideband pulse")
    }

    pub fn selected_only(mut self) -> Self {
        self.selected_only = true;
        self
    }

    pub fn target(&self) -> Atom {
        self.target
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn mode_delta(&self) -> i8 {
        self.mode_delta
    }

    /// Image of one cell under this pulse, or `None` when it is not addressed.
    fn act(&self, cell: &CellLabel) -> Result<Option<CellLabel>> {
        if !self.condition.holds(cell.level(self.target.partner())) {
            return Ok(None);
        }
        let level = cell.level(self.target);
        let mode = cell.mode as i8;
        let (new_level, new_mode) = if level == self.from {
            (self.to, mode + self.mode_delta)
        } else if level == self.to {
            (self.from, mode - self.mode_delta)
        } else {
            return Ok(None);
        };
        match new_mode {
            0 | 1 => {
                let mut image = *cell;
                image.set_level(self.target, new_level);
                image.mode = new_mode as u8;
                Ok(Some(image))
            }
            // No line below the motional ground state.
            -1 => Ok(None),
            _ => Err(QramError::protocol(
                "apply_pulse",
                format!("pulse would drive the normal mode of {cell} past one quantum"),
            )),
        }
    }
}

/// Applies `pulse` to every addressed cell on every branch.
pub fn apply_pulse(
    state: &SparseState,
    topology: &TreeTopology,
    pulse: &PulseSpec,
) -> Result<SparseState> {
    state.apply_label_map(|label| {
        let selected = topology.selected_cell(&label.nodes);
        let mut image = label.clone();
        for (index, cell) in image.cells.iter_mut().enumerate() {
            if pulse.selected_only && index != selected {
                continue;
            }
            if let Some(next) = pulse.act(cell)? {
                if next.mode != 0 && !(next.memory.is_rydberg() && next.ancilla.is_rydberg()) {
                    return Err(QramError::protocol(
                        "apply_pulse",
                        format!(
                            "cell {index} holds a motional quantum outside the blockade regime"
                        ),
                    ));
                }
                *cell = next;
            }
        }
        Ok((image, PI_PULSE_PHASE))
    })
}

/// Which flying photon is being absorbed; both use the same ideal map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoredPhoton {
    SelectPhoton,
    DataPhoton,
}

/// `(a|0>_p + b|1>_p)|g>_a -> |0>_p(a|g>_a + b|s>_a)` on the selected cell.
pub fn photon_storage_map(
    state: &SparseState,
    topology: &TreeTopology,
    which: StoredPhoton,
) -> Result<SparseState> {
    let step = match which {
        StoredPhoton::SelectPhoton => "store select photon",
        StoredPhoton::DataPhoton => "store data photon",
    };
    state.apply_label_map(|label| {
        let mut image = label.clone();
        let cell = selected_cell_mut(&mut image, topology, step)?;
        if cell.ancilla != AtomLevel::G {
            return Err(QramError::protocol(
                step,
                format!("ancilla in {} instead of g", cell.ancilla),
            ));
        }
        if cell.photon == 1 {
            cell.photon = 0;
            cell.ancilla = AtomLevel::S;
        }
        Ok((image, ONE))
    })
}

/// `(a|g>_a + b|s>_a)|0>_p -> |g>_a(a|0>_p + b|1>_p)` on the selected cell.
pub fn retrieval_map(state: &SparseState, topology: &TreeTopology) -> Result<SparseState> {
    let step = "retrieve";
    state.apply_label_map(|label| {
        let mut image = label.clone();
        let cell = selected_cell_mut(&mut image, topology, step)?;
        if cell.photon != 0 {
            return Err(QramError::protocol(step, "cavity mode already occupied"));
        }
        match cell.ancilla {
            AtomLevel::G => {}
            AtomLevel::S => {
                cell.ancilla = AtomLevel::G;
                cell.photon = 1;
            }
            other => {
                return Err(QramError::protocol(
                    step,
                    format!("ancilla in {other}, outside span(g, s)"),
                ))
            }
        }
        Ok((image, ONE))
    })
}

/// Places `qubit` in the cavity mode of the selected cell.
pub fn inject_cell_photon(
    state: &SparseState,
    topology: &TreeTopology,
    qubit: &Qubit,
) -> Result<SparseState> {
    state.apply_branching_map(|label| {
        let selected = topology.selected_cell(&label.nodes);
        match label.cells.get(selected) {
            Some(cell) if cell.photon == 0 => {}
            Some(_) => {
                return Err(QramError::protocol(
                    "inject_cell_photon",
                    "cavity mode already occupied",
                ))
            }
            None => {
                return Err(QramError::protocol(
                    "inject_cell_photon",
                    format!("cell {selected} is not in play"),
                ))
            }
        }
        Ok(qubit
            .components()
            .map(|(bit, amp)| {
                let mut image = label.clone();
                image.cells[selected].photon = bit;
                (image, amp)
            })
            .collect())
    })
}

/// Spontaneous decay `r -> g` of the selected memory atom. The emitted
/// quantum is recorded in the cell's emission history.
pub fn decay_selected_memory(state: &SparseState, topology: &TreeTopology) -> Result<SparseState> {
    let step = "decay";
    state.apply_label_map(|label| {
        let mut image = label.clone();
        let cell = selected_cell_mut(&mut image, topology, step)?;
        if cell.emissions >> 63 != 0 {
            return Err(QramError::protocol(step, "emission record is full"));
        }
        let emitted = match cell.memory {
            AtomLevel::R => {
                cell.memory = AtomLevel::G;
                1
            }
            AtomLevel::G => 0,
            other => {
                return Err(QramError::protocol(
                    step,
                    format!("memory atom in {other} during reset"),
                ))
            }
        };
        cell.emissions = (cell.emissions << 1) | emitted;
        Ok((image, ONE))
    })
}

/// Returns parked ancillas `t -> g` through an intermediate level.
pub fn release_parked(state: &SparseState) -> Result<SparseState> {
    state.apply_label_map(|label| {
        let mut image = label.clone();
        for cell in &mut image.cells {
            if cell.ancilla == AtomLevel::T {
                cell.ancilla = AtomLevel::G;
            }
        }
        Ok((image, ONE))
    })
}

/// Fills an empty cell list with one cell per leaf, memory atom `i` holding
/// `contents[i]` as `a|g> + b|s>`.
pub fn preload_cells(
    state: &SparseState,
    topology: &TreeTopology,
    contents: &[Qubit],
) -> Result<SparseState> {
    if contents.len() != topology.cell_count() {
        return Err(QramError::config(format!(
            "{} cell contents given for {} cells",
            contents.len(),
            topology.cell_count()
        )));
    }
    let mut current = state.apply_label_map(|label| {
        if !label.cells.is_empty() {
            return Err(QramError::protocol(
                "preload_cells",
                "cells already in play",
            ));
        }
        Ok((label.clone(), ONE))
    })?;
    for content in contents {
        current = current.apply_branching_map(|label: &BranchLabel| {
            Ok(content
                .components()
                .map(|(bit, amp)| {
                    let mut image = label.clone();
                    image.cells.push(CellLabel::resting(bit));
                    (image, amp)
                })
                .collect())
        })?;
    }
    Ok(current)
}

fn selected_cell_mut<'a>(
    label: &'a mut BranchLabel,
    topology: &TreeTopology,
    step: &str,
) -> Result<&'a mut CellLabel> {
    let selected = topology.selected_cell(&label.nodes);
    label
        .cells
        .get_mut(selected)
        .ok_or_else(|| QramError::protocol(step, format!("cell {selected} is not in play")))
}
