//! Pulse sequences for writing into and reading out of the selected cell.
//!
//! Before either sequence runs, the selection photon has been absorbed by the
//! selected cell (its ancilla is in `s`) and every other ancilla has been
//! parked in `t`, where no pulse below touches it.

use super::{
    apply_pulse, decay_selected_memory, inject_cell_photon, photon_storage_map, release_parked,
    retrieval_map, Atom, AtomLevel, Condition, PulseSpec, StoredPhoton,
};
use crate::error::{QramError, Result};
use crate::qstate::{Qubit, SparseState};
use crate::routing::TreeTopology;

use AtomLevel::{RPrime, G, R, S, T};
use Condition::{PartnerInRydberg, PartnerNotInRydberg, Unconditional};

/// State after one numbered step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub index: usize,
    pub name: &'static str,
    pub state: SparseState,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProtocolTrace {
    pub steps: Vec<StepRecord>,
}

impl ProtocolTrace {
    fn push(&mut self, name: &'static str, state: &SparseState) {
        self.steps.push(StepRecord {
            index: self.steps.len() + 1,
            name,
            state: state.clone(),
        });
    }

    /// Step by its 1-based index.
    pub fn step(&self, index: usize) -> Option<&StepRecord> {
        index.checked_sub(1).and_then(|i| self.steps.get(i))
    }

    /// One line per step: `index<TAB>name<TAB>inline dump`.
    pub fn lines(&self) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| format!("{}\t{}\t{}", s.index, s.name, s.state.dump_inline()))
            .collect()
    }
}

fn pulse(state: &SparseState, topology: &TreeTopology, p: PulseSpec) -> Result<SparseState> {
    apply_pulse(state, topology, &p)
}

/// Parks every ancilla still in `g`; run right after the selection photon
/// has been stored.
pub fn park_ancillas(state: &SparseState, topology: &TreeTopology) -> Result<SparseState> {
    pulse(
        state,
        topology,
        PulseSpec::pi(Atom::Ancilla, G, T, Unconditional),
    )
}

fn check_selected(state: &SparseState, topology: &TreeTopology, step: &str) -> Result<()> {
    for label in state.labels() {
        let selected = topology.selected_cell(&label.nodes);
        for (i, cell) in label.cells.iter().enumerate() {
            let expected = if i == selected { S } else { T };
            if cell.ancilla != expected {
                return Err(QramError::protocol(
                    step,
                    format!(
                        "ancilla of cell {i} in {} instead of {expected}",
                        cell.ancilla
                    ),
                ));
            }
            if cell.mode != 0 || cell.photon != 0 {
                return Err(QramError::protocol(step, format!("cell {i} is not idle")));
            }
            if !matches!(cell.memory, G | S) {
                return Err(QramError::protocol(
                    step,
                    format!("memory of cell {i} in {}, outside span(g, s)", cell.memory),
                ));
            }
        }
        if label.cells.len() <= selected {
            return Err(QramError::protocol(
                step,
                format!("cell {selected} is not in play"),
            ));
        }
    }
    Ok(())
}

/// Empties the selected memory atom into `g`: `s -> r` under blockade from
/// the excited ancilla, spontaneous decay `r -> g`, ancilla back to `g`.
pub fn initialize_selected(state: &SparseState, topology: &TreeTopology) -> Result<SparseState> {
    check_selected(state, topology, "initialize")?;
    let s = pulse(
        state,
        topology,
        PulseSpec::pi(Atom::Ancilla, S, R, Unconditional),
    )?;
    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Memory, S, R, PartnerInRydberg),
    )?;
    let s = decay_selected_memory(&s, topology)?;
    pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Ancilla, R, G, Unconditional),
    )
}

/// Write with the data photon placed straight into the selected cavity.
pub fn write_protocol(
    state: &SparseState,
    topology: &TreeTopology,
    data: &Qubit,
) -> Result<(SparseState, ProtocolTrace)> {
    write_protocol_with(state, topology, |s| inject_cell_photon(s, topology, data))
}

/// Write sequence; `arrival` brings the data photon into the selected cavity.
pub fn write_protocol_with<F>(
    state: &SparseState,
    topology: &TreeTopology,
    arrival: F,
) -> Result<(SparseState, ProtocolTrace)>
where
    F: FnOnce(&SparseState) -> Result<SparseState>,
{
    let mut trace = ProtocolTrace::default();

    let s = initialize_selected(state, topology)?;
    trace.push("initialize memory", &s);

    let s = arrival(&s)?;
    let s = photon_storage_map(&s, topology, StoredPhoton::DataPhoton)?;
    trace.push("store data photon", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Memory, G, R, Unconditional),
    )?;
    trace.push("excite memories", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Ancilla, G, R, PartnerInRydberg),
    )?;
    let s = pulse(&s, topology, PulseSpec::sideband(Atom::Ancilla, S, R, 1))?;
    trace.push("ancilla carrier and blue sideband", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Memory, R, G, PartnerNotInRydberg),
    )?;
    trace.push("return unselected memories", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::sideband(Atom::Memory, R, RPrime, -1),
    )?;
    trace.push("memory red sideband", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Memory, RPrime, S, PartnerInRydberg),
    )?;
    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Memory, R, G, PartnerInRydberg),
    )?;
    trace.push("memory to ground manifold", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Ancilla, R, G, Unconditional),
    )?;
    let s = release_parked(&s)?;
    trace.push("release ancillas", &s);

    check_idle(&s, "write")?;
    Ok((s, trace))
}

/// Read sequence. Leaves the memory content in the selected cavity mode and
/// the memory atom in `g`.
pub fn read_protocol(
    state: &SparseState,
    topology: &TreeTopology,
) -> Result<(SparseState, ProtocolTrace)> {
    check_selected(state, topology, "read")?;
    let mut trace = ProtocolTrace::default();

    let s = pulse(
        state,
        topology,
        PulseSpec::pi(Atom::Ancilla, S, R, Unconditional),
    )?;
    trace.push("excite ancilla", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Memory, G, R, PartnerInRydberg),
    )?;
    let s = pulse(&s, topology, PulseSpec::sideband(Atom::Memory, S, R, 1))?;
    trace.push("memory carrier and blue sideband", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::sideband(Atom::Ancilla, R, RPrime, -1),
    )?;
    trace.push("ancilla red sideband", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Memory, R, G, PartnerInRydberg),
    )?;
    trace.push("memory to ground", &s);

    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Ancilla, R, G, Unconditional),
    )?;
    let s = pulse(
        &s,
        topology,
        PulseSpec::pi(Atom::Ancilla, RPrime, S, Unconditional),
    )?;
    trace.push("ancilla to ground manifold", &s);

    let s = retrieval_map(&s, topology)?;
    trace.push("retrieve photon", &s);

    let s = release_parked(&s)?;
    trace.push("release ancillas", &s);
    Ok((s, trace))
}

fn check_idle(state: &SparseState, step: &str) -> Result<()> {
    for label in state.labels() {
        for (i, cell) in label.cells.iter().enumerate() {
            if cell.ancilla != G || cell.mode != 0 || cell.photon != 0 {
                return Err(QramError::protocol(
                    step,
                    format!("cell {i} left as {cell}"),
                ));
            }
        }
    }
    Ok(())
}
