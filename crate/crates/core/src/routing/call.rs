//! One full memory call: address dispatch, cell selection, read or write,
//! and address unloading.

use super::{
    deliver_to_cell, dispatch_address, emit_from_cell, init_tree, inject_flying, prepare_address,
    route_photon, unload_address, AddressSuperposition, Direction, ManipulationLedger,
    NodeOrientation, TreeTopology,
};
use crate::cell::{
    park_ancillas, photon_storage_map, preload_cells, read_protocol, write_protocol_with,
    CellLabel, ProtocolTrace, StoredPhoton,
};
use crate::error::{QramError, Result};
use crate::qstate::{AddressRegister, BranchLabel, PhotonSite, Qubit, SparseState};

/// What the call does at the selected cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    /// Moves the cell content into the data register (destructive).
    Read,
    /// Stores the given qubit in the cell.
    Write(Qubit),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CallOutcome {
    pub state: SparseState,
    pub ledger: ManipulationLedger,
    /// States after each cell-level step.
    pub trace: ProtocolTrace,
}

/// Sends the selection photon down and leaves only the selected ancilla
/// unparked.
pub fn select_cell(
    state: &SparseState,
    topology: &TreeTopology,
) -> Result<(SparseState, ManipulationLedger)> {
    let s = inject_flying(state, &Qubit::one())?;
    let (s, ledger) = route_photon(&s, topology, Direction::ToCells)?;
    let s = deliver_to_cell(&s)?;
    let s = photon_storage_map(&s, topology, StoredPhoton::SelectPhoton)?;
    Ok((park_ancillas(&s, topology)?, ledger))
}

/// Runs one call on a state whose address register is already prepared and
/// whose cells are in play. The register holds the same address afterwards.
pub fn run_call(
    state: &SparseState,
    topology: &TreeTopology,
    payload: &Payload,
) -> Result<CallOutcome> {
    let (s, mut ledger) = dispatch_address(state, topology)?;
    let (s, select_ledger) = select_cell(&s, topology)?;
    ledger.absorb(&select_ledger);

    let (s, trace) = match payload {
        Payload::Read => {
            let (s, trace) = read_protocol(&s, topology)?;
            let s = emit_from_cell(&s, topology)?;
            let (s, back) = route_photon(&s, topology, Direction::ToRegister)?;
            ledger.absorb(&back);
            (s, trace)
        }
        Payload::Write(data) => {
            let mut down = None;
            let (s, trace) = write_protocol_with(&s, topology, |s| {
                let s = inject_flying(s, data)?;
                let (s, l) = route_photon(&s, topology, Direction::ToCells)?;
                down = Some(l);
                deliver_to_cell(&s)
            })?;
            if let Some(l) = down {
                ledger.absorb(&l);
            }
            // The absorbed data photon leaves an empty flying mode behind.
            let s = s.apply_label_map(|label| {
                let mut image = label.clone();
                if image.photon == PhotonSite::Absorbed {
                    image.photon = PhotonSite::AtRegister;
                }
                Ok((image, crate::qstate::Amplitude::new(1.0, 0.0)))
            })?;
            (s, trace)
        }
    };

    let s = unload_address(&s, topology)?;
    Ok(CallOutcome {
        state: s,
        ledger,
        trace,
    })
}

/// Fresh machine of depth `depth` with cell `i` holding `contents[i]`, then
/// one call at `address`.
pub fn memory_call(
    depth: usize,
    address: &AddressSuperposition,
    contents: &[Qubit],
    payload: &Payload,
) -> Result<CallOutcome> {
    let topology = TreeTopology::new(depth)?;
    let s = preload_cells(&init_tree(depth)?, &topology, contents)?;
    let s = prepare_address(&s, address)?;
    run_call(&s, &topology, payload)
}

/// Ideal result of a read call, built term by term:
/// `sum_i a_i |x_i>_addr |q_{x_i}>_data` with cell `x_i` emptied to `g` and
/// every other cell still holding its content.
pub fn read_target_state(
    topology: &TreeTopology,
    address: &AddressSuperposition,
    contents: &[Qubit],
) -> Result<SparseState> {
    if contents.len() != topology.cell_count() {
        return Err(QramError::config("one content per cell is required"));
    }
    let depth = topology.depth();
    let mut terms = Vec::new();
    for &(x, a) in address.terms() {
        let x = x as usize;
        // Cartesian product over the untouched cells' memory bits.
        let others: Vec<usize> = (0..contents.len()).filter(|&j| j != x).collect();
        for pattern in 0u64..(1u64 << others.len()) {
            let mut amp = a;
            let mut cells = vec![CellLabel::resting(0); contents.len()];
            for (k, &j) in others.iter().enumerate() {
                let bit = ((pattern >> k) & 1) as u8;
                amp *= contents[j].amp(bit);
                cells[j] = CellLabel::resting(bit);
            }
            for bit in 0..2u8 {
                let term = amp * contents[x].amp(bit);
                if term.norm() == 0.0 {
                    continue;
                }
                terms.push((
                    BranchLabel {
                        nodes: vec![NodeOrientation::Left; topology.node_count()],
                        address: AddressRegister::new(x as u64, depth),
                        photon: PhotonSite::AtRegister,
                        data: bit,
                        cells: cells.clone(),
                    },
                    term,
                ));
            }
        }
    }
    SparseState::from_terms(terms)
}
