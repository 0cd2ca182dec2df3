use super::DenseState;
use crate::cell::{AtomLevel, CellLabel};
use crate::error::{QramError, Result};
use crate::qstate::{PhotonSite, Qubit, SparseState};

// Per-cell digits: memory (g s r r'), ancilla (g s r r' t), normal mode,
// cavity mode, emission bit. Cell 0 is the selected one.
const MEM: usize = 0;
const ANC: usize = 1;
const MODE: usize = 2;
const CAV: usize = 3;
const EMIT: usize = 4;
const PER_CELL: usize = 5;
const CELL_DIMS: [usize; PER_CELL] = [4, 5, 2, 2, 2];

const G: usize = 0;
const S: usize = 1;
const R: usize = 2;
const RP: usize = 3;
const T: usize = 4;

#[derive(Clone, Copy)]
enum When {
    Always,
    PartnerExcited,
    PartnerNotExcited,
}

#[derive(Clone, Copy)]
enum Op {
    /// `(atom digit, from, to, mode change, condition)` on both cells.
    Pulse(usize, usize, usize, i32, When),
    Decay,
    Inject,
    Store,
    Retrieve,
    Release,
}

use Op::*;
use When::*;

const WRITE_STEPS: [&[Op]; 8] = [
    &[
        Pulse(ANC, S, R, 0, Always),
        Pulse(MEM, S, R, 0, PartnerExcited),
        Decay,
        Pulse(ANC, R, G, 0, Always),
    ],
    &[Inject, Store],
    &[Pulse(MEM, G, R, 0, Always)],
    &[
        Pulse(ANC, G, R, 0, PartnerExcited),
        Pulse(ANC, S, R, 1, PartnerExcited),
    ],
    &[Pulse(MEM, R, G, 0, PartnerNotExcited)],
    &[Pulse(MEM, R, RP, -1, PartnerExcited)],
    &[
        Pulse(MEM, RP, S, 0, PartnerExcited),
        Pulse(MEM, R, G, 0, PartnerExcited),
    ],
    &[Pulse(ANC, R, G, 0, Always), Release],
];

const READ_STEPS: [&[Op]; 7] = [
    &[Pulse(ANC, S, R, 0, Always)],
    &[
        Pulse(MEM, G, R, 0, PartnerExcited),
        Pulse(MEM, S, R, 1, PartnerExcited),
    ],
    &[Pulse(ANC, R, RP, -1, PartnerExcited)],
    &[Pulse(MEM, R, G, 0, PartnerExcited)],
    &[Pulse(ANC, R, G, 0, Always), Pulse(ANC, RP, S, 0, Always)],
    &[Retrieve],
    &[Release],
];

/// Two full memory cells driven through the write and read sequences, with
/// cell 0 selected and cell 1 parked.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseCellPair {
    state: DenseState,
}

impl DenseCellPair {
    /// Memories preloaded with `selected` and `other`, right after the
    /// selection photon was stored in cell 0 and the other ancilla parked.
    pub fn selected(selected: &Qubit, other: &Qubit) -> Result<Self> {
        let dims: Vec<usize> = CELL_DIMS.iter().chain(CELL_DIMS.iter()).copied().collect();
        let mut state = DenseState::zeros(dims);
        for a in 0..2usize {
            for b in 0..2usize {
                let mut digits = vec![0; 2 * PER_CELL];
                digits[MEM] = a;
                digits[CAV] = 1;
                digits[PER_CELL + MEM] = b;
                state.add(&digits, selected.amp(a as u8) * other.amp(b as u8));
            }
        }
        let mut pair = Self { state };
        pair.run(&[Store, Pulse(ANC, G, T, 0, Always)], None)?;
        Ok(pair)
    }

    pub fn state(&self) -> &DenseState {
        &self.state
    }

    /// State after each write step.
    pub fn write_steps(&mut self, data: &Qubit) -> Result<Vec<DenseState>> {
        let mut out = Vec::new();
        for ops in WRITE_STEPS {
            self.run(ops, Some(data))?;
            out.push(self.state.clone());
        }
        Ok(out)
    }

    /// State after each read step.
    pub fn read_steps(&mut self) -> Result<Vec<DenseState>> {
        let mut out = Vec::new();
        for ops in READ_STEPS {
            self.run(ops, None)?;
            out.push(self.state.clone());
        }
        Ok(out)
    }

    fn run(&mut self, ops: &[Op], data: Option<&Qubit>) -> Result<()> {
        for op in ops {
            self.state = match *op {
                Pulse(atom, from, to, dm, when) => self.state.permute("pulse", |d| {
                    for cell in 0..2 {
                        pulse_cell(
                            &mut d[cell * PER_CELL..(cell + 1) * PER_CELL],
                            atom,
                            from,
                            to,
                            dm,
                            when,
                        )?;
                    }
                    Ok(())
                })?,
                Decay => self.state.permute("decay", |d| {
                    match (d[MEM], d[EMIT]) {
                        (R, 0) => {
                            d[MEM] = G;
                            d[EMIT] = 1;
                        }
                        (G, 0) => {}
                        _ => {
                            return Err(QramError::protocol(
                                "dense decay",
                                "unexpected memory level",
                            ))
                        }
                    }
                    Ok(())
                })?,
                Inject => {
                    let q = data.ok_or_else(|| QramError::config("no data photon given"))?;
                    self.state.map("inject", |d| {
                        if d[CAV] != 0 {
                            return Err(QramError::protocol("dense inject", "cavity busy"));
                        }
                        Ok((0..2)
                            .map(|b| {
                                let mut image = d.clone();
                                image[CAV] = b;
                                (image, q.amp(b as u8))
                            })
                            .collect())
                    })?
                }
                Store | Retrieve => self.state.permute("storage", |d| {
                    match (d[CAV], d[ANC]) {
                        (1, G) => {
                            d[CAV] = 0;
                            d[ANC] = S;
                        }
                        (0, S) => {
                            d[CAV] = 1;
                            d[ANC] = G;
                        }
                        _ => {}
                    }
                    Ok(())
                })?,
                Release => self.state.permute("release", |d| {
                    for cell in 0..2 {
                        if d[cell * PER_CELL + ANC] == T {
                            d[cell * PER_CELL + ANC] = G;
                        }
                    }
                    Ok(())
                })?,
            };
        }
        Ok(())
    }

    /// Dense image of a sparse two-cell state (depth-1 tree, cell 0 selected).
    pub fn project(sparse: &SparseState) -> Result<DenseState> {
        let dims: Vec<usize> = CELL_DIMS.iter().chain(CELL_DIMS.iter()).copied().collect();
        let mut out = DenseState::zeros(dims);
        for (label, amp) in sparse.iter() {
            if label.cells.len() != 2 || label.photon != PhotonSite::Absorbed || label.data != 0 {
                return Err(QramError::config(
                    "sparse label outside the cell-pair space",
                ));
            }
            let mut digits = Vec::with_capacity(2 * PER_CELL);
            for cell in &label.cells {
                digits.extend(cell_digits(cell)?);
            }
            out.add(&digits, *amp);
        }
        Ok(out)
    }
}

fn cell_digits(cell: &CellLabel) -> Result<[usize; PER_CELL]> {
    let level = |l: AtomLevel| match l {
        AtomLevel::G => G,
        AtomLevel::S => S,
        AtomLevel::R => R,
        AtomLevel::RPrime => RP,
        AtomLevel::T => T,
    };
    if cell.memory == AtomLevel::T || cell.emissions > 1 {
        return Err(QramError::config(format!(
            "cell {cell} outside the cell-pair space"
        )));
    }
    Ok([
        level(cell.memory),
        level(cell.ancilla),
        cell.mode as usize,
        cell.photon as usize,
        cell.emissions as usize,
    ])
}

fn pulse_cell(
    c: &mut [usize],
    atom: usize,
    from: usize,
    to: usize,
    dm: i32,
    when: When,
) -> Result<()> {
    let partner_excited = matches!(c[1 - atom], R | RP);
    let active = match when {
        Always => true,
        PartnerExcited => partner_excited,
        PartnerNotExcited => !partner_excited,
    };
    if !active {
        return Ok(());
    }
    let mode = c[MODE] as i32;
    let (level, new_mode) = if c[atom] == from {
        (to, mode + dm)
    } else if c[atom] == to {
        (from, mode - dm)
    } else {
        return Ok(());
    };
    match new_mode {
        0 | 1 => {
            c[atom] = level;
            c[MODE] = new_mode as usize;
            Ok(())
        }
        -1 => Ok(()),
        _ => Err(QramError::protocol("dense pulse", "normal mode overflow")),
    }
}
