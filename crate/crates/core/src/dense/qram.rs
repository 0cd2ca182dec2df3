use super::{check_depth, dispatch_level, leaf, DenseState};
use crate::cell::AtomLevel;
use crate::error::{QramError, Result};
use crate::qstate::{PhotonSite, Qubit, SparseState};
use crate::routing::{AddressSuperposition, NodeOrientation};

/// Whole-machine oracle at the logical level.
///
/// Digits: routers (heap order), address bits (level order), data qubit,
/// one qubit per memory cell (`g` = 0, `s` = 1), one emission qubit. A read
/// swaps the data qubit with the selected memory; a write first swaps the
/// selected memory into the emission qubit (the reset) and then swaps the
/// data qubit in.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseQram {
    depth: usize,
    state: DenseState,
}

impl DenseQram {
    /// Register holding `address`, routers `Left`, memories holding
    /// `contents`, data qubit holding `data`.
    pub fn new(
        depth: usize,
        address: &AddressSuperposition,
        contents: &[Qubit],
        data: &Qubit,
    ) -> Result<Self> {
        check_depth(depth)?;
        let (k, cells) = ((1 << depth) - 1, 1usize << depth);
        if contents.len() != cells || address.width() != depth {
            return Err(QramError::config("contents or address do not fit the tree"));
        }
        let dims = vec![2; k + depth + 1 + cells + 1];
        let mut state = DenseState::zeros(dims);
        for &(x, ax) in address.terms() {
            for pattern in 0..(1usize << cells) {
                for d in 0..2usize {
                    let mut amp = ax * data.amp(d as u8);
                    let mut digits = vec![0; k];
                    digits.extend((0..depth).map(|l| ((x >> (depth - 1 - l)) & 1) as usize));
                    digits.push(d);
                    for (c, content) in contents.iter().enumerate() {
                        let bit = (pattern >> c) & 1;
                        amp *= content.amp(bit as u8);
                        digits.push(bit);
                    }
                    digits.push(0);
                    state.add(&digits, amp);
                }
            }
        }
        Ok(Self { depth, state })
    }

    pub fn state(&self) -> &DenseState {
        &self.state
    }

    fn k(&self) -> usize {
        (1 << self.depth) - 1
    }

    fn data_digit(&self) -> usize {
        self.k() + self.depth
    }

    fn apply_levels(&mut self, levels: impl Iterator<Item = usize>) -> Result<()> {
        let k = self.k();
        for level in levels {
            self.state = self.state.permute("dispatch", |d| {
                let (nodes, rest) = d.split_at_mut(k);
                dispatch_level(nodes, rest, level);
                Ok(())
            })?;
        }
        Ok(())
    }

    pub fn dispatch(&mut self) -> Result<()> {
        self.apply_levels(0..self.depth)
    }

    pub fn unload(&mut self) -> Result<()> {
        self.apply_levels((0..self.depth).rev())
    }

    pub fn read(&mut self) -> Result<()> {
        let (k, n, data) = (self.k(), self.depth, self.data_digit());
        self.state = self.state.permute("read", |d| {
            let mem = data + 1 + leaf(&d[..k], n);
            d.swap(data, mem);
            Ok(())
        })?;
        Ok(())
    }

    pub fn write(&mut self) -> Result<()> {
        let (k, n, data) = (self.k(), self.depth, self.data_digit());
        let env = data + 1 + (1 << n);
        self.state = self.state.permute("write", |d| {
            let mem = data + 1 + leaf(&d[..k], n);
            d.swap(env, mem);
            d.swap(mem, data);
            Ok(())
        })?;
        Ok(())
    }

    /// Full read call: dispatch, read, unload.
    pub fn read_call(&mut self) -> Result<()> {
        self.dispatch()?;
        self.read()?;
        self.unload()
    }

    /// Full write call; the data qubit was set at construction.
    pub fn write_call(&mut self) -> Result<()> {
        self.dispatch()?;
        self.write()?;
        self.unload()
    }

    /// Dense image of a sparse state between calls. Every cell must be idle
    /// with its memory in `g` or `s`, and at most one emission recorded.
    pub fn project(&self, sparse: &SparseState) -> Result<DenseState> {
        let (k, n) = (self.k(), self.depth);
        let mut out = DenseState::zeros(self.state.dims().to_vec());
        for (label, amp) in sparse.iter() {
            if label.nodes.len() != k || label.cells.len() != 1 << n {
                return Err(QramError::config("sparse label outside the machine space"));
            }
            if !matches!(label.photon, PhotonSite::AtRegister | PhotonSite::Absorbed) {
                return Err(QramError::config(format!(
                    "photon in flight at {}",
                    label.photon
                )));
            }
            let mut digits: Vec<usize> = label
                .nodes
                .iter()
                .map(|o| (*o == NodeOrientation::Right) as usize)
                .collect();
            digits.extend((0..n).map(|level| label.address.bit(level) as usize));
            digits.push(label.data as usize);
            let mut emissions = 0;
            for cell in &label.cells {
                if cell.ancilla != AtomLevel::G || cell.mode != 0 || cell.photon != 0 {
                    return Err(QramError::config(format!("cell {cell} is not idle")));
                }
                digits.push(match cell.memory {
                    AtomLevel::G => 0,
                    AtomLevel::S => 1,
                    other => {
                        return Err(QramError::config(format!("memory left in {other}")));
                    }
                });
                emissions += cell.emissions.count_ones();
            }
            if emissions > 1 {
                return Err(QramError::config("more than one emission recorded"));
            }
            digits.push(emissions as usize);
            out.add(&digits, *amp);
        }
        Ok(out)
    }

    /// Outcome probabilities of the data qubit.
    pub fn data_marginal(&self) -> [f64; 2] {
        let data = self.data_digit();
        let mut p = [0.0; 2];
        for (i, a) in self.state.amplitudes().iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                p[self.state.decode(i)[data]] += a.norm_sqr();
            }
        }
        p
    }
}
