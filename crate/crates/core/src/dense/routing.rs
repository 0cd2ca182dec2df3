use super::{check_depth, dispatch_level, leaf, DenseState};
use crate::error::{QramError, Result};
use crate::qstate::{Amplitude, PhotonSite, Qubit, SparseState};
use crate::routing::{AddressSuperposition, NodeOrientation};

/// Routers, address register, photon position and flying-mode occupation.
///
/// Digit layout: one binary digit per router (heap order), one per address
/// bit (level order), the photon site, the flying-mode occupation. Sites are
/// `0` register, `1..=K` router `i-1`, `K+1..=K+N` cell, `K+N+1` absorbed.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseRouting {
    depth: usize,
    state: DenseState,
}

impl DenseRouting {
    pub fn new(depth: usize) -> Result<Self> {
        check_depth(depth)?;
        let k = (1 << depth) - 1;
        let sites = 1 + k + (1 << depth) + 1;
        let mut dims = vec![2; k + depth];
        dims.push(sites);
        dims.push(2);
        let mut state = DenseState::zeros(dims);
        let origin = vec![0; k + depth + 2];
        state.add(&origin, Amplitude::new(1.0, 0.0));
        Ok(Self { depth, state })
    }

    pub fn state(&self) -> &DenseState {
        &self.state
    }

    fn k(&self) -> usize {
        (1 << self.depth) - 1
    }

    fn site_digit(&self) -> usize {
        self.k() + self.depth
    }

    /// Writes the address into the empty register.
    pub fn prepare(&mut self, address: &AddressSuperposition) -> Result<()> {
        let (k, n) = (self.k(), self.depth);
        self.state = self.state.map("prepare", |d| {
            if d[k..k + n].iter().any(|&b| b != 0) {
                return Err(QramError::protocol("dense prepare", "register not empty"));
            }
            Ok(address
                .terms()
                .iter()
                .map(|&(x, amp)| {
                    let mut image = d.clone();
                    for level in 0..n {
                        image[k + level] = ((x >> (n - 1 - level)) & 1) as usize;
                    }
                    (image, amp)
                })
                .collect())
        })?;
        Ok(())
    }

    pub fn dispatch(&mut self) -> Result<()> {
        for level in 0..self.depth {
            self.apply_level(level)?;
        }
        Ok(())
    }

    /// Inverse of [`dispatch`](Self::dispatch): the same involutions, deepest first.
    pub fn unload(&mut self) -> Result<()> {
        for level in (0..self.depth).rev() {
            self.apply_level(level)?;
        }
        Ok(())
    }

    fn apply_level(&mut self, level: usize) -> Result<()> {
        let k = self.k();
        self.state = self.state.permute("dispatch", |d| {
            let (nodes, rest) = d.split_at_mut(k);
            dispatch_level(nodes, rest, level);
            Ok(())
        })?;
        Ok(())
    }

    /// Sets the flying mode at the register to `qubit`.
    pub fn inject(&mut self, qubit: &Qubit) -> Result<()> {
        let site = self.site_digit();
        self.state = self.state.map("inject", |d| {
            if d[site] != 0 || d[site + 1] != 0 {
                return Err(QramError::protocol("dense inject", "flying mode busy"));
            }
            Ok([0usize, 1]
                .into_iter()
                .map(|b| {
                    let mut image = d.clone();
                    image[site + 1] = b;
                    (image, qubit.amp(b as u8))
                })
                .collect())
        })?;
        Ok(())
    }

    /// Exchanges "photon at the register" with "photon at the cell the
    /// routers select"; the same involution serves both directions.
    pub fn route(&mut self) -> Result<()> {
        let (k, n, site) = (self.k(), self.depth, self.site_digit());
        self.state = self.state.permute("route", |d| {
            let cell_site = 1 + k + leaf(&d[..k], n);
            if d[site] == 0 {
                d[site] = cell_site;
            } else if d[site] == cell_site {
                d[site] = 0;
            }
            Ok(())
        })?;
        Ok(())
    }

    /// Dense image of a cell-free sparse routing state.
    pub fn project(&self, sparse: &SparseState) -> Result<DenseState> {
        let (k, n) = (self.k(), self.depth);
        let mut out = DenseState::zeros(self.state.dims().to_vec());
        for (label, amp) in sparse.iter() {
            if !label.cells.is_empty() || label.nodes.len() != k || label.address.width() != n {
                return Err(QramError::config("sparse label outside the routing space"));
            }
            let mut digits: Vec<usize> = label
                .nodes
                .iter()
                .map(|o| (*o == NodeOrientation::Right) as usize)
                .collect();
            digits.extend((0..n).map(|level| label.address.bit(level) as usize));
            digits.push(match label.photon {
                PhotonSite::AtRegister => 0,
                PhotonSite::AtNode(i) => 1 + i,
                PhotonSite::AtCell(c) => 1 + k + c,
                PhotonSite::Absorbed => 1 + k + (1 << n),
            });
            digits.push(label.data as usize);
            out.add(&digits, *amp);
        }
        Ok(out)
    }
}
