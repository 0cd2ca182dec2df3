//! Brute-force state vectors used to cross-check the sparse engine.
//!
//! Nothing here goes through [`SparseState`](crate::qstate::SparseState)
//! maps: each oracle keeps a full mixed-radix amplitude vector and applies
//! its own digit-level rules. Three spaces are covered, each small enough to
//! enumerate at depth 3:
//!
//! * [`DenseRouting`]: routers, address register, photon position, flying mode.
//! * [`DenseQram`]: routers, address register, data qubit, one logical qubit
//!   per memory cell, one emission qubit. Read and write act as swaps.
//! * [`DenseCellPair`]: two full memory cells (every atomic level, normal
//!   mode, cavity mode, emission record) driven by the pulse sequences.

mod cell_pair;
mod qram;
mod routing;

pub use cell_pair::DenseCellPair;
pub use qram::DenseQram;
pub use routing::DenseRouting;

use crate::error::{QramError, Result};
use crate::qstate::Amplitude;
use crate::routing::MAX_DENSE_DEPTH;

/// Amplitude vector over a product of finite digits, first digit most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    dims: Vec<usize>,
    amps: Vec<Amplitude>,
}

impl DenseState {
    pub fn zeros(dims: Vec<usize>) -> Self {
        let size = dims.iter().product();
        Self {
            dims,
            amps: vec![Amplitude::new(0.0, 0.0); size],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        digits.iter().zip(&self.dims).fold(0, |acc, (&d, &dim)| {
            debug_assert!(d < dim);
            acc * dim + d
        })
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        for (slot, &dim) in digits.iter_mut().zip(&self.dims).rev() {
            *slot = index % dim;
            index /= dim;
        }
        digits
    }

    pub fn get(&self, digits: &[usize]) -> Amplitude {
        self.amps[self.encode(digits)]
    }

    /// Adds `amp` at `digits`.
    pub fn add(&mut self, digits: &[usize], amp: Amplitude) {
        let i = self.encode(digits);
        self.amps[i] += amp;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a linear map given by its action on populated basis states.
    /// Images of different basis states must not overlap.
    pub fn map<F>(&self, step: &str, mut f: F) -> Result<Self>
    where
        F: FnMut(&mut Vec<usize>) -> Result<Vec<(Vec<usize>, Amplitude)>>,
    {
        let mut out = Self::zeros(self.dims.clone());
        let mut written = vec![false; self.amps.len()];
        for (index, amp) in self.amps.iter().enumerate() {
            if *amp == Amplitude::new(0.0, 0.0) {
                continue;
            }
            let mut digits = self.decode(index);
            for (image, factor) in f(&mut digits)? {
                let j = out.encode(&image);
                if written[j] {
                    return Err(QramError::protocol(
                        format!("dense {step}"),
                        format!("two basis states map onto {image:?}"),
                    ));
                }
                written[j] = true;
                out.amps[j] = amp * factor;
            }
        }
        Ok(out)
    }

    /// Basis permutation; `f` rewrites the digits in place.
    pub fn permute<F>(&self, step: &str, mut f: F) -> Result<Self>
    where
        F: FnMut(&mut Vec<usize>) -> Result<()>,
    {
        self.map(step, |digits| {
            f(digits)?;
            Ok(vec![(digits.clone(), Amplitude::new(1.0, 0.0))])
        })
    }

    /// Largest difference in amplitude modulus over all basis states.
    pub fn max_modulus_deviation(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(QramError::config("dense states live in different spaces"));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0, f64::max))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(QramError::config("dense states live in different spaces"));
        }
        let inner: Amplitude = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr())
    }
}

fn check_depth(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_DEPTH {
        return Err(QramError::config(format!(
            "dense oracles handle depth 1..={MAX_DENSE_DEPTH}, got {n}"
        )));
    }
    Ok(())
}

/// Heap index of the router reached at `level` when every router above is
/// followed: children of `i` are `2i+1` (left) and `2i+2` (right).
fn reached(nodes: &[usize], level: usize) -> usize {
    let mut i = 0;
    for _ in 0..level {
        i = 2 * i + 1 + nodes[i];
    }
    i
}

/// Leaf cell reached through `depth` levels.
fn leaf(nodes: &[usize], depth: usize) -> usize {
    reached(nodes, depth) + 1 - (1 << depth)
}

/// One dispatch pulse at `level`: `|1>|L> <-> |0>|R>` on the reached router.
fn dispatch_level(nodes: &mut [usize], addr: &mut [usize], level: usize) {
    let k = reached(nodes, level);
    match (addr[level], nodes[k]) {
        (1, 0) => {
            addr[level] = 0;
            nodes[k] = 1;
        }
        (0, 1) => {
            addr[level] = 1;
            nodes[k] = 0;
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip() {
        let s = DenseState::zeros(vec![2, 3, 5]);
        for i in 0..30 {
            assert_eq!(s.encode(&s.decode(i)), i);
        }
        assert_eq!(s.encode(&[1, 0, 0]), 15);
    }

    #[test]
    fn heap_walk() {
        // Depth 3, address 001: root L, (1,0) L, (2,0) R.
        let mut nodes = vec![0; 7];
        nodes[3] = 1;
        assert_eq!(leaf(&nodes, 3), 1);
        nodes[0] = 1;
        assert_eq!(reached(&nodes, 1), 2);
    }

    #[test]
    fn overlapping_images_rejected() {
        let mut s = DenseState::zeros(vec![2]);
        s.add(&[0], Amplitude::new(0.6, 0.0));
        s.add(&[1], Amplitude::new(0.8, 0.0));
        assert!(s
            .permute("test", |d| {
                d[0] = 0;
                Ok(())
            })
            .is_err());
    }
}
