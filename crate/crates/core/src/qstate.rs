//! Sparse labeled-basis quantum states.
//!
//! Every operation the QRAM performs is a permutation of classical machine
//! configurations with a unit-modulus phase, so a pure state is stored as a
//! map from [`BranchLabel`] (or any other ordered label) to its amplitude.
//! States are values: every operation returns a new state.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cell::CellLabel;
use crate::error::{QramError, Result};
use crate::routing::NodeOrientation;

pub type Amplitude = Complex64;

/// Terms whose modulus falls below this are dropped.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Allowed deviation of the squared norm from one.
pub const NORM_TOL: f64 = 1e-10;

/// Anything usable as a basis label.
pub trait Label: Clone + Ord + fmt::Display {}

impl<T: Clone + Ord + fmt::Display> Label for T {}

/// Location of the flying photon mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhotonSite {
    AtRegister,
    AtNode(usize),
    AtCell(usize),
    /// Handed over to (or waiting to be emitted by) a memory cell.
    Absorbed,
}

impl fmt::Display for PhotonSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhotonSite::AtRegister => write!(f, "reg"),
            PhotonSite::AtNode(i) => write!(f, "node:{i}"),
            PhotonSite::AtCell(i) => write!(f, "cell:{i}"),
            PhotonSite::Absorbed => write!(f, "absorbed"),
        }
    }
}

/// Address register contents, MSB-first: bit `j` selects the branch at level `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AddressRegister {
    bits: u64,
    width: u8,
}

impl AddressRegister {
    pub fn zero(width: usize) -> Self {
        Self::new(0, width)
    }

    pub fn new(bits: u64, width: usize) -> Self {
        assert!(
            (1..=63).contains(&width),
            "address width {width} out of range"
        );
        assert!(
            bits >> width == 0,
            "address {bits:#b} wider than {width} bits"
        );
        Self {
            bits,
            width: width as u8,
        }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Bit consumed at tree level `level` (level 0 is the most significant bit).
    pub fn bit(&self, level: usize) -> bool {
        (self.bits >> (self.width as usize - 1 - level)) & 1 == 1
    }

    pub fn with_bit(&self, level: usize, value: bool) -> Self {
        let mask = 1u64 << (self.width as usize - 1 - level);
        let bits = if value {
            self.bits | mask
        } else {
            self.bits & !mask
        };
        Self { bits, ..*self }
    }
}

impl fmt::Display for AddressRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_address(self.bits, self.width as usize))
    }
}

/// Renders `bits` as an MSB-first binary string of length `width`.
pub fn render_address(bits: u64, width: usize) -> String {
    (0..width)
        .map(|j| {
            if (bits >> (width - 1 - j)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// One classical configuration of the whole machine.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchLabel {
    /// Node orientations in level-major order: node `(l, k)` sits at `2^l - 1 + k`.
    pub nodes: Vec<NodeOrientation>,
    pub address: AddressRegister,
    pub photon: PhotonSite,
    /// Fock occupation of the flying mode (the data-register qubit).
    pub data: u8,
    /// One entry per memory cell in play; empty for routing-only runs.
    pub cells: Vec<CellLabel>,
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(nodes=")?;
        for node in &self.nodes {
            write!(f, "{node}")?;
        }
        write!(
            f,
            ",addr={},photon={},data={},cells=[",
            self.address, self.photon, self.data
        )?;
        for (i, cell) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{cell}")?;
        }
        write!(f, "])")
    }
}

/// A single-qubit state `alpha|0> + beta|1>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Qubit {
    pub alpha: Amplitude,
    pub beta: Amplitude,
}

impl Qubit {
    pub fn new(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        let q = Self { alpha, beta };
        let norm_sqr = q.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(QramError::NotNormalized { norm_sqr });
        }
        Ok(q)
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(alpha: Amplitude, beta: Amplitude) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(QramError::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    pub fn zero() -> Self {
        Self {
            alpha: Amplitude::new(1.0, 0.0),
            beta: Amplitude::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Self {
            alpha: Amplitude::new(0.0, 0.0),
            beta: Amplitude::new(1.0, 0.0),
        }
    }

    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        Self {
            alpha: Amplitude::new((theta / 2.0).cos(), 0.0),
            beta: Amplitude::from_polar((theta / 2.0).sin(), phi),
        }
    }

    /// Haar-random qubit.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        Self::from_bloch(theta, phi)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// Amplitude of the basis value `bit`.
    pub fn amp(&self, bit: u8) -> Amplitude {
        if bit == 0 {
            self.alpha
        } else {
            self.beta
        }
    }

    /// `(bit, amplitude)` pairs with non-negligible amplitude.
    pub fn components(&self) -> impl Iterator<Item = (u8, Amplitude)> {
        [(0u8, self.alpha), (1u8, self.beta)]
            .into_iter()
            .filter(|(_, a)| a.norm() >= DEFAULT_TOL)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Qubit) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta).norm_sqr()
    }
}

/// Outcome of [`SparseState::sample_measurement`].
#[derive(Clone, Debug)]
pub struct Measurement<K, L: Label> {
    pub outcome: K,
    pub probability: f64,
    pub state: SparseState<L>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseState<L: Label = BranchLabel> {
    terms: BTreeMap<L, Amplitude>,
    tol: f64,
}

impl<L: Label> SparseState<L> {
    pub fn basis(label: L) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(label, Amplitude::new(1.0, 0.0));
        Self {
            terms,
            tol: DEFAULT_TOL,
        }
    }

    /// Builds a state from explicit terms. Repeated labels are summed; the
    /// result is not renormalized.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, Amplitude)>,
    {
        Self::from_terms_with_tol(terms, DEFAULT_TOL)
    }

    pub fn from_terms_with_tol<I>(terms: I, tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (L, Amplitude)>,
    {
        let mut map: BTreeMap<L, Amplitude> = BTreeMap::new();
        for (label, amp) in terms {
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(QramError::NonFinite {
                    label: label.to_string(),
                });
            }
            *map.entry(label).or_insert(Amplitude::new(0.0, 0.0)) += amp;
        }
        map.retain(|_, a| a.norm() >= tol);
        Ok(Self { terms: map, tol })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, &Amplitude)> {
        self.terms.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &L> {
        self.terms.keys()
    }

    pub fn amplitude(&self, label: &L) -> Amplitude {
        self.terms
            .get(label)
            .copied()
            .unwrap_or(Amplitude::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn check_normalized(&self) -> Result<()> {
        if self.is_empty() {
            return Err(QramError::EmptySupport);
        }
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(QramError::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<Self> {
        if self.is_empty() {
            return Err(QramError::EmptySupport);
        }
        let norm = self.norm_sqr().sqrt();
        Self::from_terms_with_tol(
            self.terms.iter().map(|(l, a)| (l.clone(), a / norm)),
            self.tol,
        )
    }

    /// Relabels every term through `map`, multiplying by the returned phase.
    ///
    /// `map` must be injective on the support and every factor must have unit
    /// modulus; violations are reported rather than silently merged.
    pub fn apply_label_map<F>(&self, mut map: F) -> Result<Self>
    where
        F: FnMut(&L) -> Result<(L, Amplitude)>,
    {
        let mut out = BTreeMap::new();
        for (label, amp) in &self.terms {
            let (image, factor) = map(label)?;
            if (factor.norm() - 1.0).abs() > 1e-12 {
                return Err(QramError::UnitarityViolation {
                    factor: factor.to_string(),
                });
            }
            if out.contains_key(&image) {
                return Err(QramError::Collision {
                    label: image.to_string(),
                });
            }
            out.insert(image, amp * factor);
        }
        Ok(Self {
            terms: out,
            tol: self.tol,
        })
    }

    /// Applies an isometry that sends each support label to a normalized
    /// combination of fresh labels, e.g. attaching a newly prepared qubit.
    /// Images of distinct labels must not overlap.
    pub fn apply_branching_map<F>(&self, mut map: F) -> Result<Self>
    where
        F: FnMut(&L) -> Result<Vec<(L, Amplitude)>>,
    {
        let mut out: BTreeMap<L, Amplitude> = BTreeMap::new();
        for (label, amp) in &self.terms {
            let images = map(label)?;
            let weight: f64 = images.iter().map(|(_, c)| c.norm_sqr()).sum();
            if (weight - 1.0).abs() > NORM_TOL {
                return Err(QramError::UnitarityViolation {
                    factor: format!("branch weight {weight}"),
                });
            }
            for (image, c) in images {
                if c.norm() < self.tol {
                    continue;
                }
                if out.contains_key(&image) {
                    return Err(QramError::Collision {
                        label: image.to_string(),
                    });
                }
                out.insert(image, amp * c);
            }
        }
        out.retain(|_, a| a.norm() >= self.tol);
        Ok(Self {
            terms: out,
            tol: self.tol,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Amplitude {
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Amplitude::new(0.0, 0.0);
        for (label, a) in &small.terms {
            if let Some(b) = large.terms.get(label) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        acc
    }

    /// `|<self|other>|^2` for normalized states.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        self.check_normalized()?;
        other.check_normalized()?;
        Ok(self.inner(other).norm_sqr().min(1.0))
    }

    /// Fidelity `<t|rho|t>` of the subsystem picked out by `split` against a
    /// pure target, tracing out the remainder returned by `split`.
    pub fn reduced_fidelity<K, R, F>(&self, split: F, target: &SparseState<K>) -> Result<f64>
    where
        K: Label,
        R: Ord,
        F: Fn(&L) -> (K, R),
    {
        self.check_normalized()?;
        target.check_normalized()?;
        let mut overlaps: BTreeMap<R, Amplitude> = BTreeMap::new();
        for (label, amp) in &self.terms {
            let (kept, rest) = split(label);
            let t = target.amplitude(&kept);
            if t.norm() == 0.0 {
                continue;
            }
            *overlaps.entry(rest).or_insert(Amplitude::new(0.0, 0.0)) += t.conj() * amp;
        }
        Ok(overlaps
            .values()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .min(1.0))
    }

    /// Born probabilities of the values of the register chosen by `selector`.
    pub fn marginal<K, F>(&self, selector: F) -> BTreeMap<K, f64>
    where
        K: Ord,
        F: Fn(&L) -> K,
    {
        let mut probs = BTreeMap::new();
        for (label, amp) in &self.terms {
            *probs.entry(selector(label)).or_insert(0.0) += amp.norm_sqr();
        }
        probs
    }

    /// Projectively measures the register picked out by `selector`.
    /// Deterministic for a given seed.
    pub fn sample_measurement<K, F>(&self, selector: F, seed: u64) -> Result<Measurement<K, L>>
    where
        K: Ord + Clone,
        F: Fn(&L) -> K,
    {
        self.check_normalized()?;
        let probs = self.marginal(&selector);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw: f64 = rng.random::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        let mut chosen = None;
        for (outcome, p) in &probs {
            acc += p;
            chosen = Some((outcome, *p));
            if draw < acc {
                break;
            }
        }
        let (outcome, probability) = chosen.ok_or(QramError::EmptySupport)?;
        let outcome = outcome.clone();
        let scale = probability.sqrt();
        let state = Self::from_terms_with_tol(
            self.terms
                .iter()
                .filter(|(l, _)| selector(l) == outcome)
                .map(|(l, a)| (l.clone(), a / scale)),
            self.tol,
        )?;
        Ok(Measurement {
            outcome,
            probability,
            state,
        })
    }

    /// Terms sorted by their rendered label.
    fn sorted_rendered(&self) -> Vec<(String, Amplitude)> {
        let mut rows: Vec<(String, Amplitude)> = self
            .terms
            .iter()
            .map(|(l, a)| (l.to_string(), *a))
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        rows
    }

    /// Line-oriented dump: `label<TAB>re<TAB>im` per term.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (label, amp) in self.sorted_rendered() {
            out.push_str(&format!(
                "{}\t{}\t{}\n",
                label,
                fmt_real(amp.re),
                fmt_real(amp.im)
            ));
        }
        out
    }

    /// Same fields as [`Self::dump`] on one line, tab separated.
    pub fn dump_inline(&self) -> String {
        self.sorted_rendered()
            .into_iter()
            .map(|(label, amp)| format!("{}\t{}\t{}", label, fmt_real(amp.re), fmt_real(amp.im)))
            .collect::<Vec<_>>()
            .join("\t")
    }
}

/// Fixed-precision rendering with negative zero folded away.
pub fn fmt_real(x: f64) -> String {
    if x.abs() < 5e-13 {
        "0.000000000000".to_string()
    } else {
        format!("{x:.12}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    fn plus(a: &str, b: &str) -> SparseState<String> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SparseState::from_terms([(a.to_string(), c(h)), (b.to_string(), c(h))]).unwrap()
    }

    #[test]
    fn identity_map_keeps_state() {
        let s = plus("A", "B");
        let t = s.apply_label_map(|l| Ok((l.clone(), c(1.0)))).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn swap_map_on_symmetric_state() {
        let s = plus("A", "B");
        let t = s
            .apply_label_map(|l| {
                let img = if l == "A" { "B" } else { "A" };
                Ok((img.to_string(), c(1.0)))
            })
            .unwrap();
        assert!((s.fidelity(&t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collision_is_reported() {
        let s = plus("A", "B");
        let err = s
            .apply_label_map(|_| Ok(("A".to_string(), c(1.0))))
            .unwrap_err();
        assert!(matches!(err, QramError::Collision { .. }));
    }

    #[test]
    fn non_unit_factor_is_reported() {
        let s = SparseState::basis("A".to_string());
        let err = s.apply_label_map(|l| Ok((l.clone(), c(0.5)))).unwrap_err();
        assert!(matches!(err, QramError::UnitarityViolation { .. }));
    }

    #[test]
    fn fidelity_examples() {
        let a = SparseState::basis("A".to_string());
        let b = SparseState::basis("B".to_string());
        assert_eq!(a.fidelity(&a).unwrap(), 1.0);
        assert_eq!(a.fidelity(&b).unwrap(), 0.0);
        // (1/sqrt2)^2
        assert!((plus("A", "B").fidelity(&a).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_rejects_unnormalized() {
        let a = SparseState::from_terms([("A".to_string(), c(2.0))]).unwrap();
        assert!(matches!(
            a.fidelity(&a),
            Err(QramError::NotNormalized { .. })
        ));
    }

    #[test]
    fn measurement_of_pure_branch_is_certain() {
        let s = SparseState::basis("001".to_string());
        let m = s.sample_measurement(|l| l.clone(), 7).unwrap();
        assert_eq!(m.outcome, "001");
        assert_eq!(m.probability, 1.0);
    }

    #[test]
    fn measurement_is_seed_deterministic() {
        let s = plus("0", "1");
        let a = s.sample_measurement(|l| l.clone(), 99).unwrap();
        let b = s.sample_measurement(|l| l.clone(), 99).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.state, b.state);
        assert!(a.state.is_normalized());
    }

    #[test]
    fn empty_state_cannot_be_measured() {
        let s: SparseState<String> = SparseState::from_terms([]).unwrap();
        assert!(s.sample_measurement(|l| l.clone(), 0).is_err());
    }

    #[test]
    fn pruning_drops_dust() {
        let s = SparseState::from_terms([("A".to_string(), c(1.0)), ("B".to_string(), c(1e-13))])
            .unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn reduced_fidelity_traces_out_partner() {
        // (|0,x> + |1,y>)/sqrt2: the first factor alone is maximally mixed.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SparseState::from_terms(
            [(("0", "x"), c(h)), (("1", "y"), c(h))].map(|((a, b), amp)| (format!("{a}{b}"), amp)),
        )
        .unwrap();
        let target = plus("0", "1");
        let f = s
            .reduced_fidelity(|l| (l[..1].to_string(), l[1..].to_string()), &target)
            .unwrap();
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dump_is_sorted_and_tab_separated() {
        let s = plus("B", "A");
        let dump = s.dump();
        let lines: Vec<_> = dump.lines().collect();
        assert_eq!(lines[0], "A\t0.707106781187\t0.000000000000");
        assert_eq!(lines[1], "B\t0.707106781187\t0.000000000000");
    }

    #[test]
    fn address_register_bits_are_msb_first() {
        let a = AddressRegister::new(0b001, 3);
        assert!(!a.bit(0));
        assert!(!a.bit(1));
        assert!(a.bit(2));
        assert_eq!(a.to_string(), "001");
        assert_eq!(a.with_bit(0, true).to_string(), "101");
    }
}
