//! Router error channels, Monte Carlo estimation of the per-call error
//! probability, and the first-order analytic figures.
//!
//! A Monte Carlo trial is one classical memory call at the routing level:
//! the address is dispatched with errors injected at counted events, a probe
//! photon is sent down and back, and the address is unloaded. The trial
//! fails if the photon reaches the wrong cell, any step hits an inconsistent
//! router configuration, or the final state differs from the initial one by
//! more than `1e-9` in fidelity.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QramError, Result};
use crate::qstate::{PhotonSite, Qubit};
use crate::routing::{
    dispatch_address_with, init_tree, inject_flying, prepare_address, route_photon, unload_address,
    AddressSuperposition, Direction, GlmTree, NodeOrientation, TreeTopology, MAX_SPARSE_DEPTH,
};

/// Fidelity shortfall above which a trial counts as failed.
pub const FIDELITY_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// Flip the router orientation.
    #[default]
    #[serde(alias = "bitflip")]
    BitFlip,
    /// Replace the orientation by a uniformly random one.
    Depolarizing,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::BitFlip => "bitflip",
            Channel::Depolarizing => "depolarizing",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Two-state routers; errors at node flips.
    Proposed,
    /// Three-state baseline; errors at every trit manipulation.
    Glm,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Proposed => "proposed",
            Scheme::Glm => "glm",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AddressDistribution {
    Uniform,
    Fixed(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub epsilon: f64,
    #[serde(default)]
    pub channel: Channel,
    #[serde(default)]
    pub seed: u64,
    /// Also charge `epsilon` at dispatch pulses that do not flip a router.
    #[serde(default)]
    pub charge_broadcasts: bool,
}

impl NoiseSpec {
    pub fn new(epsilon: f64, channel: Channel, seed: u64) -> Result<Self> {
        let spec = Self {
            epsilon,
            channel,
            seed,
            charge_broadcasts: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(QramError::config(format!(
                "epsilon {} outside [0, 1]",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Channel name as written to output tables.
    pub fn channel_label(&self) -> String {
        if self.charge_broadcasts {
            format!("{}+broadcast", self.channel)
        } else {
            self.channel.to_string()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub errors: u64,
    pub estimate: f64,
    /// Binomial standard error `sqrt(p(1-p)/T)` of the estimate.
    pub stderr: f64,
}

/// `n * epsilon / 2`: one flip per set address bit, half the bits set on average.
pub fn analytic_error(n: usize, epsilon: f64) -> Result<f64> {
    check_args(n, epsilon)?;
    Ok(n as f64 * epsilon / 2.0)
}

/// Baseline figures `(n * epsilon, n(n+5)/2 * epsilon)`: state flips only,
/// and every trit manipulation.
pub fn glm_analytic_error(n: usize, epsilon: f64) -> Result<(f64, f64)> {
    check_args(n, epsilon)?;
    let n = n as f64;
    Ok((n * epsilon, n * (n + 5.0) / 2.0 * epsilon))
}

/// Whether a first-order figure `mean_events * epsilon` is accurate to within
/// the binomial resolution of `trials` trials. The neglected second-order
/// term is about `(mean_events * epsilon)^2 / 2`.
pub fn first_order_valid(mean_events: f64, epsilon: f64, trials: u64) -> bool {
    let a = mean_events * epsilon;
    if a >= 1.0 {
        return false;
    }
    a * a / 2.0 <= (a * (1.0 - a) / trials as f64).sqrt()
}

fn check_args(n: usize, epsilon: f64) -> Result<()> {
    if n == 0 {
        return Err(QramError::config("depth must be at least 1"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(QramError::config(format!(
            "epsilon {epsilon} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Random stream for trial `index`. Independent of how trials are scheduled.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws for one counted event. Both are always consumed so trials at
/// different `epsilon` see the same numbers event by event.
fn corrupt<R: Rng>(
    rng: &mut R,
    spec: &NoiseSpec,
    current: NodeOrientation,
) -> Option<NodeOrientation> {
    let hit: f64 = rng.random();
    let coin: bool = rng.random();
    if hit >= spec.epsilon {
        return None;
    }
    Some(match spec.channel {
        Channel::BitFlip => current.flipped(),
        Channel::Depolarizing => NodeOrientation::from_bit(coin),
    })
}

/// One noisy routing-level call of the two-state scheme. Returns `true` on failure.
pub fn proposed_trial<R: Rng>(
    topology: &TreeTopology,
    address: u64,
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<bool> {
    let n = topology.depth();
    let addr = AddressSuperposition::classical(n, address)?;
    let start = prepare_address(&init_tree(n)?, &addr)?;

    let dispatched = dispatch_address_with(&start, topology, |event| {
        if event.flipped || spec.charge_broadcasts {
            let current = NodeOrientation::from_bit(event.flipped);
            corrupt(rng, spec, current)
        } else {
            None
        }
    });
    let outcome = dispatched.and_then(|(s, _)| {
        let s = inject_flying(&s, &Qubit::one())?;
        let (s, _) = route_photon(&s, topology, Direction::ToCells)?;
        let arrived = s
            .labels()
            .all(|l| l.photon == PhotonSite::AtCell(address as usize));
        let (s, _) = route_photon(&s, topology, Direction::ToRegister)?;
        let s = unload_address(&s, topology)?;
        Ok((arrived, s))
    });
    match outcome {
        Ok((arrived, end)) => {
            let probe = inject_flying(&start, &Qubit::one())?;
            Ok(!arrived || end.fidelity(&probe)? < 1.0 - FIDELITY_THRESHOLD)
        }
        Err(QramError::Protocol { .. }) => Ok(true),
        Err(other) => Err(other),
    }
}

/// One noisy call of the baseline. Returns `true` on failure.
pub fn glm_trial<R: Rng>(
    depth: usize,
    address: u64,
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<bool> {
    let mut tree = GlmTree::new(depth)?;
    let outcome = tree.call_with(address, |_, current| corrupt(rng, spec, current))?;
    Ok(!outcome.succeeded(address))
}

/// Estimates the per-call failure probability from `trials` independent calls.
pub fn monte_carlo_error(
    scheme: Scheme,
    n: usize,
    spec: &NoiseSpec,
    trials: u64,
    distribution: AddressDistribution,
) -> Result<MonteCarloEstimate> {
    spec.validate()?;
    if trials == 0 {
        return Err(QramError::config("at least one trial is required"));
    }
    let topology = match scheme {
        Scheme::Proposed => Some(TreeTopology::with_max(n, MAX_SPARSE_DEPTH)?),
        Scheme::Glm => {
            GlmTree::new(n)?;
            None
        }
    };
    if let AddressDistribution::Fixed(x) = distribution {
        if x >> n != 0 {
            return Err(QramError::config(format!(
                "address {x} wider than {n} bits"
            )));
        }
    }
    let errors = (0..trials)
        .into_par_iter()
        .map(|index| -> Result<u64> {
            let mut rng = trial_rng(spec.seed, index);
            let address = match distribution {
                AddressDistribution::Uniform => rng.random_range(0..1u64 << n),
                AddressDistribution::Fixed(x) => x,
            };
            let failed = match &topology {
                Some(topo) => proposed_trial(topo, address, spec, &mut rng)?,
                None => glm_trial(n, address, spec, &mut rng)?,
            };
            Ok(failed as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;

    let estimate = errors as f64 / trials as f64;
    Ok(MonteCarloEstimate {
        trials,
        errors,
        estimate,
        stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
    })
}

/// Three-sigma agreement test used by check modes. The binomial spread of
/// the analytic value is a floor so that zero observed errors at small
/// `epsilon` are not over-trusted.
pub fn within_three_sigma(estimate: &MonteCarloEstimate, expected: f64) -> bool {
    let floor = (expected * (1.0 - expected) / estimate.trials as f64).sqrt();
    (estimate.estimate - expected).abs() <= 3.0 * estimate.stderr.max(floor)
}
