use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QramError, Result};
use crate::noise::{Channel, Scheme};
use crate::qstate::{Amplitude, Qubit};
use crate::routing::AddressSuperposition;

/// Superposition amplitudes further than this from unit norm are renormalized
/// with a warning.
pub const RENORMALIZE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Counts,
    Compare,
    NoiseSweep,
    SuperpositionDemo,
    CellTrace,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Counts => "counts",
            Command::Compare => "compare",
            Command::NoiseSweep => "noise-sweep",
            Command::SuperpositionDemo => "superposition-demo",
            Command::CellTrace => "cell-trace",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    JsonLines,
}

/// An address as written in a config: a bitstring such as `"001"`, or a list
/// of `[amplitude, bitstring]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AddressEntry {
    Bits(String),
    Terms(Vec<(f64, String)>),
}

/// A memory cell content: `"0"`, `"1"`, or real amplitudes `[alpha, beta]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ContentEntry {
    Bit(String),
    Amplitudes([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub channel: Channel,
    #[serde(default)]
    pub charge_broadcasts: bool,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    /// Depths to sweep; the top-level `n` when empty.
    #[serde(default)]
    pub depths: Vec<usize>,
    /// Fixed address bitstring; uniform addresses when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub address: Option<String>,
}

fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::Proposed, Scheme::Glm]
}

/// Qubit written by `cell-trace`: given amplitudes, or Haar-random from the seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellTraceConfig {
    /// `[re, im]` of alpha.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub command: Command,
    /// Tree depth; the largest depth for `counts`.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Smallest depth for `counts`.
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[serde(default)]
    pub addresses: Vec<AddressEntry>,
    /// Cell contents for `superposition-demo`, one per cell.
    #[serde(default)]
    pub contents: Vec<ContentEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellTraceConfig>,
}

fn default_n() -> usize {
    3
}

fn default_n_min() -> usize {
    1
}

fn default_trials() -> u64 {
    10_000
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub epsilons: Option<Vec<f64>>,
    pub output_path: Option<String>,
    pub format: Option<OutputFormat>,
}

impl ScenarioConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            n: default_n(),
            n_min: default_n_min(),
            addresses: Vec::new(),
            contents: Vec::new(),
            noise: None,
            trials: default_trials(),
            seed: 0,
            output_path: None,
            format: OutputFormat::Csv,
            cell: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| QramError::config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| QramError::config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(n) = o.n {
            self.n = n;
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(eps) = &o.epsilons {
            self.noise
                .get_or_insert_with(|| NoiseConfig {
                    epsilons: Vec::new(),
                    channel: Channel::BitFlip,
                    charge_broadcasts: false,
                    schemes: default_schemes(),
                    depths: Vec::new(),
                    address: None,
                })
                .epsilons = eps.clone();
        }
        if let Some(p) = &o.output_path {
            self.output_path = Some(p.clone());
        }
        if let Some(f) = o.format {
            self.format = f;
        }
    }
}

/// Parses an MSB-first bitstring of exactly `n` characters.
pub fn parse_bits(bits: &str, n: usize) -> Result<u64> {
    if bits.len() != n || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(QramError::config(format!(
            "address {bits:?} is not a {n}-bit string of 0s and 1s"
        )));
    }
    u64::from_str_radix(bits, 2).map_err(|e| QramError::config(e.to_string()))
}

impl AddressEntry {
    /// Resolves to a superposition over `n`-bit addresses, renormalizing
    /// (with a warning) when the amplitudes are off by more than `1e-6`.
    pub fn resolve(&self, n: usize, warnings: &mut Vec<String>) -> Result<AddressSuperposition> {
        match self {
            AddressEntry::Bits(bits) => AddressSuperposition::classical(n, parse_bits(bits, n)?),
            AddressEntry::Terms(terms) => {
                let mut parsed = Vec::with_capacity(terms.len());
                for (amp, bits) in terms {
                    if !amp.is_finite() {
                        return Err(QramError::config(format!("amplitude {amp} is not finite")));
                    }
                    parsed.push((parse_bits(bits, n)?, Amplitude::new(*amp, 0.0)));
                }
                let norm_sqr: f64 = parsed.iter().map(|(_, a)| a.norm_sqr()).sum();
                if norm_sqr == 0.0 {
                    return Err(QramError::config("address amplitudes are all zero"));
                }
                if (norm_sqr - 1.0).abs() > RENORMALIZE_TOL {
                    warnings.push(format!(
                        "address amplitudes have norm² {norm_sqr}; renormalized"
                    ));
                }
                let scale = norm_sqr.sqrt();
                for (_, a) in &mut parsed {
                    *a /= scale;
                }
                AddressSuperposition::new(n, parsed)
            }
        }
    }
}

impl ContentEntry {
    pub fn resolve(&self) -> Result<Qubit> {
        match self {
            ContentEntry::Bit(b) if b == "0" => Ok(Qubit::zero()),
            ContentEntry::Bit(b) if b == "1" => Ok(Qubit::one()),
            ContentEntry::Bit(b) => Err(QramError::config(format!(
                "cell content {b:?} is not 0 or 1"
            ))),
            ContentEntry::Amplitudes([a, b]) => {
                Qubit::new(Amplitude::new(*a, 0.0), Amplitude::new(*b, 0.0)).map_err(|_| {
                    QramError::config(format!("cell content [{a}, {b}] is not normalized"))
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
command = "noise-sweep"
n = 4
trials = 2000
seed = 9
format = "json-lines"
addresses = ["0101", [[0.6, "0000"], [0.8, "1111"]]]
contents = ["0", [0.6, 0.8]]

[noise]
epsilons = [0.0, 0.001]
channel = "depolarizing"
schemes = ["proposed"]
depths = [2, 4]
"#;

    #[test]
    fn parses_sample() {
        let c = ScenarioConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.command, Command::NoiseSweep);
        assert_eq!(c.format, OutputFormat::JsonLines);
        assert_eq!(c.addresses.len(), 2);
        let noise = c.noise.as_ref().unwrap();
        assert_eq!(noise.channel, Channel::Depolarizing);
        assert_eq!(noise.schemes, vec![Scheme::Proposed]);
        assert_eq!(c.contents[1].resolve().unwrap().beta.re, 0.8);
    }

    #[test]
    fn round_trip() {
        let c = ScenarioConfig::from_toml(SAMPLE).unwrap();
        let again = ScenarioConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn flags_win() {
        let mut c = ScenarioConfig::from_toml(SAMPLE).unwrap();
        c.apply(&Overrides {
            n: Some(2),
            epsilons: Some(vec![0.5]),
            format: Some(OutputFormat::Csv),
            ..Overrides::default()
        });
        assert_eq!(c.n, 2);
        assert_eq!(c.noise.unwrap().epsilons, vec![0.5]);
        assert_eq!(c.format, OutputFormat::Csv);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ScenarioConfig::from_toml("command = \"counts\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn address_resolution() {
        let mut w = Vec::new();
        let a = AddressEntry::Terms(vec![(1.0, "010".into()), (1.0, "101".into())])
            .resolve(3, &mut w)
            .unwrap();
        assert_eq!(w.len(), 1);
        assert!((a.terms()[0].1.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(AddressEntry::Bits("01".into()).resolve(3, &mut w).is_err());
        assert!(AddressEntry::Bits("0a1".into()).resolve(3, &mut w).is_err());
    }
}
