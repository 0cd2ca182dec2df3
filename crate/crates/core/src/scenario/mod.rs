//! Experiment runner behind the command-line tool: each command turns a
//! [`ScenarioConfig`] into an output table plus a list of named checks.

mod config;
mod trace;

use serde::Serialize;

pub use config::{
    parse_bits, AddressEntry, CellTraceConfig, Command, ContentEntry, NoiseConfig, OutputFormat,
    Overrides, ScenarioConfig,
};
pub use trace::{cell_round_trip, run_cell_trace, trace_qubit, CellRun, GOLDEN_CHECKPOINTS};

use crate::dense::DenseQram;
use crate::error::{QramError, Result};
use crate::noise::{
    analytic_error, first_order_valid, monte_carlo_error, within_three_sigma, AddressDistribution,
    NoiseSpec, Scheme,
};
use crate::qstate::{fmt_real, Qubit};
use crate::routing::{
    glm_closed_form, glm_memory_call, init_tree, load_address, memory_call, read_target_state,
    AddressSuperposition, Payload, TreeTopology, MAX_DENSE_DEPTH, MAX_SPARSE_DEPTH,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QRAM_SIM_THREADS";

/// Fidelity a noiseless call must reach.
pub const FIDELITY_FLOOR: f64 = 1.0 - 1e-9;

/// One pass/fail assertion made while running a scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioReport {
    /// Rendered output file contents.
    pub output: String,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs `f` on a pool limited by `QRAM_SIM_THREADS` when it is set.
pub fn with_thread_limit<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let threads: usize = v.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
                QramError::config(format!("{THREADS_ENV}={v:?} is not a positive integer"))
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| QramError::config(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

/// Dispatches on `config.command`.
pub fn run(config: &ScenarioConfig) -> Result<ScenarioReport> {
    with_thread_limit(|| match config.command {
        Command::Counts => run_counts(config),
        Command::Compare => run_compare(config),
        Command::NoiseSweep => run_noise_sweep(config),
        Command::SuperpositionDemo => run_superposition_demo(config),
        Command::CellTrace => run_cell_trace(config),
    })?
}

/// Renders rows as CSV (with header) or one JSON object per line.
pub fn render<T: Serialize>(rows: &[T], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)
                    .map_err(|e| QramError::config(e.to_string()))?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| QramError::config(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| QramError::config(e.to_string()))
        }
        OutputFormat::JsonLines => {
            let mut out = String::new();
            for row in rows {
                out.push_str(
                    &serde_json::to_string(row).map_err(|e| QramError::config(e.to_string()))?,
                );
                out.push('\n');
            }
            Ok(out)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountsRow {
    pub n: usize,
    pub addresses: u64,
    pub proposed_avg_flips: f64,
    pub proposed_expected: f64,
    pub glm_trit_ops: f64,
    pub glm_expected: u64,
    pub proposed_ok: bool,
    pub glm_ok: bool,
}

/// Exhaustive manipulation counts for every depth in `n_min..=n`.
pub fn run_counts(config: &ScenarioConfig) -> Result<ScenarioReport> {
    if config.n_min == 0 || config.n_min > config.n || config.n > MAX_SPARSE_DEPTH {
        return Err(QramError::config(format!(
            "depth range {}..={} must lie within 1..={MAX_SPARSE_DEPTH}",
            config.n_min, config.n
        )));
    }
    let mut report = ScenarioReport::default();
    let mut rows = Vec::new();
    for n in config.n_min..=config.n {
        let topo = TreeTopology::new(n)?;
        let fresh = init_tree(n)?;
        let count = 1u64 << n;
        let mut total_flips = 0u64;
        let mut total_ops = 0u64;
        let mut glm_ok = true;
        for x in 0..count {
            let (_, ledger) = load_address(&fresh, &topo, &AddressSuperposition::classical(n, x)?)?;
            total_flips += ledger.classical_flips().unwrap_or(0) as u64;
            let ops = glm_memory_call(n, x)?.glm_trit_ops;
            glm_ok &= ops == glm_closed_form(n);
            total_ops += ops;
        }
        // Average is n/2 exactly iff 2 * total = n * 2^n.
        let proposed_ok = 2 * total_flips == n as u64 * count;
        report.checks.push(Check::new(
            format!("counts n={n} proposed"),
            proposed_ok,
            format!("{total_flips} flips over {count} addresses"),
        ));
        report.checks.push(Check::new(
            format!("counts n={n} glm"),
            glm_ok,
            format!("{total_ops} trit operations over {count} addresses"),
        ));
        rows.push(CountsRow {
            n,
            addresses: count,
            proposed_avg_flips: total_flips as f64 / count as f64,
            proposed_expected: n as f64 / 2.0,
            glm_trit_ops: total_ops as f64 / count as f64,
            glm_expected: glm_closed_form(n),
            proposed_ok,
            glm_ok,
        });
    }
    report.output = render(&rows, config.format)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub scheme: Scheme,
    pub n: usize,
    pub address: String,
    pub node_flips: f64,
    pub pulse_broadcasts: u64,
    pub glm_trit_ops: f64,
    pub traversals: f64,
    pub fidelity: Option<f64>,
}

fn resolve_addresses(
    config: &ScenarioConfig,
    warnings: &mut Vec<String>,
) -> Result<Vec<AddressSuperposition>> {
    if config.addresses.is_empty() {
        if config.n > 6 {
            return Err(QramError::config(
                "list addresses explicitly for depths above 6",
            ));
        }
        return (0..1u64 << config.n)
            .map(|x| AddressSuperposition::classical(config.n, x))
            .collect();
    }
    config
        .addresses
        .iter()
        .map(|a| a.resolve(config.n, warnings))
        .collect()
}

/// Side-by-side counts of one read call per address for both schemes.
pub fn run_compare(config: &ScenarioConfig) -> Result<ScenarioReport> {
    let n = config.n;
    TreeTopology::new(n)?;
    let mut report = ScenarioReport::default();
    let addresses = resolve_addresses(config, &mut report.warnings)?;
    let contents = vec![Qubit::zero(); 1 << n];
    let topo = TreeTopology::new(n)?;
    let mut rows = Vec::new();
    for address in &addresses {
        let label = address.to_string();
        let out = memory_call(n, address, &contents, &Payload::Read)?;
        let target = read_target_state(&topo, address, &contents)?;
        let fidelity = out.state.fidelity(&target)?;
        report.checks.push(Check::new(
            format!("compare {label} fidelity"),
            fidelity >= FIDELITY_FLOOR,
            fmt_real(fidelity),
        ));
        if let Some(x) = address.as_classical() {
            let flips = out.ledger.classical_flips().unwrap_or(u32::MAX);
            report.checks.push(Check::new(
                format!("compare {label} flips"),
                flips == x.count_ones(),
                format!("{flips} flips, popcount {}", x.count_ones()),
            ));
        }
        rows.push(CompareRow {
            scheme: Scheme::Proposed,
            n,
            address: label.clone(),
            node_flips: out.ledger.node_flips,
            pulse_broadcasts: out.ledger.pulse_broadcasts,
            glm_trit_ops: out.ledger.glm_trit_ops as f64,
            traversals: out.ledger.photon_node_traversals,
            fidelity: Some(fidelity),
        });

        let mut ops = 0.0;
        let mut traversals = 0.0;
        for &(x, amp) in address.terms() {
            let ledger = glm_memory_call(n, x)?;
            let p = amp.norm_sqr();
            ops += p * ledger.glm_trit_ops as f64;
            traversals += p * ledger.per_level.len() as f64 * 2.0;
            report.checks.push(Check::new(
                format!(
                    "compare {label} glm term {}",
                    crate::qstate::render_address(x, n)
                ),
                ledger.glm_trit_ops == glm_closed_form(n),
                format!("{} trit operations", ledger.glm_trit_ops),
            ));
        }
        rows.push(CompareRow {
            scheme: Scheme::Glm,
            n,
            address: label,
            node_flips: 0.0,
            pulse_broadcasts: 0,
            glm_trit_ops: ops,
            traversals,
            fidelity: None,
        });
    }
    report.output = render(&rows, config.format)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub n: usize,
    pub epsilon: f64,
    pub channel: String,
    pub trials: u64,
    pub errors: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub analytic: f64,
}

/// Monte Carlo error estimates over the (scheme, depth, epsilon) grid, in
/// grid order.
pub fn run_noise_sweep(config: &ScenarioConfig) -> Result<ScenarioReport> {
    let noise = config
        .noise
        .as_ref()
        .ok_or_else(|| QramError::config("noise-sweep needs a [noise] section or --epsilon"))?;
    if noise.epsilons.is_empty() {
        return Err(QramError::config("no epsilon values to sweep"));
    }
    let depths = if noise.depths.is_empty() {
        vec![config.n]
    } else {
        noise.depths.clone()
    };
    let mut report = ScenarioReport::default();
    let mut rows = Vec::new();
    for &scheme in &noise.schemes {
        for &n in &depths {
            let distribution = match &noise.address {
                Some(bits) => AddressDistribution::Fixed(parse_bits(bits, n)?),
                None => AddressDistribution::Uniform,
            };
            // Mean number of charged events per call.
            let events = match (scheme, distribution) {
                (Scheme::Glm, _) => glm_closed_form(n) as f64,
                (Scheme::Proposed, _) if noise.charge_broadcasts => n as f64,
                (Scheme::Proposed, AddressDistribution::Fixed(x)) => x.count_ones() as f64,
                (Scheme::Proposed, AddressDistribution::Uniform) => n as f64 / 2.0,
            };
            for &epsilon in &noise.epsilons {
                let spec = NoiseSpec {
                    epsilon,
                    channel: noise.channel,
                    seed: config.seed,
                    charge_broadcasts: noise.charge_broadcasts,
                };
                let est = monte_carlo_error(scheme, n, &spec, config.trials, distribution)?;
                let analytic = match (scheme, distribution, noise.charge_broadcasts) {
                    (Scheme::Proposed, AddressDistribution::Uniform, false) => {
                        analytic_error(n, epsilon)?
                    }
                    _ => events * epsilon,
                };
                let tag = format!("sweep {scheme} n={n} epsilon={epsilon}");
                if epsilon == 0.0 {
                    report.checks.push(Check::new(
                        format!("{tag} noiseless"),
                        est.errors == 0,
                        format!("{} errors", est.errors),
                    ));
                } else if first_order_valid(events, epsilon, config.trials) {
                    report.checks.push(Check::new(
                        format!("{tag} three sigma"),
                        within_three_sigma(&est, analytic),
                        format!("estimate {} vs {analytic}", est.estimate),
                    ));
                } else {
                    report.warnings.push(format!(
                        "{tag}: first-order figure {analytic} is outside its validity at {} trials; row not checked",
                        config.trials
                    ));
                }
                if epsilon > 0.0 && analytic * (config.trials as f64) < 10.0 {
                    report.warnings.push(format!(
                        "{tag}: {} trials expect fewer than 10 errors; estimate is coarse",
                        config.trials
                    ));
                }
                rows.push(SweepRow {
                    scheme,
                    n,
                    epsilon,
                    channel: spec.channel_label(),
                    trials: est.trials,
                    errors: est.errors,
                    estimate: est.estimate,
                    stderr: est.stderr,
                    analytic,
                });
            }
        }
    }
    // The baseline should come out worse wherever both schemes ran.
    for glm in rows
        .iter()
        .filter(|r| r.scheme == Scheme::Glm && r.epsilon > 0.0)
    {
        if let Some(prop) = rows
            .iter()
            .find(|r| r.scheme == Scheme::Proposed && r.n == glm.n && r.epsilon == glm.epsilon)
        {
            report.checks.push(Check::new(
                format!("sweep n={} epsilon={} baseline worse", glm.n, glm.epsilon),
                glm.estimate > prop.estimate,
                format!("glm {} vs proposed {}", glm.estimate, prop.estimate),
            ));
        }
    }
    report.output = render(&rows, config.format)?;
    Ok(report)
}

#[derive(Serialize)]
struct DemoRecord<'a> {
    n: usize,
    address: String,
    fidelity: f64,
    dense_max_deviation: f64,
    target: &'a str,
    achieved: &'a str,
}

/// Superposed-address read, compared with the ideal output and the dense oracle.
pub fn run_superposition_demo(config: &ScenarioConfig) -> Result<ScenarioReport> {
    let n = config.n;
    if n == 0 || n > MAX_DENSE_DEPTH {
        return Err(QramError::config(format!(
            "superposition-demo runs at depth 1..={MAX_DENSE_DEPTH}; use compare for deeper trees"
        )));
    }
    let mut report = ScenarioReport::default();
    let address = match config.addresses.as_slice() {
        [] => {
            // Alternating bit patterns: |010> + |101> at depth 3.
            let mask = (1u64 << n) - 1;
            let x = 0x5555_5555u64 & mask;
            AddressSuperposition::uniform(n, &[!x & mask, x])?
        }
        [one] => one.resolve(n, &mut report.warnings)?,
        _ => {
            return Err(QramError::config(
                "superposition-demo takes a single address entry",
            ))
        }
    };
    let cells = 1usize << n;
    let contents: Vec<Qubit> = if config.contents.is_empty() {
        (0..cells)
            .map(|i| {
                if i % 2 == 1 {
                    Qubit::one()
                } else {
                    Qubit::zero()
                }
            })
            .collect()
    } else if config.contents.len() == cells {
        config
            .contents
            .iter()
            .map(|c| c.resolve())
            .collect::<Result<_>>()?
    } else {
        return Err(QramError::config(format!(
            "{} cell contents given for {cells} cells",
            config.contents.len()
        )));
    };

    let topo = TreeTopology::new(n)?;
    let out = memory_call(n, &address, &contents, &Payload::Read)?;
    let target = read_target_state(&topo, &address, &contents)?;
    let fidelity = out.state.fidelity(&target)?;
    let mut dense = DenseQram::new(n, &address, &contents, &Qubit::zero())?;
    dense.read_call()?;
    let deviation = dense
        .project(&out.state)?
        .max_modulus_deviation(dense.state())?;

    report.checks.push(Check::new(
        "demo fidelity",
        fidelity >= FIDELITY_FLOOR,
        fmt_real(fidelity),
    ));
    report.checks.push(Check::new(
        "demo dense agreement",
        deviation <= 1e-10,
        format!("{deviation:e}"),
    ));

    let (target_dump, achieved_dump) = (target.dump(), out.state.dump());
    report.output = match config.format {
        OutputFormat::Csv => format!(
            "# address (MSB = level 0)\n{address}\n# target\n{target_dump}# achieved\n{achieved_dump}# fidelity\n{}\n# dense max deviation\n{deviation:e}\n",
            fmt_real(fidelity)
        ),
        OutputFormat::JsonLines => {
            let record = DemoRecord {
                n,
                address: address.to_string(),
                fidelity,
                dense_max_deviation: deviation,
                target: &target_dump,
                achieved: &achieved_dump,
            };
            serde_json::to_string(&record).map_err(|e| QramError::config(e.to_string()))? + "\n"
        }
    };
    Ok(report)
}
