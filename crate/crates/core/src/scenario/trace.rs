//! Step-by-step trace of one write followed by one read on a depth-1 machine.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{render, Check, OutputFormat, ScenarioConfig, ScenarioReport, FIDELITY_FLOOR};
use crate::cell::{preload_cells, read_protocol, write_protocol, ProtocolTrace};
use crate::dense::DenseCellPair;
use crate::error::{QramError, Result};
use crate::qstate::{fmt_real, Amplitude, Qubit, SparseState};
use crate::routing::{
    dispatch_address, emit_from_cell, init_tree, prepare_address, route_photon, select_cell,
    AddressSuperposition, Direction, TreeTopology,
};

/// Reference states at the canonical input `(|0> + |1>)/sqrt 2`, as
/// `(phase, step, file contents)`.
pub const GOLDEN_CHECKPOINTS: [(&str, usize, &str); 4] = [
    ("write", 4, include_str!("../../golden/write_step4.txt")),
    ("write", 6, include_str!("../../golden/write_step6.txt")),
    ("write", 7, include_str!("../../golden/write_step7.txt")),
    ("read", 2, include_str!("../../golden/read_step2.txt")),
];

const DENSE_TOL: f64 = 1e-10;

/// Qubit to write: from the config when both amplitudes are given, else
/// Haar-random from the seed.
pub fn trace_qubit(config: &ScenarioConfig) -> Result<Qubit> {
    match config.cell.as_ref().map(|c| (c.alpha, c.beta)) {
        Some((Some(a), Some(b))) => {
            Qubit::new(Amplitude::new(a[0], a[1]), Amplitude::new(b[0], b[1]))
                .map_err(|_| QramError::config("cell.alpha and cell.beta are not normalized"))
        }
        Some((None, None)) | None => Ok(Qubit::random(&mut ChaCha8Rng::seed_from_u64(config.seed))),
        Some(_) => Err(QramError::config(
            "give both cell.alpha and cell.beta or neither",
        )),
    }
}

/// Traces and the data-register fidelity from [`cell_round_trip`].
pub struct CellRun {
    pub write: ProtocolTrace,
    pub read: ProtocolTrace,
    pub selected_before_write: SparseState,
    pub selected_before_read: SparseState,
    pub round_trip_fidelity: f64,
}

/// Writes `data` into cell 0 of a depth-1 machine (both cells start in `g`),
/// selects the cell again and reads it back.
pub fn cell_round_trip(data: &Qubit) -> Result<CellRun> {
    let topo = TreeTopology::new(1)?;
    let s = preload_cells(&init_tree(1)?, &topo, &[Qubit::zero(), Qubit::zero()])?;
    let s = prepare_address(&s, &AddressSuperposition::classical(1, 0)?)?;
    let (s, _) = dispatch_address(&s, &topo)?;
    let (selected_before_write, _) = select_cell(&s, &topo)?;
    let (s, write) = write_protocol(&selected_before_write, &topo, data)?;
    let (selected_before_read, _) = select_cell(&s, &topo)?;
    let (s, read) = read_protocol(&selected_before_read, &topo)?;
    let s = emit_from_cell(&s, &topo)?;
    let (s, _) = route_photon(&s, &topo, Direction::ToRegister)?;
    let target = SparseState::from_terms(data.components())?;
    let round_trip_fidelity = s.reduced_fidelity(
        |l| {
            (l.data, {
                let mut rest = l.clone();
                rest.data = 0;
                rest
            })
        },
        &target,
    )?;
    Ok(CellRun {
        write,
        read,
        selected_before_write,
        selected_before_read,
        round_trip_fidelity,
    })
}

#[derive(Serialize)]
struct TraceRow<'a> {
    phase: &'a str,
    step: String,
    name: &'a str,
    state: String,
}

pub fn run_cell_trace(config: &ScenarioConfig) -> Result<ScenarioReport> {
    let data = trace_qubit(config)?;
    let run = cell_round_trip(&data)?;
    let mut report = ScenarioReport::default();

    let mut rows = Vec::new();
    for (phase, trace) in [("write", &run.write), ("read", &run.read)] {
        for rec in &trace.steps {
            rows.push(TraceRow {
                phase,
                step: rec.index.to_string(),
                name: rec.name,
                state: rec.state.dump_inline(),
            });
        }
    }
    report.output = match config.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            for r in &rows {
                out.push_str(&format!(
                    "{}\t{}: {}\t{}\n",
                    r.step, r.phase, r.name, r.state
                ));
            }
            out.push_str(&format!(
                "-\tround-trip fidelity\t{:.12}\n",
                run.round_trip_fidelity
            ));
            out
        }
        OutputFormat::JsonLines => {
            rows.push(TraceRow {
                phase: "summary",
                step: "-".into(),
                name: "round-trip fidelity",
                state: format!("{:.12}", run.round_trip_fidelity),
            });
            render(&rows, OutputFormat::JsonLines)?
        }
    };

    report.checks.push(Check::new(
        "trace round-trip fidelity",
        run.round_trip_fidelity >= FIDELITY_FLOOR,
        fmt_real(run.round_trip_fidelity),
    ));
    report.checks.extend(dense_checks(&run, &data)?);
    report.checks.extend(golden_checks()?);
    Ok(report)
}

/// Per-step agreement with the two-cell dense oracle.
fn dense_checks(run: &CellRun, data: &Qubit) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut dense = DenseCellPair::selected(&Qubit::zero(), &Qubit::zero())?;
    let write = dense.write_steps(data)?;
    let mut dense = DenseCellPair::selected(data, &Qubit::zero())?;
    let read = dense.read_steps()?;
    for (phase, trace, expected) in [("write", &run.write, &write), ("read", &run.read, &read)] {
        for (rec, exp) in trace.steps.iter().zip(expected) {
            let dev = DenseCellPair::project(&rec.state)
                .and_then(|d| d.max_modulus_deviation(exp))
                .unwrap_or(f64::INFINITY);
            checks.push(Check::new(
                format!("trace {phase} step {} dense agreement", rec.index),
                dev <= DENSE_TOL,
                format!("{dev:e}"),
            ));
        }
    }
    Ok(checks)
}

/// Canonical-input run compared with the stored reference dumps.
pub fn golden_checks() -> Result<Vec<Check>> {
    let canonical = canonical_qubit();
    let run = cell_round_trip(&canonical)?;
    Ok(GOLDEN_CHECKPOINTS
        .iter()
        .map(|&(phase, step, golden)| {
            let trace = if phase == "write" {
                &run.write
            } else {
                &run.read
            };
            let got = trace.step(step).map(|r| r.state.dump()).unwrap_or_default();
            Check::new(
                format!("trace {phase} step {step} golden"),
                got == golden,
                if got == golden {
                    "matches".into()
                } else {
                    format!("got\n{got}")
                },
            )
        })
        .collect())
}

pub(crate) fn canonical_qubit() -> Qubit {
    Qubit {
        alpha: Amplitude::new(FRAC_1_SQRT_2, 0.0),
        beta: Amplitude::new(FRAC_1_SQRT_2, 0.0),
    }
}
