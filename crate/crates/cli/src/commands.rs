//! Turns validated command inputs into report text.
//!
//! Every code path is a pure function of the resolved configuration, so one
//! invocation produces byte-identical output to the next. All floating point
//! values go through [`sig12`].

use std::collections::BTreeMap;
use std::ffi::OsString;

use clap::Parser;
use serde_json::json;

use rsp_core::num_complex::Complex64;
use rsp_core::{
    random_target, run_conventional_rsp, run_optimal_drsp, sig12, stream_rng,
    theoretical_success_probability, tol, ChannelState, EventKind, Label, OutcomeHistogram,
    ProtocolKind, ProtocolResult, PureState, TargetState, SCHMIDT_CORRECTION,
};

use crate::config::{
    Cli, CliError, Command, OutputFormat, ResolvedRun, ResolvedSweep, ResolvedTrace, TARGET_STREAM,
};

/// Seed offset separating the sweep's deterministic-protocol runs from its
/// conventional runs.
const DRSP_SEED_OFFSET: u64 = 1 << 33;
/// Per-angle cap on deterministic runs in a sweep; the fidelity mean
/// stabilizes long before the conventional estimate does.
const DRSP_SWEEP_RUNS: u64 = 1000;

/// Runs the parsed command line and returns the full report text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::RunDrsp(args) => {
            run_report(ProtocolKind::OptimalDeterministic, &args.resolve()?)
        }
        Command::RunConventional(args) => run_report(ProtocolKind::Conventional, &args.resolve()?),
        Command::SweepTheta(args) => sweep_report(&args.resolve()?),
        Command::Compare(args) => compare_report(&args.resolve()?),
        Command::Trace(args) => trace_report(&args.resolve()?),
    }
}

/// Parses `args` as a command line (element 0 is the binary name) and
/// executes it; the entry point used by tests and by `main`.
pub fn run_from<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|err| CliError::Config(err.to_string()))?;
    execute(&cli)
}

fn protocol_label(kind: ProtocolKind) -> &'static str {
    match kind {
        ProtocolKind::OptimalDeterministic => "drsp",
        ProtocolKind::Conventional => "conventional",
    }
}

fn run_once(
    kind: ProtocolKind,
    channel: &ChannelState,
    target: &TargetState,
    seed: u64,
) -> Result<ProtocolResult, CliError> {
    let result = match kind {
        ProtocolKind::OptimalDeterministic => run_optimal_drsp(channel, target, seed)?,
        ProtocolKind::Conventional => run_conventional_rsp(channel, target, seed)?,
    };
    // A run that reports success promises the exact target; falling short
    // means the simulation itself broke.
    if result.succeeded && result.fidelity_to_target < 1.0 - tol::FIDELITY_SLACK {
        return Err(CliError::Fidelity {
            fidelity: result.fidelity_to_target,
        });
    }
    Ok(result)
}

struct BatchStats {
    shots: u64,
    successes: u64,
    failed: u64,
    fidelity_sum: f64,
    /// Joint (A, C) outcomes of the successful runs.
    histogram: OutcomeHistogram,
}

impl BatchStats {
    fn success_rate(&self) -> f64 {
        self.successes as f64 / self.shots as f64
    }

    /// Mean delivered fidelity over successful runs; 0 when none succeeded.
    fn mean_fidelity(&self) -> f64 {
        if self.successes == 0 {
            0.0
        } else {
            self.fidelity_sum / self.successes as f64
        }
    }
}

/// Runs the protocol `shots` times with per-run seeds `seed + i`.
fn run_batch(
    kind: ProtocolKind,
    channel: &ChannelState,
    target: &TargetState,
    shots: u64,
    seed: u64,
) -> Result<BatchStats, CliError> {
    let mut stats = BatchStats {
        shots,
        successes: 0,
        failed: 0,
        fidelity_sum: 0.0,
        histogram: OutcomeHistogram::new(),
    };
    for r in 0..shots {
        let result = run_once(kind, channel, target, seed.wrapping_add(r))?;
        if result.succeeded {
            stats.successes += 1;
            stats.fidelity_sum += result.fidelity_to_target;
            stats
                .histogram
                .record(vec![result.outcomes[&Label::A], result.outcomes[&Label::C]]);
        } else {
            stats.failed += 1;
        }
    }
    Ok(stats)
}

fn check_conventional_dim(d: usize) -> Result<(), CliError> {
    if d != 2 {
        return Err(CliError::Config(format!(
            "the conventional protocol is defined for qubits only; got d = {d}"
        )));
    }
    Ok(())
}

fn run_report(kind: ProtocolKind, r: &ResolvedRun) -> Result<String, CliError> {
    if kind == ProtocolKind::Conventional {
        check_conventional_dim(r.d)?;
    }
    let stats = run_batch(kind, &r.channel, &r.target, r.shots, r.seed)?;
    let theory = theoretical_success_probability(kind, &r.channel)?;
    Ok(match r.format {
        OutputFormat::Csv => {
            let mut out = String::from("key,value\n");
            out.push_str(&format!("protocol,{}\n", protocol_label(kind)));
            out.push_str(&format!("d,{}\n", r.d));
            out.push_str(&format!("seed,{}\n", r.seed));
            out.push_str(&format!("shots,{}\n", r.shots));
            out.push_str(&format!("success_rate,{}\n", sig12(stats.success_rate())));
            out.push_str(&format!("mean_fidelity,{}\n", sig12(stats.mean_fidelity())));
            out.push_str(&format!(
                "theory_success_probability,{}\n",
                sig12(theory)
            ));
            out.push_str(&format!("failed_runs,{}\n", stats.failed));
            out.push('\n');
            out.push_str(&stats.histogram.to_csv());
            out
        }
        OutputFormat::Json => {
            let histogram: BTreeMap<String, u64> = stats
                .histogram
                .counts()
                .iter()
                .map(|(outcome, &count)| (outcome_key(outcome), count))
                .collect();
            let value = json!({
                "protocol": protocol_label(kind),
                "d": r.d,
                "seed": r.seed,
                "shots": r.shots,
                "success_rate": sig12(stats.success_rate()),
                "mean_fidelity": sig12(stats.mean_fidelity()),
                "theory_success_probability": sig12(theory),
                "failed_runs": stats.failed,
                "histogram": histogram,
            });
            pretty(&value)
        }
    })
}

fn outcome_key(outcome: &[usize]) -> String {
    outcome
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(":")
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report values serialize");
    text.push('\n');
    text
}

/// One row of the angle sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub theta: f64,
    pub p_conventional_theory: f64,
    pub p_conventional_empirical: f64,
    pub p_drsp_theory: f64,
    pub drsp_fidelity_mean: f64,
}

/// Sweeps diagonal qubit channels diag(sin theta, cos theta) over `points`
/// equally spaced angles in [0, pi/4].
///
/// Per angle k: the conventional protocol runs `shots` times against one
/// random target (seeds `seed + k*shots + i`), and the deterministic
/// protocol runs `min(shots, 1000)` times against fresh random targets. All
/// targets come from target stream `TARGET_STREAM + k`.
pub fn sweep_points(points: usize, shots: u64, seed: u64) -> Result<Vec<SweepPoint>, CliError> {
    if points < 2 {
        return Err(CliError::Config(format!(
            "a sweep needs at least 2 points; got {points}"
        )));
    }
    if shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let theta = std::f64::consts::FRAC_PI_4 * k as f64 / (points - 1) as f64;
        let channel = ChannelState::from_diagonal(&[
            Complex64::new(theta.sin(), 0.0),
            Complex64::new(theta.cos(), 0.0),
        ])?;
        let p_conventional_theory =
            theoretical_success_probability(ProtocolKind::Conventional, &channel)?;
        let p_drsp_theory =
            theoretical_success_probability(ProtocolKind::OptimalDeterministic, &channel)?;

        let mut target_rng = stream_rng(seed, TARGET_STREAM.wrapping_add(k as u64));
        let conventional_target = random_target(2, &mut target_rng)?;
        let mut successes = 0u64;
        let base = (k as u64).wrapping_mul(shots);
        for r in 0..shots {
            let result = run_once(
                ProtocolKind::Conventional,
                &channel,
                &conventional_target,
                seed.wrapping_add(base.wrapping_add(r)),
            )?;
            if result.succeeded {
                successes += 1;
            }
        }

        let drsp_runs = shots.min(DRSP_SWEEP_RUNS);
        let drsp_base = DRSP_SEED_OFFSET.wrapping_add((k as u64).wrapping_mul(DRSP_SWEEP_RUNS));
        let mut fidelity_sum = 0.0;
        for j in 0..drsp_runs {
            let target = random_target(2, &mut target_rng)?;
            let result = run_once(
                ProtocolKind::OptimalDeterministic,
                &channel,
                &target,
                seed.wrapping_add(drsp_base.wrapping_add(j)),
            )?;
            fidelity_sum += result.fidelity_to_target;
        }

        rows.push(SweepPoint {
            theta,
            p_conventional_theory,
            p_conventional_empirical: successes as f64 / shots as f64,
            p_drsp_theory,
            drsp_fidelity_mean: fidelity_sum / drsp_runs as f64,
        });
    }
    Ok(rows)
}

fn sweep_report(r: &ResolvedSweep) -> Result<String, CliError> {
    let rows = sweep_points(r.points, r.shots, r.seed)?;
    Ok(match r.format {
        OutputFormat::Csv => {
            let mut out = String::from(
                "theta,p_conventional_theory,p_conventional_empirical,p_drsp_theory,drsp_fidelity_mean\n",
            );
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    sig12(row.theta),
                    sig12(row.p_conventional_theory),
                    sig12(row.p_conventional_empirical),
                    sig12(row.p_drsp_theory),
                    sig12(row.drsp_fidelity_mean),
                ));
            }
            out
        }
        OutputFormat::Json => {
            let values: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "theta": sig12(row.theta),
                        "p_conventional_theory": sig12(row.p_conventional_theory),
                        "p_conventional_empirical": sig12(row.p_conventional_empirical),
                        "p_drsp_theory": sig12(row.p_drsp_theory),
                        "drsp_fidelity_mean": sig12(row.drsp_fidelity_mean),
                    })
                })
                .collect();
            pretty(&serde_json::Value::Array(values))
        }
    })
}

fn compare_report(r: &ResolvedRun) -> Result<String, CliError> {
    check_conventional_dim(r.d)?;
    let table = [
        (
            ProtocolKind::OptimalDeterministic,
            run_batch(
                ProtocolKind::OptimalDeterministic,
                &r.channel,
                &r.target,
                r.shots,
                r.seed,
            )?,
        ),
        (
            ProtocolKind::Conventional,
            run_batch(
                ProtocolKind::Conventional,
                &r.channel,
                &r.target,
                r.shots,
                r.seed,
            )?,
        ),
    ];
    Ok(match r.format {
        OutputFormat::Csv => {
            let mut out = String::from("protocol,success_rate,mean_fidelity,shots,seed\n");
            for (kind, stats) in &table {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    protocol_label(*kind),
                    sig12(stats.success_rate()),
                    sig12(stats.mean_fidelity()),
                    r.shots,
                    r.seed,
                ));
            }
            out
        }
        OutputFormat::Json => {
            let values: Vec<serde_json::Value> = table
                .iter()
                .map(|(kind, stats)| {
                    json!({
                        "protocol": protocol_label(*kind),
                        "success_rate": sig12(stats.success_rate()),
                        "mean_fidelity": sig12(stats.mean_fidelity()),
                        "shots": r.shots,
                        "seed": r.seed,
                    })
                })
                .collect();
            pretty(&serde_json::Value::Array(values))
        }
    })
}

/// Gate label and acted-on subsystems for each pipeline stage, in order.
/// Stages map one-to-one onto the run's state snapshots; the two Schmidt
/// correction gates precede the first snapshot and are excluded.
fn stage_gates(result: &ProtocolResult) -> Vec<(&'static str, String)> {
    result
        .ledger
        .events()
        .iter()
        .filter_map(|event| match &event.kind {
            EventKind::Gate { gate, subsystems } if *gate != SCHMIDT_CORRECTION => Some((
                *gate,
                subsystems
                    .iter()
                    .map(|label| label.as_str())
                    .collect::<Vec<_>>()
                    .join("+"),
            )),
            _ => None,
        })
        .collect()
}

fn nonzero_amplitudes(state: &PureState) -> Vec<(String, Complex64)> {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, amp)| amp.norm() > 1e-12)
        .map(|(flat, amp)| {
            let basis = state
                .digits_of(flat)
                .iter()
                .map(|digit| digit.to_string())
                .collect::<Vec<_>>()
                .join(":");
            (basis, *amp)
        })
        .collect()
}

fn trace_report(r: &ResolvedTrace) -> Result<String, CliError> {
    let result = run_once(r.kind, &r.channel, &r.target, r.seed)?;
    let gates = stage_gates(&result);
    debug_assert_eq!(gates.len(), result.trace.len());

    Ok(match r.format {
        OutputFormat::Csv => {
            let mut out = String::from("key,value\n");
            out.push_str(&format!("protocol,{}\n", protocol_label(r.kind)));
            out.push_str(&format!("d,{}\n", r.d));
            out.push_str(&format!("seed,{}\n", r.seed));
            out.push_str(&format!("succeeded,{}\n", result.succeeded));
            for (label, value) in &result.outcomes {
                out.push_str(&format!("outcome_{label},{value}\n"));
            }
            out.push_str(&format!(
                "fidelity,{}\n",
                sig12(result.fidelity_to_target)
            ));
            out.push('\n');
            out.push_str("stage,gate,subsystems,basis,re,im\n");
            for (index, (snapshot, (gate, subsystems))) in
                result.trace.iter().zip(&gates).enumerate()
            {
                for (basis, amp) in nonzero_amplitudes(snapshot) {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        index + 1,
                        gate,
                        subsystems,
                        basis,
                        sig12(amp.re),
                        sig12(amp.im),
                    ));
                }
            }
            out.push('\n');
            out.push_str("transcript\n");
            out.push_str(&result.ledger.serialize_transcript());
            out
        }
        OutputFormat::Json => {
            let outcomes: BTreeMap<String, usize> = result
                .outcomes
                .iter()
                .map(|(label, &value)| (label.to_string(), value))
                .collect();
            let stages: Vec<serde_json::Value> = result
                .trace
                .iter()
                .zip(&gates)
                .enumerate()
                .map(|(index, (snapshot, (gate, subsystems)))| {
                    let amplitudes: Vec<serde_json::Value> = nonzero_amplitudes(snapshot)
                        .into_iter()
                        .map(|(basis, amp)| {
                            json!({
                                "basis": basis,
                                "re": sig12(amp.re),
                                "im": sig12(amp.im),
                            })
                        })
                        .collect();
                    json!({
                        "stage": index + 1,
                        "gate": gate,
                        "subsystems": subsystems,
                        "amplitudes": amplitudes,
                    })
                })
                .collect();
            let transcript: Vec<String> = result
                .ledger
                .serialize_transcript()
                .lines()
                .map(str::to_string)
                .collect();
            let value = json!({
                "protocol": protocol_label(r.kind),
                "d": r.d,
                "seed": r.seed,
                "succeeded": result.succeeded,
                "outcomes": outcomes,
                "fidelity": sig12(result.fidelity_to_target),
                "stages": stages,
                "transcript": transcript,
            });
            pretty(&value)
        }
    })
}
