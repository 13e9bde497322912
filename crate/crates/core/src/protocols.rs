//! The two remote state preparation protocols over a shared entangled
//! channel.
//!
//! Both runs use a three-qudit register in the fixed order (A, B, C): A is
//! the sender's channel half, B the receiver's half, C the sender's ancilla.
//! The deterministic protocol delivers the target on B with certainty for
//! any channel of full Schmidt rank or less; the conventional qubit protocol
//! first filters the channel into a maximally entangled pair and succeeds
//! with probability 2·min(c₀, c₁)².
//!
//! Every random choice is keyed by (seed, stream), so a run is a pure
//! function of its inputs.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::{ChannelState, TargetState};
use crate::density::{fidelity, DensityMatrix};
use crate::error::{Error, Result};
use crate::gates::{
    branch_controlled_unitary, controlled_add, filter_unitary, identity_shift_map,
    mirrored_filter_unitary, unitary_completion, Direction, GateKind, UnitaryMatrix,
};
use crate::ledger::{assert_locality, Label, OwnershipLedger, Party};
use crate::measurement::measure_qudit;
use crate::rng::stream_draw;
use crate::state::{apply_unitary, basis_state, partial_trace, schmidt_rank, tensor, PureState};
use crate::tol;

/// Ledger label used for the two basis-alignment gates that precede every
/// pipeline; trace consumers can filter on it to find the protocol stages.
pub const SCHMIDT_CORRECTION: &str = "schmidt-correction";

/// Which preparation strategy a result came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    /// Deterministic preparation; succeeds on every run.
    OptimalDeterministic,
    /// Filter-then-prepare baseline for qubits; succeeds with probability
    /// 2·min(c₀, c₁)².
    Conventional,
}

/// Everything produced by one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub kind: ProtocolKind,
    /// False only for the conventional protocol's failed filter branch.
    pub succeeded: bool,
    /// Final measurement outcome per register; C's filter outcome is
    /// superseded by the later measurement when the run continues.
    pub outcomes: BTreeMap<Label, usize>,
    /// Receiver's reduced state after all measurements.
    pub bob_state: DensityMatrix,
    /// ⟨x|ρ_B|x⟩ against the requested target.
    pub fidelity_to_target: f64,
    /// Register snapshots after each gate stage, in pipeline order. The
    /// deterministic run records five: after the sender's controlled-add,
    /// after the completion factor, after the branch-controlled factor,
    /// after the receiver's controlled-add, after the controlled-subtract.
    /// The conventional run prepends three: after the first controlled-add,
    /// after the filter, after the second controlled-add.
    pub trace: Vec<PureState>,
    pub ledger: OwnershipLedger,
}

impl ProtocolResult {
    /// The receiver's state as a ket. After both measurements the reduced
    /// state is pure, so this is its dominant eigenvector with the phase
    /// fixed so the largest-magnitude amplitude is real positive. Errors if
    /// the reduced state is visibly mixed (purity defect above 1e-8).
    pub fn bob_pure_state(&self) -> Result<PureState> {
        let purity = self.bob_state.purity();
        if (purity - 1.0).abs() > 1e-8 {
            return Err(Error::BadDensity(format!(
                "receiver state is mixed: purity {purity}"
            )));
        }
        let eig = self.bob_state.matrix().clone().symmetric_eigen();
        let top = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("real eigenvalues"))
            .map(|(i, _)| i)
            .expect("nonempty spectrum");
        let column = eig.eigenvectors.column(top);
        let pivot = column
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).expect("finite norms"))
            .map(|(i, _)| i)
            .expect("nonempty eigenvector");
        let phase = column[pivot] / column[pivot].norm();
        let amps: Vec<Complex64> = column.iter().map(|a| a / phase).collect();
        crate::state::make_state(&[amps.len()], amps)
    }
}

/// Brings a channel into diagonal form Σ_m c_m |m⟩|m⟩ with real c_m ≥ 0 and
/// returns `(diagonal, alice_corr, bob_corr)` such that applying
/// alice_corr on A and bob_corr on B to the diagonal channel reproduces the
/// original: alice_corr · diag(c) · bob_corrᵀ equals the input coefficients.
///
/// Channels that are already diagonal keep their magnitudes in place (no
/// reordering); only the phases move into alice_corr. Anything else goes
/// through a singular value decomposition, which sorts the coefficients in
/// descending order. Coefficients below [`tol::SCHMIDT_CLAMP`] are zeroed.
pub fn schmidt_normalize_channel(
    channel: &ChannelState,
) -> Result<(ChannelState, UnitaryMatrix, UnitaryMatrix)> {
    let d = channel.d();
    if channel.is_diagonal() {
        let mut magnitudes = Vec::with_capacity(d);
        let mut phases = DMatrix::zeros(d, d);
        for m in 0..d {
            let entry = channel.coefficients()[(m, m)];
            let r = entry.norm();
            if r < tol::SCHMIDT_CLAMP {
                magnitudes.push(Complex64::new(0.0, 0.0));
                phases[(m, m)] = Complex64::new(1.0, 0.0);
            } else {
                magnitudes.push(Complex64::new(r, 0.0));
                phases[(m, m)] = entry / r;
            }
        }
        let diagonal = ChannelState::from_diagonal(&magnitudes)?;
        let alice = UnitaryMatrix::new(phases)?;
        let bob = UnitaryMatrix::identity(d);
        return Ok((diagonal, alice, bob));
    }

    let form = channel.schmidt();
    let diag: Vec<Complex64> = form
        .coefficients
        .iter()
        .map(|&c| Complex64::new(c, 0.0))
        .collect();
    let diagonal = ChannelState::from_diagonal(&diag)?;
    let alice = form.left.clone();
    let bob = form.right.conj();
    Ok((diagonal, alice, bob))
}

/// Applies both parties' Schmidt corrections (the inverses of the factors
/// returned by [`schmidt_normalize_channel`]) and records them.
fn apply_corrections(
    state: PureState,
    alice_corr: &UnitaryMatrix,
    bob_corr: &UnitaryMatrix,
    ledger: &mut OwnershipLedger,
) -> Result<PureState> {
    let state = apply_unitary(&state, &alice_corr.adjoint(), &[0])?;
    ledger.record_gate(Party::Alice, SCHMIDT_CORRECTION, vec![Label::A]);
    let state = apply_unitary(&state, &bob_corr.adjoint(), &[1])?;
    ledger.record_gate(Party::Bob, SCHMIDT_CORRECTION, vec![Label::B]);
    Ok(state)
}

/// The deterministic preparation stages shared by both protocols, starting
/// from a diagonal channel on (A, B) and the ancilla C in |0⟩.
///
/// Measurements draw from streams `stream_base` (ancilla C) and
/// `stream_base + 1` (register A) of `seed`.
fn drsp_steps(
    state: PureState,
    target: &TargetState,
    ledger: &mut OwnershipLedger,
    trace: &mut Vec<PureState>,
    seed: u64,
    stream_base: u64,
) -> Result<(PureState, BTreeMap<Label, usize>)> {
    let d = target.d();
    let cadd = controlled_add(d, Direction::Add, &identity_shift_map(d))?;
    let csub = controlled_add(d, Direction::Subtract, &identity_shift_map(d))?;

    // Copy the channel digit onto the ancilla.
    let state = apply_unitary(&state, &cadd, &[0, 2])?;
    ledger.record_gate(
        Party::Alice,
        GateKind::ControlledAdd.label(),
        vec![Label::A, Label::C],
    );
    trace.push(state.clone());

    // Branch unitary W = P̃ · (Ũ ⊗ I), applied as its two factors.
    let completion = unitary_completion(target.amplitudes(), 0)?;
    let w = branch_controlled_unitary(target);
    let lifted = completion.kron(&UnitaryMatrix::identity(d));
    let residual = w.compose(&lifted.adjoint())?;

    let state = apply_unitary(&state, &completion, &[0])?;
    ledger.record_gate(Party::Alice, GateKind::Completion.label(), vec![Label::A]);
    trace.push(state.clone());

    let state = apply_unitary(&state, &residual, &[0, 2])?;
    ledger.record_gate(
        Party::Alice,
        GateKind::BranchControlled.label(),
        vec![Label::A, Label::C],
    );
    trace.push(state.clone());

    ledger.record_transmission(Label::A);

    let state = apply_unitary(&state, &cadd, &[0, 1])?;
    ledger.record_gate(
        Party::Bob,
        GateKind::ControlledAdd.label(),
        vec![Label::A, Label::B],
    );
    trace.push(state.clone());

    let state = apply_unitary(&state, &csub, &[1, 0])?;
    ledger.record_gate(
        Party::Bob,
        GateKind::ControlledSubtract.label(),
        vec![Label::B, Label::A],
    );
    trace.push(state.clone());

    let (m_c, _, state) = measure_qudit(&state, 2, stream_draw(seed, stream_base))?;
    ledger.record_measurement(Party::Alice, Label::C, m_c);
    ledger.record_message(Party::Alice, Label::C, m_c);

    let (m_a, _, state) = measure_qudit(&state, 0, stream_draw(seed, stream_base + 1))?;
    ledger.record_measurement(Party::Bob, Label::A, m_a);

    let mut outcomes = BTreeMap::new();
    outcomes.insert(Label::C, m_c);
    outcomes.insert(Label::A, m_a);
    Ok((state, outcomes))
}

/// Runs the deterministic protocol: Schmidt-correct the channel, imprint the
/// target through the branch unitary, hand A to the receiver, unwind with
/// add/subtract gates, measure. The receiver ends up holding the target on
/// every run, whatever the outcomes.
pub fn run_optimal_drsp(
    channel: &ChannelState,
    target: &TargetState,
    seed: u64,
) -> Result<ProtocolResult> {
    if channel.d() != target.d() {
        return Err(Error::DimensionMismatch {
            channel: channel.d(),
            target: target.d(),
        });
    }
    let (_, alice_corr, bob_corr) = schmidt_normalize_channel(channel)?;
    let mut ledger = OwnershipLedger::new();
    let mut trace = Vec::new();

    let d = channel.d();
    let state = tensor(&channel.to_pure_state(), &basis_state(&[d], &[0])?);
    let state = apply_corrections(state, &alice_corr, &bob_corr, &mut ledger)?;
    let (state, outcomes) = drsp_steps(state, target, &mut ledger, &mut trace, seed, 0)?;

    let bob_state = partial_trace(&state, 1)?;
    let fidelity_to_target = fidelity(&bob_state, target)?;
    Ok(ProtocolResult {
        kind: ProtocolKind::OptimalDeterministic,
        succeeded: true,
        outcomes,
        bob_state,
        fidelity_to_target,
        trace,
        ledger,
    })
}

/// Runs the conventional qubit protocol: filter the channel toward a
/// maximally entangled pair, abort on the failing flag outcome, and finish
/// with the deterministic stages otherwise.
///
/// The filter measurement draws from stream 0 of `seed`; the remaining
/// measurements use streams 1 and 2.
pub fn run_conventional_rsp(
    channel: &ChannelState,
    target: &TargetState,
    seed: u64,
) -> Result<ProtocolResult> {
    if channel.d() != target.d() {
        return Err(Error::DimensionMismatch {
            channel: channel.d(),
            target: target.d(),
        });
    }
    if channel.d() != 2 {
        return Err(Error::QubitOnly(channel.d()));
    }
    let (diagonal, alice_corr, bob_corr) = schmidt_normalize_channel(channel)?;
    let c0 = diagonal.coefficients()[(0, 0)].re;
    let c1 = diagonal.coefficients()[(1, 1)].re;

    let mut ledger = OwnershipLedger::new();
    let mut trace = Vec::new();
    let state = tensor(&channel.to_pure_state(), &basis_state(&[2], &[0])?);
    let state = apply_corrections(state, &alice_corr, &bob_corr, &mut ledger)?;

    let cadd = controlled_add(2, Direction::Add, &identity_shift_map(2))?;
    let state = apply_unitary(&state, &cadd, &[0, 2])?;
    ledger.record_gate(
        Party::Alice,
        GateKind::ControlledAdd.label(),
        vec![Label::A, Label::C],
    );
    trace.push(state.clone());

    // Leak the excess weight of the heavier branch into the ancilla flag.
    let filter = if c0 <= c1 {
        filter_unitary(c0, c1)?
    } else {
        mirrored_filter_unitary(c0, c1)?
    };
    let state = apply_unitary(&state, &filter, &[0, 2])?;
    ledger.record_gate(
        Party::Alice,
        GateKind::Filter.label(),
        vec![Label::A, Label::C],
    );
    trace.push(state.clone());

    let state = apply_unitary(&state, &cadd, &[0, 2])?;
    ledger.record_gate(
        Party::Alice,
        GateKind::ControlledAdd.label(),
        vec![Label::A, Label::C],
    );
    trace.push(state.clone());

    let (flag, _, state) = measure_qudit(&state, 2, stream_draw(seed, 0))?;
    ledger.record_measurement(Party::Alice, Label::C, flag);
    ledger.record_message(Party::Alice, Label::C, flag);

    if flag != 0 {
        let bob_state = partial_trace(&state, 1)?;
        let fidelity_to_target = fidelity(&bob_state, target)?;
        let mut outcomes = BTreeMap::new();
        outcomes.insert(Label::C, flag);
        return Ok(ProtocolResult {
            kind: ProtocolKind::Conventional,
            succeeded: false,
            outcomes,
            bob_state,
            fidelity_to_target,
            trace,
            ledger,
        });
    }

    let (state, outcomes) = drsp_steps(state, target, &mut ledger, &mut trace, seed, 1)?;
    let bob_state = partial_trace(&state, 1)?;
    let fidelity_to_target = fidelity(&bob_state, target)?;
    Ok(ProtocolResult {
        kind: ProtocolKind::Conventional,
        succeeded: true,
        outcomes,
        bob_state,
        fidelity_to_target,
        trace,
        ledger,
    })
}

/// Success probability predicted for a protocol on a given channel.
pub fn theoretical_success_probability(kind: ProtocolKind, channel: &ChannelState) -> Result<f64> {
    match kind {
        ProtocolKind::OptimalDeterministic => Ok(1.0),
        ProtocolKind::Conventional => {
            if channel.d() != 2 {
                return Err(Error::QubitOnly(channel.d()));
            }
            let min = channel
                .schmidt()
                .coefficients
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            Ok(2.0 * min * min)
        }
    }
}

/// Checks that `state` factorizes across the cut {`bob_subsystem`} vs the
/// rest: true iff at most one Schmidt coefficient of that cut exceeds `tol`,
/// i.e. the receiver's register is unentangled with everything else.
pub fn verify_factorization(state: &PureState, bob_subsystem: usize, tol: f64) -> Result<bool> {
    Ok(schmidt_rank(state, &[bob_subsystem], tol)? <= 1)
}

/// Replays a result's ledger and panics on any locality violation; returns
/// the result untouched so it can be chained in tests.
pub fn check_locality(result: &ProtocolResult) -> &ProtocolResult {
    let report = assert_locality(&result.ledger);
    assert!(
        report.is_local(),
        "locality violations: {:?}",
        report.violations
    );
    result
}
