//! Projective measurements, repeated sampling and qubit state tomography.
//!
//! Every random choice is driven by an explicit draw in [0, 1) or by a
//! counter-keyed stream from [`crate::rng`], so identical inputs always give
//! identical outcomes regardless of evaluation order.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::rng::stream_rng;
use crate::state::{apply_unitary, make_state, PureState};

/// Probability of each outcome when measuring `subsystem` in the
/// computational basis.
pub fn outcome_probabilities(state: &PureState, subsystem: usize) -> Result<Vec<f64>> {
    let n = state.num_subsystems();
    if subsystem >= n {
        return Err(Error::IndexOutOfRange {
            index: subsystem,
            count: n,
        });
    }
    let d = state.dims()[subsystem];
    let mut probs = vec![0.0f64; d];
    for (flat, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p > 0.0 {
            probs[state.digits_of(flat)[subsystem]] += p;
        }
    }
    Ok(probs)
}

/// Measures one subsystem using an externally supplied draw in [0, 1).
///
/// The outcome is selected by inverse transform sampling over ascending
/// outcome values; if rounding makes the cumulative sum fall short of the
/// draw, the largest outcome with nonzero probability is chosen. Returns the
/// outcome, its Born probability, and the collapsed renormalized state.
pub fn measure_qudit(
    state: &PureState,
    subsystem: usize,
    draw: f64,
) -> Result<(usize, f64, PureState)> {
    if !(0.0..1.0).contains(&draw) {
        return Err(Error::BadDraw(draw));
    }
    let probs = outcome_probabilities(state, subsystem)?;
    let mut outcome = None;
    let mut cumulative = 0.0f64;
    for (k, &p) in probs.iter().enumerate() {
        cumulative += p;
        if draw < cumulative {
            outcome = Some(k);
            break;
        }
    }
    let outcome = match outcome {
        Some(k) => k,
        None => probs
            .iter()
            .rposition(|&p| p > 0.0)
            .expect("a normalized state has a nonzero outcome"),
    };

    let probability = probs[outcome];
    let scale = Complex64::new(1.0 / probability.sqrt(), 0.0);
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(flat, amp)| {
            if state.digits_of(flat)[subsystem] == outcome {
                amp * scale
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let collapsed = make_state(state.dims(), amps)?;
    Ok((outcome, probability, collapsed))
}

/// Counts of joint outcomes over repeated shots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutcomeHistogram {
    shots: u64,
    counts: BTreeMap<Vec<usize>, u64>,
}

impl OutcomeHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, outcome: Vec<usize>) {
        self.shots += 1;
        *self.counts.entry(outcome).or_insert(0) += 1;
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<Vec<usize>, u64> {
        &self.counts
    }

    pub fn count(&self, outcome: &[usize]) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn frequency(&self, outcome: &[usize]) -> f64 {
        if self.shots == 0 {
            return 0.0;
        }
        self.count(outcome) as f64 / self.shots as f64
    }

    /// CSV rows `outcome,count,frequency` in ascending outcome order, with
    /// tuple outcomes joined by ':'.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,count,frequency\n");
        for (outcome, &count) in &self.counts {
            let key = outcome
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(":");
            let freq = count as f64 / self.shots as f64;
            out.push_str(&format!("{},{},{}\n", key, count, sig12(freq)));
        }
        out
    }
}

/// Measures the listed subsystems in order, `shots` times, calling `prep`
/// for a fresh state before every shot. Shot i draws from stream i of `seed`.
pub fn sample_counts<F>(
    mut prep: F,
    subsystems: &[usize],
    shots: u64,
    seed: u64,
) -> Result<OutcomeHistogram>
where
    F: FnMut() -> PureState,
{
    if subsystems.is_empty() {
        return Err(Error::EmptySubsystems);
    }
    if shots == 0 {
        return Err(Error::BadDensity("sampling needs at least one shot".into()));
    }
    let mut histogram = OutcomeHistogram::new();
    for shot in 0..shots {
        let mut rng = stream_rng(seed, shot);
        let mut current = prep();
        let mut outcome = Vec::with_capacity(subsystems.len());
        for &sub in subsystems {
            let draw = rng.gen::<f64>();
            let (value, _probability, next) = measure_qudit(&current, sub, draw)?;
            outcome.push(value);
            current = next;
        }
        histogram.record(outcome);
    }
    Ok(histogram)
}

/// Estimates a single-qubit density matrix by measuring `shots` fresh copies
/// in each of the Z, X and Y bases and inverting the Stokes parameters.
///
/// `prep` is called once per shot and must return a one-qubit state. Basis b,
/// shot s draws from stream b·shots + s of `seed`. The linear-inversion
/// estimate is projected back to the physical set by clipping negative
/// eigenvalues and renormalizing the trace.
pub fn tomography_qubit<F>(mut prep: F, shots: u64, seed: u64) -> Result<DensityMatrix>
where
    F: FnMut() -> PureState,
{
    if shots == 0 {
        return Err(Error::BadDensity("tomography needs at least one shot".into()));
    }
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let hadamard = crate::gates::UnitaryMatrix::new(DMatrix::from_row_slice(
        2,
        2,
        &[h, h, h, -h],
    ))?;
    // S† maps |0⟩±i|1⟩ onto |0⟩±|1⟩; following with H diagonalizes Y.
    let s_dag = crate::gates::UnitaryMatrix::new(DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
        ],
    ))?;
    let y_rotation = hadamard.compose(&s_dag)?;
    // Basis order: Z, X, Y.
    let rotations: [Option<&crate::gates::UnitaryMatrix>; 3] =
        [None, Some(&hadamard), Some(&y_rotation)];

    let mut stokes = [0.0f64; 3];
    for (b, rotation) in rotations.iter().enumerate() {
        let mut balance = 0i64;
        for shot in 0..shots {
            let mut state = prep();
            if state.dims() != [2] {
                return Err(Error::QubitOnly(state.dims()[0]));
            }
            if let Some(u) = rotation {
                state = apply_unitary(&state, u, &[0])?;
            }
            let draw = crate::rng::stream_draw(seed, b as u64 * shots + shot);
            let (outcome, _probability, _) = measure_qudit(&state, 0, draw)?;
            balance += if outcome == 0 { 1 } else { -1 };
        }
        stokes[b] = balance as f64 / shots as f64;
    }

    // ρ̂ = (I + s_x σ_x + s_y σ_y + s_z σ_z) / 2 with (s_z, s_x, s_y) above.
    let (sz, sx, sy) = (stokes[0], stokes[1], stokes[2]);
    let rho = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new((1.0 + sz) / 2.0, 0.0),
            Complex64::new(sx / 2.0, -sy / 2.0),
            Complex64::new(sx / 2.0, sy / 2.0),
            Complex64::new((1.0 - sz) / 2.0, 0.0),
        ],
    );

    let eig = nalgebra::SymmetricEigen::new(rho);
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let mut projected = DMatrix::zeros(2, 2);
    for (i, &l) in clipped.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let scale = Complex64::new(l / total, 0.0);
        for r in 0..2 {
            for c in 0..2 {
                projected[(r, c)] += scale * v[r] * v[c].conj();
            }
        }
    }
    DensityMatrix::new(projected)
}
