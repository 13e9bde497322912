//! Target states and two-party entangled channels.
//!
//! A channel is the resource state shared by the sender (subsystem A) and the
//! receiver (subsystem B), given by its d×d coefficient matrix in the
//! computational product basis: |Φ⟩ = Σ_{jk} M_{jk} |j⟩_A |k⟩_B.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::UnitaryMatrix;
use crate::state::{make_state, PureState};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Single-qudit pure state the sender wants the receiver to hold.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    amps: Vec<Complex64>,
}

impl TargetState {
    /// Validates dimension and norm; renormalizes within
    /// [`tol::CONSTRUCT_NORM`].
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if !(2..=32).contains(&amps.len()) {
            return Err(Error::BadDimension(amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::CONSTRUCT_NORM {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn d(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn to_pure_state(&self) -> PureState {
        make_state(&[self.d()], self.amps.clone()).expect("stored amplitudes stay normalized")
    }

    /// |⟨x|ψ⟩|² against a single-qudit pure state.
    pub fn overlap_probability(&self, state: &PureState) -> Result<f64> {
        if state.dims() != [self.d()] {
            return Err(Error::DimensionMismatch {
                channel: state.total_dim(),
                target: self.d(),
            });
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(state.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr())
    }
}

/// Schmidt data of a channel: |Φ⟩ = Σ_m c_m (U|m⟩_A)(V̄|m⟩_B) with
/// coefficients sorted descending and tiny values clamped to zero.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    /// Left Schmidt basis, columns U|m⟩.
    pub left: UnitaryMatrix,
    /// Right factor V of M = U Σ V†; the right basis columns are V̄|m⟩.
    pub right: UnitaryMatrix,
}

impl SchmidtForm {
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&c| c > 0.0).count()
    }

    /// Rebuilds the coefficient matrix U Σ V†.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = self.coefficients.len();
        let sigma = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(self.coefficients[i], 0.0)
            } else {
                ZERO
            }
        });
        self.left.mat() * sigma * self.right.mat().adjoint()
    }
}

/// Entangled resource state shared across the A|B cut.
#[derive(Debug, Clone)]
pub struct ChannelState {
    d: usize,
    coeffs: DMatrix<Complex64>,
    schmidt: OnceLock<SchmidtForm>,
}

impl ChannelState {
    /// Builds a channel from its full coefficient matrix; the Frobenius norm
    /// must be 1 within [`tol::CONSTRUCT_NORM`].
    pub fn new(coeffs: DMatrix<Complex64>) -> Result<Self> {
        if coeffs.nrows() != coeffs.ncols() {
            return Err(Error::NotSquare {
                rows: coeffs.nrows(),
                cols: coeffs.ncols(),
            });
        }
        let d = coeffs.nrows();
        if !(2..=32).contains(&d) {
            return Err(Error::BadDimension(d));
        }
        let norm = coeffs.norm();
        if (norm - 1.0).abs() > tol::CONSTRUCT_NORM {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            d,
            coeffs: coeffs / Complex64::new(norm, 0.0),
            schmidt: OnceLock::new(),
        })
    }

    /// Channel Σ_m c_m |m⟩_A|m⟩_B from diagonal coefficients.
    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        let d = diag.len();
        if !(2..=32).contains(&d) {
            return Err(Error::BadDimension(d));
        }
        let coeffs = DMatrix::from_fn(d, d, |i, j| if i == j { diag[i] } else { ZERO });
        Self::new(coeffs)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coefficients(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    /// True when every off-diagonal coefficient is below the Schmidt clamp.
    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.d {
            for j in 0..self.d {
                if i != j && self.coeffs[(i, j)].norm() > tol::SCHMIDT_CLAMP {
                    return false;
                }
            }
        }
        true
    }

    /// Two-qudit register state with A first (most significant).
    pub fn to_pure_state(&self) -> PureState {
        let mut amps = Vec::with_capacity(self.d * self.d);
        for j in 0..self.d {
            for k in 0..self.d {
                amps.push(self.coeffs[(j, k)]);
            }
        }
        make_state(&[self.d, self.d], amps).expect("stored coefficients stay normalized")
    }

    /// Schmidt decomposition, computed once and cached.
    pub fn schmidt(&self) -> &SchmidtForm {
        self.schmidt
            .get_or_init(|| decompose_matrix(&self.coeffs))
    }

    /// Largest Schmidt coefficient.
    pub fn schmidt_max(&self) -> f64 {
        self.schmidt().coefficients[0]
    }
}

/// SVD-based Schmidt decomposition of a channel, singular values descending
/// and values below [`tol::SCHMIDT_CLAMP`] clamped to zero.
pub fn schmidt_decompose(channel: &ChannelState) -> SchmidtForm {
    channel.schmidt().clone()
}

fn decompose_matrix(coeffs: &DMatrix<Complex64>) -> SchmidtForm {
    let mut svd = nalgebra::SVD::new(coeffs.clone(), true, true);
    svd.sort_by_singular_values();
    let coefficients = svd
        .singular_values
        .iter()
        .map(|&s| if s < tol::SCHMIDT_CLAMP { 0.0 } else { s })
        .collect();
    SchmidtForm {
        coefficients,
        left: UnitaryMatrix::new(svd.u.expect("U requested")).expect("SVD left factor is unitary"),
        right: UnitaryMatrix::new(svd.v_t.expect("V^T requested").adjoint())
            .expect("SVD right factor is unitary"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn target_state_validation() {
        assert!(matches!(
            TargetState::new(vec![c(1.0, 0.0)]),
            Err(Error::BadDimension(1))
        ));
        assert!(matches!(
            TargetState::new(vec![c(0.6, 0.0), c(0.6, 0.0)]),
            Err(Error::NotNormalized(_))
        ));
        let t = TargetState::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(t.d(), 2);
        let p = t.to_pure_state();
        assert!((p.norm() - 1.0).abs() < 1e-15);
        assert!((t.overlap_probability(&p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_channel_round_trip() {
        let ch = ChannelState::from_diagonal(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        assert!(ch.is_diagonal());
        let s = ch.to_pure_state();
        assert!((s.amplitude(0) - c(0.6, 0.0)).norm() < 1e-15); // |00⟩
        assert!((s.amplitude(3) - c(0.8, 0.0)).norm() < 1e-15); // |11⟩
        assert!((ch.schmidt_max() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn channel_rejects_bad_inputs() {
        let rect = DMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), ZERO]);
        assert!(matches!(
            ChannelState::new(rect),
            Err(Error::NotSquare { .. })
        ));
        let short = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), ZERO, ZERO, ZERO]);
        assert!(matches!(
            ChannelState::new(short),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn schmidt_of_rotated_bell_pair() {
        // (H ⊗ I) applied to the A side of a Bell pair keeps coefficients
        // (1/√2, 1/√2) but rotates the left basis.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let coeffs = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)],
        );
        let ch = ChannelState::new(coeffs.clone()).unwrap();
        assert!(!ch.is_diagonal());
        let form = ch.schmidt();
        assert_eq!(form.rank(), 2);
        assert!((form.coefficients[0] - h).abs() < 1e-12);
        assert!((form.coefficients[1] - h).abs() < 1e-12);
        assert!((form.reconstruct() - coeffs).norm() < 1e-12);
    }

    #[test]
    fn schmidt_sorts_descending_and_clamps() {
        let ch = ChannelState::from_diagonal(&[c(0.28, 0.0), c(0.96, 0.0), ZERO]).unwrap();
        let form = ch.schmidt();
        assert!((form.coefficients[0] - 0.96).abs() < 1e-12);
        assert!((form.coefficients[1] - 0.28).abs() < 1e-12);
        assert_eq!(form.coefficients[2], 0.0);
        assert_eq!(form.rank(), 2);
        assert!((form.reconstruct() - ch.coefficients()).norm() < 1e-10);
    }

    #[test]
    fn schmidt_reconstructs_random_channels() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(417, 0);
        for d in [2usize, 3, 5] {
            for _ in 0..10 {
                let mut m = DMatrix::from_fn(d, d, |_, _| {
                    c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let n = m.norm();
                m /= Complex64::new(n, 0.0);
                let ch = ChannelState::new(m.clone()).unwrap();
                let form = ch.schmidt();
                assert!((form.reconstruct() - &m).norm() < 1e-10);
                let sq: f64 = form.coefficients.iter().map(|s| s * s).sum();
                assert!((sq - 1.0).abs() < 1e-10);
                for w in form.coefficients.windows(2) {
                    assert!(w[0] >= w[1]);
                }
            }
        }
    }
}
