//! Pure states of registers built from d-level subsystems.
//!
//! A register with dimensions [d0, d1, ..., d_{k-1}] stores its amplitudes
//! in a flat vector indexed with subsystem 0 most significant:
//! |a, b, c⟩ sits at (a·d1 + b)·d2 + c. All operations are pure functions
//! that return fresh states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::gates::UnitaryMatrix;
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Normalized pure state of a multi-qudit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, flat: usize) -> Complex64 {
        self.amps[flat]
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Flat index of the basis ket with the given digits.
    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::LengthMismatch {
                got: digits.len(),
                expected: self.dims.len(),
            });
        }
        let mut flat = 0usize;
        for (i, (&dig, &d)) in digits.iter().zip(&self.dims).enumerate() {
            if dig >= d {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    count: d,
                });
            }
            flat = flat * d + dig;
        }
        Ok(flat)
    }

    /// Digit expansion of a flat index, subsystem 0 first.
    pub fn digits_of(&self, flat: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.dims.len()];
        let mut rem = flat;
        for i in (0..self.dims.len()).rev() {
            digits[i] = rem % self.dims[i];
            rem /= self.dims[i];
        }
        digits
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::EmptySubsystems);
    }
    for &d in dims {
        if !(2..=32).contains(&d) {
            return Err(Error::BadDimension(d));
        }
    }
    Ok(())
}

/// Builds a register state, renormalizing amplitudes whose norm is within
/// [`tol::CONSTRUCT_NORM`] of 1 and rejecting anything further out.
pub fn make_state(dims: &[usize], amps: Vec<Complex64>) -> Result<PureState> {
    check_dims(dims)?;
    let expected: usize = dims.iter().product();
    if amps.len() != expected {
        return Err(Error::LengthMismatch {
            got: amps.len(),
            expected,
        });
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tol::CONSTRUCT_NORM {
        return Err(Error::NotNormalized(norm));
    }
    let amps = amps.into_iter().map(|a| a / norm).collect();
    Ok(PureState {
        dims: dims.to_vec(),
        amps,
    })
}

/// Computational basis ket |digits⟩.
pub fn basis_state(dims: &[usize], digits: &[usize]) -> Result<PureState> {
    check_dims(dims)?;
    let total: usize = dims.iter().product();
    let mut amps = vec![ZERO; total];
    let probe = PureState {
        dims: dims.to_vec(),
        amps: amps.clone(),
    };
    let flat = probe.index_of(digits)?;
    amps[flat] = Complex64::new(1.0, 0.0);
    Ok(PureState {
        dims: dims.to_vec(),
        amps,
    })
}

/// Tensor product with `left` as the most significant subsystems.
pub fn tensor(left: &PureState, right: &PureState) -> PureState {
    let mut dims = left.dims.clone();
    dims.extend_from_slice(&right.dims);
    let mut amps = Vec::with_capacity(left.amps.len() * right.amps.len());
    for a in &left.amps {
        for b in &right.amps {
            amps.push(a * b);
        }
    }
    PureState { dims, amps }
}

/// Applies `u` to the ordered subsystem list `targets`, leaving the rest
/// untouched. The operator basis matches the targets' order, first target
/// most significant.
pub fn apply_unitary(state: &PureState, u: &UnitaryMatrix, targets: &[usize]) -> Result<PureState> {
    let n = state.dims.len();
    if targets.is_empty() {
        return Err(Error::EmptySubsystems);
    }
    let mut seen = vec![false; n];
    for &t in targets {
        if t >= n {
            return Err(Error::IndexOutOfRange { index: t, count: n });
        }
        if seen[t] {
            return Err(Error::RepeatedTarget(targets.to_vec()));
        }
        seen[t] = true;
    }
    let sub: usize = targets.iter().map(|&t| state.dims[t]).product();
    if u.dim() != sub {
        return Err(Error::OperatorSizeMismatch {
            got: u.dim(),
            expected: sub,
        });
    }

    let strides = state.strides();
    // Flat offset contributed by each operator basis index.
    let mut offsets = vec![0usize; sub];
    for (combo, slot) in offsets.iter_mut().enumerate() {
        let mut rem = combo;
        let mut off = 0usize;
        for &t in targets.iter().rev() {
            let d = state.dims[t];
            off += (rem % d) * strides[t];
            rem /= d;
        }
        *slot = off;
    }
    let others: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();
    let base_count: usize = others.iter().map(|&o| state.dims[o]).product();

    let raw = u.as_slice(); // column-major
    let mut out = state.amps.clone();
    let mut gathered = vec![ZERO; sub];
    for base_combo in 0..base_count {
        let mut rem = base_combo;
        let mut base = 0usize;
        for &o in others.iter().rev() {
            let d = state.dims[o];
            base += (rem % d) * strides[o];
            rem /= d;
        }
        for (c, g) in gathered.iter_mut().enumerate() {
            *g = state.amps[base + offsets[c]];
        }
        for r in 0..sub {
            let mut acc = ZERO;
            for (c, g) in gathered.iter().enumerate() {
                acc += raw[c * sub + r] * g;
            }
            out[base + offsets[r]] = acc;
        }
    }
    Ok(PureState {
        dims: state.dims.clone(),
        amps: out,
    })
}

/// Reduced density matrix of the single subsystem `keep`.
pub fn partial_trace(state: &PureState, keep: usize) -> Result<DensityMatrix> {
    let n = state.dims.len();
    if keep >= n {
        return Err(Error::IndexOutOfRange {
            index: keep,
            count: n,
        });
    }
    let d = state.dims[keep];
    let strides = state.strides();
    let stride = strides[keep];
    let others: Vec<usize> = (0..n).filter(|&i| i != keep).collect();
    let rest_count: usize = others.iter().map(|&o| state.dims[o]).product();

    let mut rho = DMatrix::zeros(d, d);
    for combo in 0..rest_count {
        let mut rem = combo;
        let mut base = 0usize;
        for &o in others.iter().rev() {
            let dd = state.dims[o];
            base += (rem % dd) * strides[o];
            rem /= dd;
        }
        for i in 0..d {
            let ai = state.amps[base + i * stride];
            for j in 0..d {
                rho[(i, j)] += ai * state.amps[base + j * stride].conj();
            }
        }
    }
    DensityMatrix::new(rho)
}

/// Number of nonzero Schmidt coefficients across the cut
/// (partition | complement), counting singular values above `tol`.
pub fn schmidt_rank(state: &PureState, partition: &[usize], tol: f64) -> Result<usize> {
    let n = state.dims.len();
    if partition.is_empty() || partition.len() >= n {
        return Err(Error::BadPartition);
    }
    let mut seen = vec![false; n];
    for &p in partition {
        if p >= n {
            return Err(Error::IndexOutOfRange { index: p, count: n });
        }
        if seen[p] {
            return Err(Error::BadPartition);
        }
        seen[p] = true;
    }
    let rows_dims: Vec<usize> = (0..n).filter(|&i| seen[i]).collect();
    let cols_dims: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
    let rows: usize = rows_dims.iter().map(|&i| state.dims[i]).product();
    let cols: usize = cols_dims.iter().map(|&i| state.dims[i]).product();

    let mut mat = DMatrix::zeros(rows, cols);
    for (flat, amp) in state.amps.iter().enumerate() {
        let digits = state.digits_of(flat);
        let mut r = 0usize;
        for &i in &rows_dims {
            r = r * state.dims[i] + digits[i];
        }
        let mut c = 0usize;
        for &i in &cols_dims {
            c = c * state.dims[i] + digits[i];
        }
        mat[(r, c)] = *amp;
    }
    let svd = nalgebra::SVD::new_unordered(mat, false, false);
    Ok(svd.singular_values.iter().filter(|&&s| s > tol).count())
}
