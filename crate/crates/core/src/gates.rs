//! Gate constructions for d-level registers.
//!
//! All builders return dense matrices wrapped in [`UnitaryMatrix`], which
//! guarantees `U† U = I` to within [`crate::tol::UNITARY`]. Two-subsystem
//! gates are laid out on the product basis |control, target⟩ with the
//! control digit most significant, matching the register convention in
//! [`crate::state`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::TargetState;
use crate::error::{Error, Result};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square matrix checked for unitarity on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    mat: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    /// Wraps `mat`, verifying that it is square and unitary to within
    /// [`tol::UNITARY`].
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let dim = mat.nrows();
        let product = mat.adjoint() * &mat;
        let mut dev = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let expect = if r == c { ONE } else { ZERO };
                dev = dev.max((product[(r, c)] - expect).norm());
            }
        }
        if dev > tol::UNITARY {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { dim, mat })
    }

    /// Wraps a matrix that is unitary by construction (permutations, phase
    /// diagonals, Householder reflections, products of unitaries).
    pub(crate) fn from_exact(mat: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self {
            dim: mat.nrows(),
            mat,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_exact(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    /// Column-major raw entries; entry (r, c) sits at `c * dim + r`.
    pub fn as_slice(&self) -> &[Complex64] {
        self.mat.as_slice()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_exact(self.mat.adjoint())
    }

    /// Entrywise complex conjugate (also unitary).
    pub fn conj(&self) -> Self {
        Self::from_exact(self.mat.conjugate())
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::OperatorSizeMismatch {
                got: rhs.dim,
                expected: self.dim,
            });
        }
        Ok(Self::from_exact(&self.mat * &rhs.mat))
    }

    /// Kronecker product, `self` most significant.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_exact(self.mat.kronecker(&rhs.mat))
    }

    /// Maximum magnitude of `U† U - I`; handy in tests.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = self.mat.adjoint() * &self.mat;
        let mut dev = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let expect = if r == c { ONE } else { ZERO };
                dev = dev.max((product[(r, c)] - expect).norm());
            }
        }
        dev
    }

    /// True when every entry is within `eps` of the identity.
    pub fn is_identity(&self, eps: f64) -> bool {
        for r in 0..self.dim {
            for c in 0..self.dim {
                let expect = if r == c { ONE } else { ZERO };
                if (self.mat[(r, c)] - expect).norm() > eps {
                    return false;
                }
            }
        }
        true
    }
}

/// Whether a controlled arithmetic gate adds or subtracts its shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Add,
    Subtract,
}

/// Gate families that appear in protocol transcripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    ControlledAdd,
    ControlledSubtract,
    ControlledPhase,
    BranchControlled,
    Completion,
    Filter,
}

impl GateKind {
    pub fn label(self) -> &'static str {
        match self {
            GateKind::ControlledAdd => "controlled-add",
            GateKind::ControlledSubtract => "controlled-subtract",
            GateKind::ControlledPhase => "controlled-phase",
            GateKind::BranchControlled => "branch-controlled",
            GateKind::Completion => "completion",
            GateKind::Filter => "filter",
        }
    }
}

/// Descriptor for a controlled gate: the family, the subsystem dimension,
/// and the per-control-digit shift table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub d: usize,
    pub shift_map: Vec<usize>,
}

impl GateSpec {
    pub fn new(kind: GateKind, d: usize, shift_map: Vec<usize>) -> Result<Self> {
        check_dim(d)?;
        if shift_map.len() != d {
            return Err(Error::LengthMismatch {
                got: shift_map.len(),
                expected: d,
            });
        }
        for &k in &shift_map {
            if k >= d {
                return Err(Error::BadShiftMap { value: k, d });
            }
        }
        Ok(Self { kind, d, shift_map })
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }
}

/// The shift table k_m = m used by the protocol's arithmetic gates.
pub fn identity_shift_map(d: usize) -> Vec<usize> {
    (0..d).collect()
}

fn check_dim(d: usize) -> Result<()> {
    if !(2..=32).contains(&d) {
        return Err(Error::BadDimension(d));
    }
    Ok(())
}

/// Controlled shift on |m⟩|j⟩: the target digit becomes
/// (j ± shift_map[m]) mod d. A permutation, hence exactly unitary.
pub fn controlled_add(d: usize, direction: Direction, shift_map: &[usize]) -> Result<UnitaryMatrix> {
    let kind = match direction {
        Direction::Add => GateKind::ControlledAdd,
        Direction::Subtract => GateKind::ControlledSubtract,
    };
    let spec = GateSpec::new(kind, d, shift_map.to_vec())?;
    let dim = d * d;
    let mut mat = DMatrix::zeros(dim, dim);
    for m in 0..d {
        let k = spec.shift_map[m];
        for j in 0..d {
            let out = match direction {
                Direction::Add => (j + k) % d,
                Direction::Subtract => (j + d - k) % d,
            };
            mat[(m * d + out, m * d + j)] = ONE;
        }
    }
    Ok(UnitaryMatrix::from_exact(mat))
}

/// Diagonal phase gate exp(i·phases[s][k]) on |s⟩|k⟩.
pub fn controlled_phase(d: usize, phases: &[Vec<f64>]) -> Result<UnitaryMatrix> {
    check_dim(d)?;
    if phases.len() != d || phases.iter().any(|row| row.len() != d) {
        return Err(Error::BadPhaseTable { d });
    }
    if phases.iter().flatten().any(|p| !p.is_finite()) {
        return Err(Error::BadPhaseTable { d });
    }
    let dim = d * d;
    let mut mat = DMatrix::zeros(dim, dim);
    for s in 0..d {
        for k in 0..d {
            mat[(s * d + k, s * d + k)] = Complex64::from_polar(1.0, phases[s][k]);
        }
    }
    Ok(UnitaryMatrix::from_exact(mat))
}

/// Unitary whose column `column` equals the unit vector `v`.
///
/// Built from the numerically stable Householder reflection through
/// u = v + phase(v[column])·e_column, with column `column` rescaled by a
/// unit phase so that it reproduces `v` entrywise. The output is a
/// deterministic function of the input.
pub fn unitary_completion(v: &[Complex64], column: usize) -> Result<UnitaryMatrix> {
    let d = v.len();
    check_dim(d)?;
    if column >= d {
        return Err(Error::BadColumn { column, d });
    }
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tol::CONSTRUCT_NORM {
        return Err(Error::NotNormalized(norm));
    }
    let v: Vec<Complex64> = v.iter().map(|a| a / norm).collect();

    let pivot = v[column];
    let delta = if pivot.norm() > 0.0 {
        pivot / pivot.norm()
    } else {
        ONE
    };

    // u = v + delta·e_column gives ‖u‖² = 2(1 + |v[column]|) ≥ 2, so the
    // reflector never degenerates.
    let mut u = v.clone();
    u[column] += delta;
    let unorm_sqr: f64 = u.iter().map(|a| a.norm_sqr()).sum();
    let scale = 2.0 / unorm_sqr;

    let mut mat = DMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let base = if r == c { ONE } else { ZERO };
            mat[(r, c)] = base - scale * u[r] * u[c].conj();
        }
    }
    // The reflection maps e_column to -conj(delta)·v. Rescaling that column
    // by -delta turns it into v exactly; write v to pin it entrywise.
    for r in 0..d {
        mat[(r, column)] = v[r];
    }
    Ok(UnitaryMatrix::from_exact(mat))
}

/// Block unitary W = Σ_m w⁽ᵐ⁾ ⊗ |m⟩⟨m| acting on (work, control) with the
/// control digit least significant. Branch m sends the work digit |m⟩ to the
/// target shifted by m: column m of w⁽ᵐ⁾ is x_{(s+m) mod d}.
pub fn branch_controlled_unitary(target: &TargetState) -> UnitaryMatrix {
    let d = target.d();
    let x = target.amplitudes();
    let dim = d * d;
    let mut mat = DMatrix::zeros(dim, dim);
    for m in 0..d {
        let shifted: Vec<Complex64> = (0..d).map(|s| x[(s + m) % d]).collect();
        let block = unitary_completion(&shifted, m)
            .expect("shifted target amplitudes form a unit vector");
        for r in 0..d {
            for c in 0..d {
                mat[(r * d + m, c * d + m)] = block.entry(r, c);
            }
        }
    }
    UnitaryMatrix::from_exact(mat)
}

/// Entanglement filter for a two-qubit pair (work, flag) with coefficients
/// 0 ≤ alpha ≤ beta and alpha² + beta² = 1 within 1e-10. Identity on the
/// work=0 branch; on the work=1 branch it rescales by alpha/beta and leaks
/// the excess amplitude into flag=1:
///
/// ```text
///         ⎡ 1  0    0       0  ⎤
/// U  =    ⎢ 0  1    0       0  ⎥        s = sqrt(1 - alpha²/beta²)
///         ⎢ 0  0  alpha/beta  s ⎥
///         ⎣ 0  0   -s  alpha/beta ⎦
/// ```
pub fn filter_unitary(alpha: f64, beta: f64) -> Result<UnitaryMatrix> {
    if !(alpha.is_finite() && beta.is_finite())
        || alpha < 0.0
        || beta <= 0.0
        || alpha > beta
        || (alpha * alpha + beta * beta - 1.0).abs() > tol::NORM
    {
        return Err(Error::BadFilterPair { alpha, beta });
    }
    let ratio = alpha / beta;
    let s = (1.0 - ratio * ratio).max(0.0).sqrt();
    let mut mat = DMatrix::identity(4, 4);
    mat[(2, 2)] = Complex64::new(ratio, 0.0);
    mat[(2, 3)] = Complex64::new(s, 0.0);
    mat[(3, 2)] = Complex64::new(-s, 0.0);
    mat[(3, 3)] = Complex64::new(ratio, 0.0);
    Ok(UnitaryMatrix::from_exact(mat))
}

/// Mirror image of [`filter_unitary`] for coefficients 0 ≤ beta ≤ alpha with
/// alpha² + beta² = 1 within 1e-10: identity on the work=1 branch, rescale by
/// beta/alpha on the work=0 branch with the excess leaking into flag=1.
pub fn mirrored_filter_unitary(alpha: f64, beta: f64) -> Result<UnitaryMatrix> {
    if !(alpha.is_finite() && beta.is_finite())
        || beta < 0.0
        || alpha <= 0.0
        || beta > alpha
        || (alpha * alpha + beta * beta - 1.0).abs() > tol::NORM
    {
        return Err(Error::BadFilterPair { alpha, beta });
    }
    let ratio = beta / alpha;
    let s = (1.0 - ratio * ratio).max(0.0).sqrt();
    let mut mat = DMatrix::identity(4, 4);
    mat[(0, 0)] = Complex64::new(ratio, 0.0);
    mat[(0, 1)] = Complex64::new(s, 0.0);
    mat[(1, 0)] = Complex64::new(-s, 0.0);
    mat[(1, 1)] = Complex64::new(ratio, 0.0);
    Ok(UnitaryMatrix::from_exact(mat))
}
