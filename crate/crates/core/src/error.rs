use thiserror::Error;

/// Everything that can go wrong while building states, gates, or running a
/// protocol. Numerical tolerance breaches inside a run are reported through
/// result fields, not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("subsystem dimension {0} outside supported range 2..=32")]
    BadDimension(usize),

    #[error("vector norm {0} is too far from 1 to renormalize")]
    NotNormalized(f64),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("target list {0:?} repeats a subsystem")]
    RepeatedTarget(Vec<usize>),

    #[error("operator dimension {got} does not match the targeted subspace dimension {expected}")]
    OperatorSizeMismatch { got: usize, expected: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("shift map entry {value} out of range for dimension {d}")]
    BadShiftMap { value: usize, d: usize },

    #[error("phase table must be a finite {d}x{d} grid of radians")]
    BadPhaseTable { d: usize },

    #[error("completion column {column} out of range for dimension {d}")]
    BadColumn { column: usize, d: usize },

    #[error("filter coefficients need 0 <= alpha <= beta and beta > 0 (got alpha={alpha}, beta={beta})")]
    BadFilterPair { alpha: f64, beta: f64 },

    #[error("channel dimension {channel} does not match target dimension {target}")]
    DimensionMismatch { channel: usize, target: usize },

    #[error("random draw {0} outside the half-open interval [0, 1)")]
    BadDraw(f64),

    #[error("partition must be a nonempty proper subset of the subsystems")]
    BadPartition,

    #[error("matrix is not a density matrix: {0}")]
    BadDensity(String),

    #[error("protocol requires qubit subsystems (d = 2), got d = {0}")]
    QubitOnly(usize),

    #[error("empty subsystem list")]
    EmptySubsystems,
}

pub type Result<T> = std::result::Result<T, Error>;
