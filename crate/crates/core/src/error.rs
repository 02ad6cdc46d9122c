use thiserror::Error;

/// Errors produced by graph construction, spectral analysis and the filter banks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex index {index} out of range for graph with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("negative or non-finite weight {weight} on edge ({u}, {v})")]
    NegativeWeight { u: usize, v: usize, weight: f64 },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("vertex {0} has zero degree; normalized Laplacian is undefined")]
    ZeroDegreeVertex(usize),

    #[error("graph generation failed to produce a connected graph after {0} attempts")]
    ConnectivityFailure(usize),

    #[error("OddVertexCount: operation requires an even number of vertices, got {0}")]
    OddVertexCount(usize),

    #[error("keep set is empty")]
    EmptyKeepSet,

    #[error("keep set must be a proper subset of the vertices")]
    InvalidKeepSet,

    #[error("interior block of the Laplacian is singular; removed vertices are not connected to the kept set")]
    SingularInteriorBlock,

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("symmetric eigensolver did not converge")]
    ConvergenceFailure,

    #[error("Laplacian has a negative eigenvalue {0:e}")]
    NotPositiveSemidefinite(f64),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("cut-off frequency {lambda_cut} outside the admissible range [{lo}, {hi}]")]
    CutoffOutOfRange { lambda_cut: f64, lo: f64, hi: f64 },

    #[error("invalid kernel parameter: {0}")]
    InvalidKernel(String),

    #[error("perfect reconstruction violated: margin {margin:e} at pair {worst_pair}")]
    PRViolation { margin: f64, worst_pair: usize },

    #[error("synthesis combine matrix is singular: margin {margin:e} at pair {worst_pair}")]
    SingularSynthesis { margin: f64, worst_pair: usize },

    #[error("vertex-domain synthesis matrix is singular (condition estimate {0:e})")]
    SingularVertexSynthesis(f64),

    #[error("fraction {0} outside (0, 1]")]
    FractionOutOfRange(f64),

    #[error("reference signal has zero energy")]
    ZeroReference,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
