use thiserror::Error;

/// Errors raised across the transform library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quaternion has zero modulus")]
    ZeroQuaternion,

    #[error("zero base in axis-subalgebra power")]
    ZeroBase,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("|sin(theta)| = {sin_abs:e} is below the floor {floor:e}")]
    ThetaSingular { sin_abs: f64, floor: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("sample grid contains the origin")]
    GridContainsZero,

    #[error("truncation order {requested} needs at least {needed} quadrature nodes, grid has {available}")]
    TruncationTooHigh {
        requested: usize,
        needed: usize,
        available: usize,
    },

    #[error("minimum of the diagonal table sits on the truncation boundary at ({n}, {m})")]
    TruncationSuspect { n: usize, m: usize },

    #[error("harmonic degree {0} is not supported (only 0 and 1)")]
    UnsupportedDegree(u32),

    #[error("function has zero norm")]
    ZeroFunction,

    #[error("inner product <f,f> carries imaginary residue {residue:e} (norm^2 = {norm_sq:e})")]
    ImaginaryResidue { residue: f64, norm_sq: f64 },

    #[error("quadrature would need {needed} nodes to resolve the kernel (budget {budget})")]
    QuadratureUnresolved { needed: usize, budget: usize },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
