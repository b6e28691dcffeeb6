use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("characteristic polynomial is identically singular")]
    IdenticallySingular,

    #[error("constant polynomial has no roots")]
    ConstantPolynomial,

    #[error("on phase boundary / EP: {0}")]
    OnPhaseBoundary(String),

    #[error("reference on spectrum: min |det(H(k) - E)| = {min_det:e}")]
    ReferenceOnSpectrum { min_det: f64 },

    #[error("EP on grid at k = {k}")]
    EpOnGrid { k: f64 },

    #[error("QR iteration did not converge after {iterations} iterations ({converged} of {dim} eigenvalues found)")]
    NoConvergence {
        iterations: usize,
        converged: usize,
        dim: usize,
    },

    #[error("chain too small: {cells} cells, need at least {required}")]
    ChainTooSmall { cells: usize, required: usize },

    #[error("matrix dimension {0} exceeds the dense solver cap of 2000")]
    TooLarge(usize),

    #[error("not a transition: {0}")]
    NotATransition(String),

    #[error("not circuit-representable: {0}")]
    NotRepresentable(String),

    #[error("resonant singularity; add r0 (condition number {0:e})")]
    ResonantSingularity(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("netlist parse error on line {line}: {message}")]
    Netlist { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
