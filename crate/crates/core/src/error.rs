use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),

    #[error("band gap closed: min |h(k)| = {min_abs:e} <= {tol:e}")]
    GapClosed { min_abs: f64, tol: f64 },

    #[error("K-blocks require periodic boundaries, got {0:?}")]
    BoundaryMismatch(crate::model::Boundary),

    #[error("eigensolver failed to converge on {provenance}")]
    ConvergenceFailure { provenance: String },

    #[error("reference point -{epsilon:e} lies on the spectrum at K = {k}")]
    ReferenceOnSpectrum { epsilon: f64, k: f64 },

    #[error("winding methods disagree: log-det = {log_det}, branch tracking = {branch}")]
    MethodDisagreement { log_det: i64, branch: i64 },

    #[error("winding accumulation not integral: raw = {raw}, residual = {residual}")]
    NonIntegralWinding { raw: f64, residual: f64 },

    #[error("steady state is degenerate ({count} eigenvalues below {zero_tol:e})")]
    DegenerateSteadyState { count: usize, zero_tol: f64 },

    #[error("no steady eigenvalue found")]
    NoSteadyState,

    #[error("eigenvectors were not computed")]
    MissingEigenvectors,

    #[error("density matrix not positive: min eigenvalue {min_eigenvalue:e}")]
    NonPositive { min_eigenvalue: f64 },

    #[error("spec is outside the analytically solved families: {0}")]
    UnsupportedFamily(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("integration unstable at t = {t}: {reason}")]
    StepInstability { t: f64, reason: String },

    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),

    #[error("site ({sublattice:?}, {cell}) outside lattice of {cells} cells")]
    SiteOutOfRange {
        sublattice: crate::model::Sublattice,
        cell: usize,
        cells: usize,
    },

    #[error("dense superoperator of dimension {dim} needs {bytes} bytes, budget is {budget}")]
    DimensionTooLarge { dim: usize, bytes: usize, budget: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("matrix format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidSpec(_)
                | Error::Config(_)
                | Error::Format(_)
                | Error::SiteOutOfRange { .. }
                | Error::InvalidInitialState(_)
                | Error::UnsupportedFamily(_)
                | Error::BoundaryMismatch(_)
                | Error::Io(_)
        )
    }
}
