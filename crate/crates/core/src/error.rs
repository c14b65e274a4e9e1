use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("invalid conformal factor: {0}")]
    InvalidFactor(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sector assembly needs a rotation-invariant factor; got a coupled f(s, phi)")]
    CoupledFactor,

    #[error("geodesic is not elliptic generic ({0})")]
    NotEllipticGeneric(String),

    #[error("Jacobi integration failed: {0}")]
    Integration(String),

    #[error("beam under-resolved: sigma = {sigma:.4e} < 8 h = {limit:.4e}")]
    UnderResolved { sigma: f64, limit: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("LDL^T factorization broke down at shift {shift:e} after {retries} retries")]
    Breakdown { shift: f64, retries: usize },

    #[error("coupled grid has {unknowns} unknowns, budget is {limit}")]
    MemoryBudget { unknowns: usize, limit: usize },

    #[error("branch {j} is near a crossing at t = {t}: gap {gap:e} <= floor {floor:e}")]
    NearCrossing { j: usize, t: f64, gap: f64, floor: f64 },

    #[error("window [{lo}, {hi}] at t = {t} for m = {m} contains no eigenvalue")]
    CaptureFailure { m: u32, t: f64, lo: f64, hi: f64 },

    #[error("eigenvalue {index} moved by {shift:e} when the truncation box was doubled")]
    TruncationSensitivity { index: usize, shift: f64 },

    #[error("quasimode width {width:.4e} is not below a/3 = {limit:.4e}")]
    WidthPrecondition { width: f64, limit: f64 },

    #[error("cone violation: {0}")]
    ConeViolation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Configuration problems map to exit status 2, everything else to 3.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
