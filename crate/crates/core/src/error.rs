//! Crate-wide error type.

/// Errors raised by the numerical operations.
///
/// `InvalidInput` and `Precondition` indicate caller mistakes (bad
/// parameters, violated preconditions); the remaining variants are
/// runtime failures of a computation that started out well-posed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular vortex configuration: {0}")]
    SingularConfiguration(String),

    #[error("vortex collision at t = {t}: min distance {dist:e} below threshold {threshold:e}")]
    Collision { t: f64, dist: f64, threshold: f64 },

    #[error("under-resolved: {0}")]
    Resolution(String),

    #[error("frame decay violated: {0}")]
    FrameDecay(String),

    #[error("kernel obstruction: {0}")]
    KernelObstruction(String),

    #[error("tail not admissible (Y membership): {0}")]
    YMembership(String),

    #[error("orthogonality precondition failed: {0}")]
    Orthogonality(String),

    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Precondition(_) | Error::Format(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
