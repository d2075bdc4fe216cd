use thiserror::Error;

/// Everything that can go wrong while building profiles or running solvers.
///
/// Numerical quantities are carried as `f64` regardless of the scalar type the
/// failing routine was instantiated with.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("segments overlap, leave a gap, or are out of order near t = {0}")]
    SegmentOrder(f64),
    #[error("asymptotic squared frequency must be positive, got {0}")]
    NonPositivePlateau(f64),
    #[error("squared frequency becomes non-positive near t = {0}")]
    NonPositiveFrequency(f64),
    #[error("background is not asymptotically constant: {0}")]
    NotAsymptoticallyConstant(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("expression error: {0}")]
    Expression(String),

    #[error("non-finite state encountered at t = {0}")]
    NonFinite(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("step budget exhausted at t = {0}")]
    StepLimit(f64),
    #[error("Wronskian drift {drift:e} exceeds tolerance {tol:e}")]
    WronskianDrift { drift: f64, tol: f64 },
    #[error("Bogoliubov normalization |alpha|^2 - |beta|^2 = {0} deviates from 1")]
    Normalization(f64),
    #[error("Ermakov amplitude fell below the positivity floor near t = {0}")]
    RhoFloor(f64),

    #[error("plateau window too short: {0}")]
    PlateauTooShort(String),
    #[error("asymptotic fit residual {residual:e} exceeds tolerance {tol:e}")]
    FitResidual { residual: f64, tol: f64 },
    #[error("trajectory is already unexcited (no extrema on the plateau)")]
    AlreadyUnexcited,
    #[error("extremum index {index} out of range ({available} available)")]
    ExtremumIndex { index: usize, available: usize },
    #[error("continuation does not match the stage-I solution at t1: {0}")]
    ContinuityMismatch(String),

    #[error("energy {energy} does not exceed the asymptotic potential {asymptote}")]
    BelowAsymptote { energy: f64, asymptote: f64 },
    #[error("refinement did not converge: {0}")]
    NonConvergent(String),
    #[error("|f(gamma)| = {0:e} is too small for a phase to be defined")]
    DegenerateZeta(f64),
    #[error("duality check requires equal asymptotic plateaus, got {0} and {1}")]
    UnequalPlateaus(f64, f64),
    #[error("invalid Kay-Moses parameters: {0}")]
    InvalidKappas(String),

    #[error("state is mixed: det cov = {0} (pure states have 1/4)")]
    MixedState(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidProfile(_)
                | Error::SegmentOrder(_)
                | Error::NonPositivePlateau(_)
                | Error::NonPositiveFrequency(_)
                | Error::NotAsymptoticallyConstant(_)
                | Error::InvalidArgument(_)
                | Error::Expression(_)
                | Error::InvalidKappas(_)
                | Error::UnequalPlateaus(..)
                | Error::BelowAsymptote { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
