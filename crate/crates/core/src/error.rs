use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The plane-wave basis change is singular (sin k = 0).
    #[error("plane-wave basis is singular at k = {re}{im:+}i (|sin k| < 1e-12)")]
    SingularBasis { re: f64, im: f64 },

    /// M22 vanishes on the real axis, so every scattering amplitude diverges.
    #[error("spectral singularity at k = {k}: |M22| = {m22_abs:.3e}")]
    SpectralSingularity { k: f64, m22_abs: f64 },

    #[error("root finder found {found} poles but the winding number on the boundary is {winding}")]
    MissedRoots { found: usize, winding: i64 },

    #[error("Newton iteration failed to converge: {0}")]
    NonConvergence(String),

    #[error("value {value} out of range: {reason}")]
    OutOfRange { value: f64, reason: &'static str },

    #[error("pole branch {branch} lost near gamma = {gamma}")]
    BranchLost { branch: usize, gamma: f64 },

    #[error("eigendecomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("intensity grows by only {decades:.2} decades over the fit window (need 2)")]
    InsufficientGrowth { decades: f64 },
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::MissedRoots { .. }
                | Error::NonConvergence(_)
                | Error::BranchLost { .. }
                | Error::DecompositionFailed(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
