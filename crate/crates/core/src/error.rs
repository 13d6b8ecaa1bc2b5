use alloc::string::String;

use crate::bdg::Region;

/// Failure modes of the numerical pipeline.
///
/// Variants split into domain errors (the requested physics has no answer)
/// and numerical guards (the answer exists but the discretization is too
/// coarse to resolve it); see [`Error::is_numerical_guard`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("wavevector is not finite")]
    NonFiniteWavevector,
    #[error("spinors are sampled on different grids")]
    GridMismatch,
    #[error("in-plane magnetization vanishes (theta = {theta})")]
    DegenerateInPlane { theta: f64 },
    #[error("evanescent condition violated: m_par = {m_par} <= |mu_fi| = {mu_fi}")]
    EvanescentConditionViolated { m_par: f64, mu_fi: f64 },
    #[error("no decaying zero-energy mode in the {0:?} region")]
    NoDecayingMode(Region),
    #[error("matching system has no null vector (smallest singular value ratio {ratio:e})")]
    NoZeroMode { ratio: f64 },
    #[error("matching null space is not one-dimensional (singular values {smallest:e}, {second:e})")]
    DegenerateZeroMode { smallest: f64, second: f64 },
    #[error("path step {step} has phase {phase} >= pi/2; refine the path")]
    StepTooCoarse { step: usize, phase: f64 },
    #[error("path step {step} has vanishing overlap")]
    ZeroOverlap { step: usize },
    #[error("no interface-localized zero mode (lowest |E| = {lowest:e}, localization {localization})")]
    NoLocalizedZeroMode { lowest: f64, localization: f64 },
    #[error("return overlap vanishes (|<psi(0)|psi(T)>| = {magnitude:e}); phase undefined")]
    OverlapVanishes { magnitude: f64 },
    #[error("generator is not Hermitian (max deviation {deviation:e})")]
    NonHermitianGenerator { deviation: f64 },
    #[error("tracked eigenbasis jumps at step {step} (overlap {overlap})")]
    BasisDiscontinuity { step: usize, overlap: f64 },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

impl Error {
    /// True for guards that a finer discretization would clear.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::StepTooCoarse { .. } | Error::ZeroOverlap { .. } | Error::BasisDiscontinuity { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: &str) -> Error {
    Error::InvalidParameter(String::from(msg))
}
