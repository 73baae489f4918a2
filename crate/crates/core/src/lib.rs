//! Twisted Alexander invariants, Ruelle zeta data and cusp contributions for
//! one-cusped hyperbolic 3-manifolds.

pub mod alexander;
pub mod cuspterms;
pub mod lauralg;
pub mod par;
pub mod presentation;
pub mod special;
pub mod laplace;
pub mod quad;
pub mod ruelle;
pub mod selftest;
pub mod spectrum;
pub mod verdict;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// bad input: syntax, failed validation, out-of-range parameters
    Validation,
    /// valid input on which a computation failed
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Presentation(#[from] presentation::PresentationError),
    #[error(transparent)]
    Alexander(#[from] alexander::AlexanderError),
    #[error(transparent)]
    Spectrum(#[from] spectrum::SpectrumError),
    #[error(transparent)]
    Ruelle(#[from] ruelle::RuelleError),
    #[error(transparent)]
    Laplace(#[from] laplace::LaplaceError),
    #[error(transparent)]
    Mero(#[from] laplace::MeroError),
    #[error(transparent)]
    Cusp(#[from] cuspterms::CuspError),
    #[error(transparent)]
    Verdict(#[from] verdict::VerdictError),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use cuspterms::CuspError;
        match self {
            Error::Presentation(_) | Error::Spectrum(_) | Error::Ruelle(_) | Error::Verdict(_) => ErrorKind::Validation,
            Error::Alexander(alexander::AlexanderError::ComplexConditionViolation) => ErrorKind::Validation,
            Error::Alexander(_) | Error::Laplace(_) | Error::Mero(_) => ErrorKind::Computation,
            Error::Cusp(CuspError::ExtrapolationUnstable(_)) => ErrorKind::Computation,
            Error::Cusp(_) => ErrorKind::Validation,
        }
    }
}
