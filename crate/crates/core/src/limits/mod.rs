//! Universal nearest-neighbour spacing laws for beta in {1, 2, 4}.
//!
//! Three independent routes produce the same distributions:
//! * Fredholm determinants of the sine kernel on a shrinking interval
//!   discretized by Nystrom quadrature ([`gap_fredholm`]),
//! * alternating series of correlation integrals over ordered simplices
//!   ([`gap_series`], [`spacing_cdf_series`]),
//! * a Painleve V sigma-form ODE for the beta = 2 gap probability
//!   ([`painleve_sigma`], [`gap_painleve`]).
//!
//! [`limit_law`] packages a tabulated distribution with interpolation,
//! and the Wigner surmise gives a closed-form approximation used both
//! as a sanity bound and as the far-tail continuation.

mod fredholm;
mod law;
mod painleve;
mod series;

pub use fredholm::gap_fredholm;
pub use law::{limit_law, limit_law_cached, wigner_surmise, wigner_surmise_cdf, LawMode, LimitLaw, LimitMethod};
pub use painleve::{gap_painleve, painleve_sigma, SigmaTable};
pub use series::{gap_series, spacing_cdf_series, spacing_density_series, SeriesResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LimitsError {
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("spacing laws exist for beta 1, 2, 4; got {0}")]
    UnsupportedBeta(u8),
    #[error("sigma-form integration failed: {0}")]
    OdeFailure(String),
    #[error(transparent)]
    Kernel(#[from] crate::kernels::KernelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("law cache: {0}")]
    Cache(String),
}
