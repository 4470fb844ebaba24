//! Random-matrix spacing statistics at desk scale.
//!
//! The crate samples classical random-matrix ensembles, computes their
//! spectra with a dedicated symmetric eigensolver, localizes and unfolds
//! nearest-neighbour spacings, evaluates the universal spacing laws for
//! beta in {1, 2, 4} through sine-kernel determinants, Pfaffian series and
//! a Painleve V representation, and measures how fast empirical spacing
//! distributions approach the universal laws as the matrix size grows.

pub mod eigensolver;
pub mod harness;
pub mod kernels;
pub mod limits;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod spacings;

pub use eigensolver::Spectrum;
pub use harness::{ExperimentConfig, ExperimentResult};
pub use limits::LimitLaw;
pub use sampler::{EnsembleSpec, MatrixSample};
pub use spacings::{EmpiricalMeasure, Window};
