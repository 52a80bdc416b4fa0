use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("lattice has {sites} sites, above the configured maximum of {max}")]
    TooManySites { sites: usize, max: usize },
    #[error("coupling table is not symmetric at ({i}, {j})")]
    AsymmetricCouplings { i: usize, j: usize },
    #[error("Fourier factor at mode {mode:?} has imaginary part {imag:e}")]
    ComplexFourierFactor { mode: Vec<usize>, imag: f64 },
    #[error("time grid must be ascending and start at a non-negative time")]
    BadTimeGrid,
    #[error("norm drifted to {norm} (tolerance {tolerance:e}) at t = {time}")]
    NormDrift { time: f64, norm: f64, tolerance: f64 },
    #[error("eigensolver failed to converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error(
        "integrator drift not reduced below tolerance after {halvings} step halvings \
         (energy drift {energy_drift:e}, spin-length drift {length_drift:e})"
    )]
    IntegratorDrift { halvings: usize, energy_drift: f64, length_drift: f64 },
    #[error("fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("{0}")]
    Analysis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
