//! Numerical toolkit for a particle minimally coupled to a bosonic reservoir.
//!
//! The reservoir is a continuum of modes `b_k` with `ω_k = |k|`, attached to
//! the particle through `p → p − R`, `R = ∫d³k [f(ω) b_k + f*(ω) b_k†] k`.
//! Everything downstream is a consequence of the coupling function `f(ω)`:
//!
//! * [`reservoir`]: coupling functions, reservoir states, memory kernel γ(t)
//! * [`langevin`]: mean trajectories of the generalized Langevin equation
//! * [`oscillator`]: closed forms for the damped 3D oscillator
//! * [`rates`]: first-order transition probabilities and golden-rule rates
//! * [`tls`]: Markovian decay and coherence of a two-level system
//! * [`field`]: the reservoir as a sourced massless Klein-Gordon field
//!
//! [`quadrature`] is the shared integration engine. Units are `ħ = c = K = 1`
//! throughout, so energies, temperatures and rates are frequencies.

pub mod field;
pub mod langevin;
pub mod oscillator;
pub mod par;
pub mod quadrature;
pub mod rates;
pub mod reservoir;
pub mod table;
pub mod tls;

pub use nalgebra::Vector3;
pub use num_complex::Complex64;

/// Errors surfaced by the physics modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overdamped regime: β = {beta} ≥ 2mω = {critical}")]
    Overdamped { beta: f64, critical: f64 },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("infrared divergence: {0}")]
    InfraredDivergence(String),
    #[error("step size too large: {0}")]
    StepSize(String),
    #[error("perturbation theory violated: transition probability {0} exceeds 1")]
    PerturbationViolated(f64),
    #[error("no Markovian plateau: {0}")]
    NonMarkovian(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
