//! Numerical laboratory for quasi-Yamabe gradient solitons on warped products.
//!
//! The soliton equation `Hess F = (R - λ) g + c dF ⊗ dF` reduces, on a warped
//! product `dr² + ψ(r)² g_N`, to an ODE for the warping function
//! `ψ = F' e^{-cF}` and the potential `F`. This crate integrates that ODE in
//! two formulations, starts rotationally symmetric solutions from a power
//! series at the tip, and classifies trajectories against the known regime
//! table.

pub mod classifier;
pub mod error;
pub mod exact;
pub mod export;
pub mod integrator;
pub mod soliton;
pub mod tip;

pub use error::{Error, Result};
