//! Microscopic optomechanics of a point mirror whose surface-charge dynamics
//! are carried by an internal oscillator coupled to a scalar field.
//!
//! The crate covers the full pipeline: mirror reflection/transmission
//! coefficients for both coupling variants ([`optics`]), the effective
//! bilinear couplings between mirror, internal oscillator and field
//! ([`couplings`]), Gaussian-state covariance algebra and logarithmic
//! negativity ([`gaussian`]), drift/diffusion builders and Lyapunov
//! covariance evolution for the coupled system and its boundary-condition
//! baseline ([`dynamics`]), and scenario-driven experiments with CSV/JSON/SVG
//! emission ([`scenario`]).

pub mod couplings;
pub mod dynamics;
mod error;
pub mod gaussian;
pub mod optics;
pub mod params;
pub mod plot;
pub mod scenario;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
