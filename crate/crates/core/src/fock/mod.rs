//! Few-photon Fock-space algebra over polarized spatial modes.
//!
//! States are sparse maps from occupation kets to complex amplitudes. Mode
//! transformations are single-photon unitaries lifted to the bosonic Fock
//! space, so photon number is conserved by construction.

mod serial;
mod state;
mod unitary;

pub use serial::{StateVectorJson, TermJson};
pub use state::{FockState, PhotonPattern, Polarization, PolarizedMode, PostSelected, StateVector};
pub use unitary::ModeUnitary;

use crate::error::Result;
use num_complex::Complex64;

/// Tolerance for normalization and unitarity checks.
pub const VALIDATION_TOL: f64 = 1e-10;
/// Amplitudes with modulus below this are dropped after every element.
pub const PRUNE_TOL: f64 = 1e-12;
/// Default photon capacity for tensor products.
pub const DEFAULT_MAX_PHOTONS: u32 = 4;

pub fn single_photon(modes: usize, spatial: usize, amps: (Complex64, Complex64)) -> Result<StateVector> {
    StateVector::single_photon(modes, spatial, amps)
}

pub fn tensor(states: &[StateVector]) -> Result<StateVector> {
    StateVector::tensor(states)
}

pub fn apply_unitary(state: &StateVector, u: &ModeUnitary) -> Result<StateVector> {
    u.apply(state)
}

pub fn post_select(state: &StateVector, pattern: &PhotonPattern) -> Result<PostSelected> {
    state.post_select(pattern)
}

pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner_product(b)
}
