//! Shared fixtures for unit tests.

use crate::params::{Constants, CouplingKind, ModelParams};

/// Weak-coupling comparison preset: Ω_P = 5, resonant drive, L fixed by the
/// coupling-ratio condition |α_OF|/℧ = 16 (L = 1000/1024).
pub(crate) fn preset_compare() -> ModelParams {
    ModelParams {
        m_idf: 1e-3,
        omega_idf: 100.0,
        m_mirror: 10.0,
        mho: 0.1,
        lambda: 0.1,
        omega_drive: 100.0,
        length: 0.9765625,
        a0: 1e-4,
        phi0: 0.0,
        gamma: 1e-4,
        temperature: 1000.0,
        gamma_i: 0.0,
        gamma_f: 0.0,
        coupling_kind: CouplingKind::QdotPhi,
        consts: Constants::default(),
        mho_prime_scale: 1.0,
    }
}

/// Same preset in the weaker-coupling variant (Ω_P = 0.05, λ = 0.01) used
/// for the detuning sweep.
pub(crate) fn preset_sweep() -> ModelParams {
    ModelParams { lambda: 0.01, ..preset_compare() }
}
