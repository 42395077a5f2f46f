//! Effective bilinear coupling constants of the interaction Hamiltonian,
//! the boundary-condition coupling, and the classical driven amplitudes.

use num_complex::Complex64;

use crate::error::Result;
use crate::optics::{reflection, reflection_qdotphi};
use crate::params::{derive, CouplingKind, ModelParams};

/// The effective single-excitation couplings. `alpha_mf` keeps its two
/// addends separately: the part mediated by the internal oscillator's
/// quantum fluctuations and the part from the classical surface current,
/// so that `alpha_mf = alpha_mf_prefactor * (fluct + classical)` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet {
    /// idf-field coupling, purely imaginary: −i(λ/2)√(Ω/(mωε₀L)).
    pub alpha_of: Complex64,
    /// idf-mirror coupling: (ΩΦ₀λ/(2c))√(Ω/(mM℧′)) with the drive phase.
    pub alpha_om: Complex64,
    /// Mirror-field coupling: prefactor · (fluct + classical).
    pub alpha_mf: Complex64,
    /// (ΩA₀/L)√(ħ/(2M℧′)) e^{iφ₀}.
    pub alpha_mf_prefactor: Complex64,
    /// −iλ²/(2mcωε₀), the fluctuation-mediated addend.
    pub alpha_mf_fluct: Complex64,
    /// R*(ω) of the q̇Φ variant, the classical-current addend.
    pub alpha_mf_classical: Complex64,
    /// Boundary-condition coupling (ω/L)·Z_ZPM·A₀·e^{iφ₀}; λ-independent.
    pub beta_mf: Complex64,
    /// Renormalized mechanical frequency.
    pub mho_prime: f64,
}

/// Evaluate all effective couplings. The q̇Φ reflection coefficient enters
/// `alpha_mf` regardless of the configured optics variant.
pub fn compute_couplings(p: &ModelParams) -> Result<CouplingSet> {
    let d = derive(p)?;
    let c = &p.consts;
    let phase = Complex64::from_polar(1.0, p.phi0);

    let alpha_of = Complex64::new(0.0, -1.0)
        * (p.lambda / 2.0)
        * (p.omega_idf / (p.m_idf * p.omega_drive * c.eps0 * p.length)).sqrt();

    let alpha_om = phase
        * (p.omega_idf * d.phi0_dim * p.lambda / (2.0 * c.c))
        * (p.omega_idf / (p.m_idf * p.m_mirror * d.mho_prime)).sqrt();

    let prefactor = phase
        * (p.omega_idf * p.a0 / p.length)
        * (c.hbar / (2.0 * p.m_mirror * d.mho_prime)).sqrt();
    let fluct = Complex64::new(
        0.0,
        -p.lambda * p.lambda / (2.0 * p.m_idf * c.c * p.omega_drive * c.eps0),
    );
    let classical = reflection_qdotphi(p.omega_drive, p).r.conj();
    let alpha_mf = prefactor * (fluct + classical);

    let beta_mf = phase * (p.omega_drive / p.length) * d.z_zpm * p.a0;

    Ok(CouplingSet {
        alpha_of,
        alpha_om,
        alpha_mf,
        alpha_mf_prefactor: prefactor,
        alpha_mf_fluct: fluct,
        alpha_mf_classical: classical,
        beta_mf,
        mho_prime: d.mho_prime,
    })
}

/// Quantization length that realizes a target |α_OF| at otherwise fixed
/// parameters: L = λ²Ω/(4mωε₀ |α_OF|²).
pub fn length_for_alpha_of(p: &ModelParams, target_alpha_of: f64) -> f64 {
    let c = &p.consts;
    p.lambda * p.lambda * p.omega_idf
        / (4.0 * p.m_idf * p.omega_drive * c.eps0 * target_alpha_of * target_alpha_of)
}

/// Both sides of the weak-coupling reduction α_MF ≈ −β_MF/√2
/// (valid for λ² ≪ 2mωε₀c and R* → −1) and their relative difference.
#[derive(Debug, Clone, Copy)]
pub struct WeakCouplingCheck {
    pub alpha_mf: Complex64,
    pub minus_beta_over_sqrt2: Complex64,
    pub rel_err: f64,
}

pub fn weak_coupling_reduction_check(p: &ModelParams) -> Result<WeakCouplingCheck> {
    let cs = compute_couplings(p)?;
    let reference = -cs.beta_mf / Complex64::new(std::f64::consts::SQRT_2, 0.0);
    let rel_err = if reference.norm() == 0.0 {
        0.0
    } else {
        (cs.alpha_mf - reference).norm() / reference.norm()
    };
    Ok(WeakCouplingCheck { alpha_mf: cs.alpha_mf, minus_beta_over_sqrt2: reference, rel_err })
}

/// Steady-state induced surface-charge current
/// λq̄̇(t) = −2iε₀Ωc Φ₀ e^{−iωt} R(ω) + c.c., amplitude 4ε₀Ωc|Φ₀||R|.
pub fn classical_surface_current(t: f64, p: &ModelParams) -> Result<f64> {
    let d = derive(p)?;
    let c = &p.consts;
    let phi0 = Complex64::from_polar(d.phi0_dim, p.phi0);
    let r = reflection(p.omega_drive, p, p.coupling_kind).r;
    let z = Complex64::new(0.0, -2.0 * c.eps0 * p.omega_idf * c.c) * phi0 * r;
    Ok(2.0 * (z * Complex64::from_polar(1.0, -p.omega_drive * t)).re)
}

/// Driven steady-state amplitude of the internal oscillator,
/// q(t) = −i(Ωλ/m) Φ₀ · T(ω)/(ω²−Ω²) · e^{−iωt} + c.c.
/// The ratio T(ω)/(ω²−Ω²) is evaluated analytically (the transmission zero
/// at resonance cancels the pole), so ω = Ω is an ordinary point.
pub fn classical_idf_amplitude(t: f64, p: &ModelParams) -> Result<f64> {
    let d = derive(p)?;
    if p.lambda == 0.0 {
        return Ok(0.0);
    }
    let c = &p.consts;
    let omega = p.omega_drive;
    let omega0 = p.omega_idf;
    // T(ω)/(ω²−Ω²) = pref_d/(i·s + d) with d = pref_d·(ω²−Ω²)
    let (s, pref_d) = match p.coupling_kind {
        CouplingKind::QPhi => (p.lambda * p.lambda * c.c, 2.0 * p.m_idf * omega * c.eps0),
        CouplingKind::QdotPhi => (p.lambda * p.lambda * omega, 2.0 * p.m_idf * c.eps0 * c.c),
    };
    let denom = Complex64::new(pref_d * (omega * omega - omega0 * omega0), s);
    let ratio = Complex64::new(pref_d, 0.0) / denom;
    let phi0 = Complex64::from_polar(d.phi0_dim, p.phi0);
    let z = Complex64::new(0.0, -omega0 * p.lambda / p.m_idf) * phi0 * ratio;
    Ok(2.0 * (z * Complex64::from_polar(1.0, -omega * t)).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::preset_compare;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn alpha_of_magnitude_at_compare_preset() {
        let cs = compute_couplings(&preset_compare()).unwrap();
        assert_relative_eq!(cs.alpha_of.norm(), 1.6, max_relative = 1e-12);
        assert_relative_eq!(cs.alpha_of.norm() / 0.1, 16.0, max_relative = 1e-12);
        // purely imaginary, negative branch
        assert_eq!(cs.alpha_of.re, 0.0);
        assert!(cs.alpha_of.im < 0.0);
    }

    #[test]
    fn length_inversion_recovers_preset_length() {
        let p = preset_compare();
        let l = length_for_alpha_of(&p, 16.0 * p.mho);
        assert_relative_eq!(l, 0.9765625, max_relative = 1e-12);
    }

    #[test]
    fn decoupled_limit_lambda_zero() {
        let mut p = preset_compare();
        p.lambda = 0.0;
        let cs = compute_couplings(&p).unwrap();
        assert_eq!(cs.alpha_of, Complex64::new(0.0, 0.0));
        assert_eq!(cs.alpha_om, Complex64::new(0.0, 0.0));
        // R = 0 and the fluctuation addend vanishes, so α_MF = 0 too
        assert_eq!(cs.alpha_mf, Complex64::new(0.0, 0.0));
        assert!(cs.beta_mf.norm() > 0.0);
    }

    #[test]
    fn undriven_limit_a0_zero() {
        let mut p = preset_compare();
        p.a0 = 0.0;
        let cs = compute_couplings(&p).unwrap();
        let reference = compute_couplings(&preset_compare()).unwrap();
        assert_eq!(cs.alpha_om, Complex64::new(0.0, 0.0));
        assert_eq!(cs.alpha_mf, Complex64::new(0.0, 0.0));
        assert_eq!(cs.beta_mf, Complex64::new(0.0, 0.0));
        // α_OF is drive-independent
        assert_eq!(cs.alpha_of, reference.alpha_of);
    }

    #[test]
    fn alpha_mf_decomposition_is_exact() {
        let cs = compute_couplings(&preset_compare()).unwrap();
        let rebuilt = cs.alpha_mf_prefactor * (cs.alpha_mf_fluct + cs.alpha_mf_classical);
        assert_eq!(cs.alpha_mf, rebuilt);
        // At resonance the classical addend is R* = −1
        assert_abs_diff_eq!(cs.alpha_mf_classical.re, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cs.alpha_mf_classical.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn fluct_to_classical_ratio_is_omega_p_over_omega_r() {
        let mut p = preset_compare();
        p.omega_drive = 103.0; // off resonance so |R| < 1
        let d = derive(&p).unwrap();
        let cs = compute_couplings(&p).unwrap();
        let r_abs = cs.alpha_mf_classical.norm();
        let expect = d.omega_p / (p.omega_drive * r_abs);
        assert_relative_eq!(
            cs.alpha_mf_fluct.norm() / cs.alpha_mf_classical.norm(),
            expect,
            max_relative = 1e-12
        );
    }

    fn params_with_plasma_ratio(ratio: f64) -> ModelParams {
        // Ω_P/ω = ratio at resonance (ω = Ω), natural units
        let mut p = preset_compare();
        let omega_p = ratio * p.omega_drive;
        p.lambda = (2.0 * p.m_idf * omega_p).sqrt();
        p
    }

    #[test]
    fn weak_coupling_reduction_small_plasma_frequency() {
        let p = params_with_plasma_ratio(1e-4);
        let chk = weak_coupling_reduction_check(&p).unwrap();
        assert!(chk.rel_err < 1e-3, "rel_err = {}", chk.rel_err);
    }

    #[test]
    fn weak_coupling_reduction_fails_at_strong_coupling() {
        let p = params_with_plasma_ratio(1.0);
        let chk = weak_coupling_reduction_check(&p).unwrap();
        assert!(chk.rel_err > 0.1, "rel_err = {}", chk.rel_err);
    }

    #[test]
    fn weak_coupling_reduction_undriven_is_zero() {
        let mut p = params_with_plasma_ratio(1e-4);
        p.a0 = 0.0;
        let chk = weak_coupling_reduction_check(&p).unwrap();
        assert_eq!(chk.rel_err, 0.0);
    }

    #[test]
    fn surface_current_vanishes_without_coupling() {
        let mut p = preset_compare();
        p.lambda = 0.0;
        for &t in &[0.0, 0.3, 1.7] {
            assert_eq!(classical_surface_current(t, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn surface_current_at_resonance_is_sinusoidal() {
        // R = −1 (q̇Φ at ω = Ω): −2iε₀ΩcΦ₀e^{−iωt}(−1) + c.c. = 4ε₀ΩcΦ₀ sin(ωt)
        let p = preset_compare();
        let d = derive(&p).unwrap();
        let amp = 4.0 * p.omega_idf * d.phi0_dim;
        for &t in &[0.0, 0.01, 0.02, 0.05, 0.11] {
            let got = classical_surface_current(t, &p).unwrap();
            let expect = amp * (p.omega_drive * t).sin();
            assert_abs_diff_eq!(got, expect, epsilon = 1e-12 * amp.abs().max(1.0));
        }
    }

    #[test]
    fn surface_current_amplitude_linear_in_drive() {
        let p1 = preset_compare();
        let mut p2 = preset_compare();
        p2.a0 *= 2.0;
        let t = 0.004;
        let a = classical_surface_current(t, &p1).unwrap();
        let b = classical_surface_current(t, &p2).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-12);
    }

    #[test]
    fn idf_amplitude_zero_without_drive_or_coupling() {
        let mut p = preset_compare();
        p.a0 = 0.0;
        assert_eq!(classical_idf_amplitude(0.3, &p).unwrap(), 0.0);
        let mut p = preset_compare();
        p.lambda = 0.0;
        assert_eq!(classical_idf_amplitude(0.3, &p).unwrap(), 0.0);
    }

    #[test]
    fn idf_amplitude_linear_in_lambda_for_weak_coupling() {
        // λ → 0: T → 1 and q(t) → −iωλ/(m(ω²−Ω²))·(Ω/ω)Φ₀e^{−iωt} + c.c.
        let mut p = preset_compare();
        p.omega_drive = 150.0;
        p.lambda = 1e-7;
        let d = derive(&p).unwrap();
        let t = 0.013;
        let pref = -p.omega_drive * p.lambda
            / (p.m_idf * (p.omega_drive.powi(2) - p.omega_idf.powi(2)))
            * (p.omega_idf / p.omega_drive)
            * d.phi0_dim;
        // −i e^{−iωt} + c.c. = −2 sin(ωt), so q(t) = 2·pref·sin(ωt) with the
        // sign of the pole factor folded into pref
        let expect = 2.0 * pref * (p.omega_drive * t).sin();
        let got = classical_idf_amplitude(t, &p).unwrap();
        assert_relative_eq!(got, expect, max_relative = 1e-6);
    }

    #[test]
    fn idf_amplitude_resonant_limit_is_finite_and_continuous() {
        let p = preset_compare();
        let t = 0.007;
        let at_res = classical_idf_amplitude(t, &p).unwrap();
        assert!(at_res.is_finite());
        for sign in [-1.0, 1.0] {
            let mut q = p.clone();
            q.omega_drive = p.omega_idf * (1.0 + sign * 1e-6);
            let near = classical_idf_amplitude(t, &q).unwrap();
            assert_relative_eq!(near, at_res, max_relative = 1e-4);
        }
        // closed-form value of the limit: |q| amplitude = 4ε₀c/λ·Φ₀ at R = −1
        let d = derive(&p).unwrap();
        let expect_amp = 2.0 * 2.0 / p.lambda * d.phi0_dim;
        let got_amp = (0..2000)
            .map(|i| classical_idf_amplitude(i as f64 * 3.2e-4, &p).unwrap().abs())
            .fold(0.0f64, f64::max);
        assert_relative_eq!(got_amp, expect_amp, max_relative = 1e-3);
    }

    #[test]
    fn alpha_mf_peaks_at_zero_detuning_weak_coupling() {
        // Ω_P = 0.05 ≪ Ω: the classical addend dominates and |R|² peaks at Δ = 0
        let mut best = (f64::NEG_INFINITY, f64::NAN);
        for k in -12..=12 {
            let mut p = crate::testutil::preset_sweep();
            let delta = k as f64 * 0.25 * p.mho;
            p.omega_drive = p.omega_idf + delta;
            let cs = compute_couplings(&p).unwrap();
            if cs.alpha_mf.norm() > best.0 {
                best = (cs.alpha_mf.norm(), delta);
            }
        }
        assert_eq!(best.1, 0.0);
    }

    proptest! {
        /// Heavier internal oscillator ⇒ weaker effective couplings;
        /// |α_OM|, |α_MF| scale as 1/√M up to the tiny ℧′ correction.
        #[test]
        fn mass_scalings(factor in 1.5f64..50.0) {
            let p = preset_compare();
            let base = compute_couplings(&p).unwrap();

            let mut heavier_idf = p.clone();
            heavier_idf.m_idf *= factor;
            let h = compute_couplings(&heavier_idf).unwrap();
            prop_assert!(h.alpha_of.norm() < base.alpha_of.norm());
            prop_assert!(h.alpha_om.norm() < base.alpha_om.norm());
            prop_assert!(h.alpha_mf.norm() < base.alpha_mf.norm());

            let mut heavier_mirror = p.clone();
            heavier_mirror.m_mirror *= factor;
            let hm = compute_couplings(&heavier_mirror).unwrap();
            let expect = base.alpha_om.norm() / factor.sqrt();
            prop_assert!((hm.alpha_om.norm() - expect).abs() <= 1e-3 * expect);
            let expect_mf = base.alpha_mf.norm() / factor.sqrt();
            prop_assert!((hm.alpha_mf.norm() - expect_mf).abs() <= 1e-3 * expect_mf);
            prop_assert!((hm.alpha_of - base.alpha_of).norm() == 0.0);
        }
    }
}
