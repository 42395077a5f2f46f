//! Mirror optical response: complex reflection/transmission coefficients for
//! both coupling variants, reflectance spectra, and multi-resonance
//! composition.
//!
//! Both closed forms are lossless, so `T = 1 + R` and `|R|² + |T|² = 1` hold
//! analytically. The response depends on frequency only through the two
//! ratios `η = ω/Ω` and `r_p = Ω/Ω_P`, which is what the evaluators use
//! internally; this keeps SI-scale parameter sets (silver) overflow-free.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{CouplingKind, ModelParams};

/// Complex reflection/transmission pair with the derived intensities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionResult {
    pub r: Complex64,
    pub t: Complex64,
    /// |R|², evaluated from the closed form (not from `r`).
    pub reflectance: f64,
    /// |T|² = 1 − |R|² for the lossless forms.
    pub transmittance: f64,
}

impl ReflectionResult {
    fn perfect_transmission() -> Self {
        Self { r: Complex64::new(0.0, 0.0), t: Complex64::new(1.0, 0.0), reflectance: 0.0, transmittance: 1.0 }
    }
}

/// R = (−1 − i·x)/(1 + x²) for a real detuning ratio x = d/s, where the
/// underlying coefficient is −i·s/(i·s + d). Evaluated through 1/x when
/// |x| > 1 so huge ratios neither overflow nor lose the limits R → 0
/// (x → ±∞) and R → −1 (x → 0).
fn reflection_from_ratio(x: f64) -> ReflectionResult {
    let (re, im, reflectance) = if x.abs() <= 1.0 {
        let den = 1.0 + x * x;
        (-1.0 / den, -x / den, 1.0 / den)
    } else {
        let inv = 1.0 / x;
        let den = 1.0 + inv * inv;
        (-(inv * inv) / den, -inv / den, (inv * inv) / den)
    };
    let r = Complex64::new(re, im);
    ReflectionResult { r, t: Complex64::new(1.0 + re, im), reflectance, transmittance: 1.0 - reflectance }
}

/// Monopole (`qΦ`) variant: R(ω) = −iλ²c/(iλ²c + 2mωε₀(ω²−Ω²)),
/// |R|² = 1/(1 + r_p²η²(1−η²)²). Perfectly reflecting at ω = Ω and,
/// as an artifact of the monopole coupling, at ω = 0.
pub fn reflection_qphi(omega: f64, p: &ModelParams) -> ReflectionResult {
    if p.lambda == 0.0 {
        return ReflectionResult::perfect_transmission();
    }
    let eta = omega / p.omega_idf;
    let r_p = p.omega_idf / p.plasma_frequency(CouplingKind::QPhi);
    reflection_from_ratio(r_p * eta * (eta * eta - 1.0))
}

/// Current (`q̇Φ`) variant: R(ω) = −iλ²ω/(iλ²ω + 2mε₀c(ω²−Ω²)),
/// |R|² = η²/(η² + r_p²(η²−1)²). R(Ω) = −1 exactly; R(0) = 0.
pub fn reflection_qdotphi(omega: f64, p: &ModelParams) -> ReflectionResult {
    if p.lambda == 0.0 || omega == 0.0 {
        return ReflectionResult::perfect_transmission();
    }
    let eta = omega / p.omega_idf;
    let r_p = p.omega_idf / p.plasma_frequency(CouplingKind::QdotPhi);
    reflection_from_ratio(r_p * (eta * eta - 1.0) / eta)
}

/// Dispatch on the coupling variant.
pub fn reflection(omega: f64, p: &ModelParams, kind: CouplingKind) -> ReflectionResult {
    match kind {
        CouplingKind::QPhi => reflection_qphi(omega, p),
        CouplingKind::QdotPhi => reflection_qdotphi(omega, p),
    }
}

/// One internal oscillator, characterised by its resonance frequency and the
/// associated plasma-frequency strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resonance {
    pub omega: f64,
    pub omega_p: f64,
}

/// A set of co-located internal oscillators, one per resonance peak.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSet {
    pub entries: Vec<Resonance>,
}

impl ResonanceSet {
    pub fn new(entries: Vec<Resonance>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("resonance set must not be empty".into()));
        }
        for r in &entries {
            if !(r.omega > 0.0) || !(r.omega_p > 0.0) {
                return Err(Error::Config(format!(
                    "resonance entries must be positive, got (omega={}, omega_p={})",
                    r.omega, r.omega_p
                )));
            }
        }
        for i in 0..entries.len() {
            for j in (i + 1)..entries.len() {
                if entries[i].omega == entries[j].omega {
                    return Err(Error::Config(format!(
                        "resonance frequencies must be distinct, {} appears twice",
                        entries[i].omega
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    /// Single resonance at the parameters' idf frequency and the plasma
    /// frequency of the given variant.
    pub fn single_from_params(p: &ModelParams, kind: CouplingKind) -> Result<Self> {
        let omega_p = p.plasma_frequency(kind);
        if !(omega_p > 0.0) {
            return Err(Error::Config("single-resonance spectrum needs lambda > 0".into()));
        }
        Self::new(vec![Resonance { omega: p.omega_idf, omega_p }])
    }
}

/// Superposed surface currents of co-located oscillators driven by the
/// common field: additive s_tot(ω) = Σᵢ λᵢ²ω/(mᵢ(ω²−Ωᵢ²)), i.e.
/// u(ω) = Σᵢ Ω_Pᵢ ω/(ω²−Ωᵢ²) once ε₀c is divided out, and
/// R = −i·u/(1 + i·u). At a pole of u the analytic limit is R = −1
/// (perfect reflection). `q̇Φ` variant only.
pub fn compose_resonances(omega: f64, set: &ResonanceSet) -> ReflectionResult {
    if omega == 0.0 {
        return ReflectionResult::perfect_transmission();
    }
    let mut u = 0.0f64;
    for r in &set.entries {
        u += r.omega_p * omega / (omega * omega - r.omega * r.omega);
    }
    let (re, im, reflectance) = if u.abs() <= 1.0 {
        let den = 1.0 + u * u;
        (-(u * u) / den, -u / den, u * u / den)
    } else {
        // includes the exact pole u = ±inf, where inv = ±0 and R = −1
        let inv = 1.0 / u;
        let den = 1.0 + inv * inv;
        (-1.0 / den, -inv / den, 1.0 / den)
    };
    let r = Complex64::new(re, im);
    ReflectionResult { r, t: Complex64::new(1.0 + re, im), reflectance, transmittance: 1.0 - reflectance }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumRow {
    pub omega: f64,
    pub wavelength: f64,
    pub reflectance: f64,
    pub transmittance: f64,
}

/// Tabulated reflectance/transmittance over a frequency grid.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    /// CSV with header `omega,wavelength,reflectance,transmittance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,wavelength,reflectance,transmittance\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                row.omega, row.wavelength, row.reflectance, row.transmittance
            ));
        }
        out
    }
}

/// Evaluate |R|², |T|² over an ascending frequency grid. A single resonance
/// uses the closed form of the requested variant; several resonances use
/// [`compose_resonances`] (`q̇Φ` only). `c_light` only enters the reported
/// wavelength 2πc/ω.
pub fn spectrum(
    grid: &[f64],
    set: &ResonanceSet,
    kind: CouplingKind,
    c_light: f64,
) -> Result<SpectrumTable> {
    if grid.is_empty() {
        return Err(Error::Config("frequency grid must not be empty".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("frequency grid must be strictly ascending".into()));
    }
    if grid[0] < 0.0 {
        return Err(Error::Config("frequencies must be non-negative".into()));
    }
    if set.entries.len() > 1 && kind != CouplingKind::QdotPhi {
        return Err(Error::Config(
            "multi-resonance composition is defined for the qdot_phi coupling only".into(),
        ));
    }
    let eval = |omega: f64| -> ReflectionResult {
        if set.entries.len() == 1 {
            let res = set.entries[0];
            single_resonance_response(omega, res, kind)
        } else {
            compose_resonances(omega, set)
        }
    };
    let row = |&omega: &f64| -> SpectrumRow {
        let r = eval(omega);
        SpectrumRow {
            omega,
            wavelength: 2.0 * std::f64::consts::PI * c_light / omega,
            reflectance: r.reflectance,
            transmittance: r.transmittance,
        }
    };
    let rows = map_grid(grid, row);
    Ok(SpectrumTable { rows })
}

/// Closed-form response at one frequency from an `(Ω, Ω_P)` pair.
pub fn single_resonance_response(omega: f64, res: Resonance, kind: CouplingKind) -> ReflectionResult {
    let eta = omega / res.omega;
    let r_p = res.omega / res.omega_p;
    match kind {
        CouplingKind::QPhi => reflection_from_ratio(r_p * eta * (eta * eta - 1.0)),
        CouplingKind::QdotPhi => {
            if omega == 0.0 {
                ReflectionResult::perfect_transmission()
            } else {
                reflection_from_ratio(r_p * (eta * eta - 1.0) / eta)
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn map_grid<F>(grid: &[f64], f: F) -> Vec<SpectrumRow>
where
    F: Fn(&f64) -> SpectrumRow + Sync + Send,
{
    use rayon::prelude::*;
    grid.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_grid<F>(grid: &[f64], f: F) -> Vec<SpectrumRow>
where
    F: Fn(&f64) -> SpectrumRow,
{
    grid.iter().map(f).collect()
}

/// Strictly sequential spectrum evaluation; same result as [`spectrum`].
pub fn spectrum_seq(
    grid: &[f64],
    set: &ResonanceSet,
    kind: CouplingKind,
    c_light: f64,
) -> Result<SpectrumTable> {
    if grid.is_empty() {
        return Err(Error::Config("frequency grid must not be empty".into()));
    }
    let rows = grid
        .iter()
        .map(|&omega| {
            let r = if set.entries.len() == 1 {
                single_resonance_response(omega, set.entries[0], kind)
            } else {
                compose_resonances(omega, set)
            };
            SpectrumRow {
                omega,
                wavelength: 2.0 * std::f64::consts::PI * c_light / omega,
                reflectance: r.reflectance,
                transmittance: r.transmittance,
            }
        })
        .collect();
    Ok(SpectrumTable { rows })
}
