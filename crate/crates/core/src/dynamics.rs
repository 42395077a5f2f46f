//! Linear drift/diffusion systems for the coupled mirror-oscillator-field
//! model (6-dim), the boundary-condition baseline (4-dim) and the
//! adiabatically eliminated variant; Lyapunov covariance evolution and
//! steady states.
//!
//! Everything uses the global quadrature ordering (Z, P, Φ, Π, q, p).

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::couplings::{compute_couplings, CouplingSet};
use crate::error::{Error, Result};
use crate::gaussian::{
    extract_pair, log_negativity, symplectic_form, uncertainty_check, CovarianceMatrix, ModePair,
};
use crate::params::{bose_occupation, derive, ModelParams};

pub const LABELS_6: [&str; 6] = ["Z", "P", "Phi", "Pi", "q", "p"];
pub const LABELS_4: [&str; 4] = ["Z", "P", "Phi", "Pi"];

/// Mechanical-bath diffusion normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// Classical white-noise kernel, D_PP = 2γ k_B T/℧′.
    HighT,
    /// Exact Bose factor, D_PP = γ(2n̄+1)ħ.
    Bose,
}

/// The (A, D) pair of dV/dt = A V + V Aᵀ + D.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusion {
    pub a: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub labels: Vec<&'static str>,
    pub hbar: f64,
}

impl DriftDiffusion {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// ‖A𝕄 + 𝕄Aᵀ‖max: zero iff the drift is Hamiltonian.
    pub fn hamiltonian_defect(&self) -> f64 {
        let m = symplectic_form(self.dim() / 2);
        (&self.a * &m + &m * self.a.transpose()).amax()
    }
}

/// Mechanical-bath momentum diffusion for an oscillator at `freq`.
fn mechanical_d_pp(p: &ModelParams, freq: f64, mode: NoiseMode) -> f64 {
    let c = &p.consts;
    match mode {
        NoiseMode::HighT => 2.0 * p.gamma * c.k_b * p.temperature / freq,
        NoiseMode::Bose => {
            p.gamma * (2.0 * bose_occupation(freq, p.temperature, c) + 1.0) * c.hbar
        }
    }
}

/// Diffusion matrix of the 6-dim system: mechanical D_PP plus, when the
/// internal oscillator is damped, vacuum-level D_qq = γ_f ħ and D_pp = γ_i ħ.
pub fn build_diffusion(p: &ModelParams, mode: NoiseMode) -> Result<DMatrix<f64>> {
    let d = derive(p)?;
    let mut m = DMatrix::zeros(6, 6);
    m[(1, 1)] = mechanical_d_pp(p, d.mho_prime, mode);
    m[(4, 4)] = p.gamma_f * p.consts.hbar;
    m[(5, 5)] = p.gamma_i * p.consts.hbar;
    Ok(m)
}

/// Full 6-dim drift of the coupled system, with optional mechanical and
/// internal-oscillator damping:
///   Ż = ℧′P
///   Ṗ = −℧′Z − 2(Re α_OM q − Im α_OM p) − 2(Re α_MF Φ − Im α_MF Π) − γP
///   Φ̇ = |α_OF| q − 2 Im α_MF Z
///   Π̇ = |α_OF| p − 2 Re α_MF Z
///   q̇ = Δp − |α_OF| Φ − 2 Im α_OM Z − γ_f q
///   ṗ = −Δq − |α_OF| Π − 2 Re α_OM Z − γ_i p
pub fn build_drift_mof(cs: &CouplingSet, p: &ModelParams, mode: NoiseMode) -> Result<DriftDiffusion> {
    let dp = derive(p)?;
    let alpha = cs.alpha_of.norm();
    let (re_om, im_om) = (cs.alpha_om.re, cs.alpha_om.im);
    let (re_mf, im_mf) = (cs.alpha_mf.re, cs.alpha_mf.im);
    let delta = dp.delta;

    let mut a = DMatrix::zeros(6, 6);
    a[(0, 1)] = cs.mho_prime;
    a[(1, 0)] = -cs.mho_prime;
    a[(1, 1)] = -p.gamma;
    a[(1, 2)] = -2.0 * re_mf;
    a[(1, 3)] = 2.0 * im_mf;
    a[(1, 4)] = -2.0 * re_om;
    a[(1, 5)] = 2.0 * im_om;
    a[(2, 0)] = -2.0 * im_mf;
    a[(2, 4)] = alpha;
    a[(3, 0)] = -2.0 * re_mf;
    a[(3, 5)] = alpha;
    a[(4, 0)] = -2.0 * im_om;
    a[(4, 2)] = -alpha;
    a[(4, 4)] = -p.gamma_f;
    a[(4, 5)] = delta;
    a[(5, 0)] = -2.0 * re_om;
    a[(5, 3)] = -alpha;
    a[(5, 4)] = -delta;
    a[(5, 5)] = -p.gamma_i;

    Ok(DriftDiffusion { a, d: build_diffusion(p, mode)?, labels: LABELS_6.to_vec(), hbar: p.consts.hbar })
}

/// Boundary-condition baseline (4-dim): the mirror couples to the field
/// through β_MF only, with the same mechanical bath for comparability:
///   Ż = ℧P, Ṗ = −℧Z + √2 Re β Φ − √2 Im β Π − γP,
///   Φ̇ = √2 Im β Z, Π̇ = √2 Re β Z.
pub fn build_drift_bc(p: &ModelParams, mode: NoiseMode) -> Result<DriftDiffusion> {
    let cs = compute_couplings(p)?;
    let s2 = std::f64::consts::SQRT_2;
    let (re_b, im_b) = (cs.beta_mf.re, cs.beta_mf.im);
    let mut a = DMatrix::zeros(4, 4);
    a[(0, 1)] = p.mho;
    a[(1, 0)] = -p.mho;
    a[(1, 1)] = -p.gamma;
    a[(1, 2)] = s2 * re_b;
    a[(1, 3)] = -s2 * im_b;
    a[(2, 0)] = s2 * im_b;
    a[(3, 0)] = s2 * re_b;
    let mut d = DMatrix::zeros(4, 4);
    d[(1, 1)] = mechanical_d_pp(p, p.mho, mode);
    Ok(DriftDiffusion { a, d, labels: LABELS_4.to_vec(), hbar: p.consts.hbar })
}

/// Adiabatic elimination of the damped internal oscillator. The steady-state
/// amplitudes solve the q̇ = ṗ = 0 pair self-consistently:
///   [γ_f, −Δ; Δ, γ_i]·[q, p]ᵀ = [−Ĉ₁, −Ĉ₂]ᵀ  (plus the idf noises)
///   Ĉ₁ = |α_OF|Φ + 2 Im α_OM Z,  Ĉ₂ = |α_OF|Π + 2 Re α_OM Z,
/// giving q_st = −(γ_i Ĉ₁ + Δ Ĉ₂)/(Δ² + γ_iγ_f) and
/// p_st = (Δ Ĉ₁ − γ_f Ĉ₂)/(Δ² + γ_iγ_f). Substituting into the (P, Φ, Π)
/// equations yields the effective 4-dim drift; the idf noises carried by
/// (q_st, p_st) enter the diffusion as a Gram contribution.
pub fn adiabatic_idf_elimination(
    cs: &CouplingSet,
    p: &ModelParams,
    mode: NoiseMode,
) -> Result<DriftDiffusion> {
    let dp = derive(p)?;
    let delta = dp.delta;
    let den = delta * delta + p.gamma_i * p.gamma_f;
    if !(den > 0.0) {
        return Err(Error::Params(format!(
            "adiabatic elimination needs Δ² + γ_iγ_f > 0, got {den}"
        )));
    }
    let alpha = cs.alpha_of.norm();
    let (re_om, im_om) = (cs.alpha_om.re, cs.alpha_om.im);
    let (re_mf, im_mf) = (cs.alpha_mf.re, cs.alpha_mf.im);

    // coefficient rows of Ĉ₁, Ĉ₂ over (Z, P, Φ, Π)
    let c1 = [2.0 * im_om, 0.0, alpha, 0.0];
    let c2 = [2.0 * re_om, 0.0, 0.0, alpha];
    let mut q_st = [0.0; 4];
    let mut p_st = [0.0; 4];
    for k in 0..4 {
        q_st[k] = -(p.gamma_i * c1[k] + delta * c2[k]) / den;
        p_st[k] = (delta * c1[k] - p.gamma_f * c2[k]) / den;
    }

    let mut a = DMatrix::zeros(4, 4);
    a[(0, 1)] = cs.mho_prime;
    a[(1, 0)] = -cs.mho_prime;
    a[(1, 1)] = -p.gamma;
    a[(1, 2)] = -2.0 * re_mf;
    a[(1, 3)] = 2.0 * im_mf;
    a[(2, 0)] = -2.0 * im_mf;
    a[(3, 0)] = -2.0 * re_mf;
    for k in 0..4 {
        a[(1, k)] += -2.0 * re_om * q_st[k] + 2.0 * im_om * p_st[k];
        a[(2, k)] += alpha * q_st[k];
        a[(3, k)] += alpha * p_st[k];
    }

    // noise coefficients: q_st ← (−γ_i ξ_f − Δ ξ_i)/den, p_st ← (−Δ ξ_f + γ_f ξ_i)/den
    let qf = -p.gamma_i / den;
    let qi = -delta / den;
    let pf = -delta / den;
    let pi = p.gamma_f / den;
    let g_f = [0.0, -2.0 * re_om * qf + 2.0 * im_om * pf, alpha * qf, alpha * pf];
    let g_i = [0.0, -2.0 * re_om * qi + 2.0 * im_om * pi, alpha * qi, alpha * pi];

    let mut d = DMatrix::zeros(4, 4);
    d[(1, 1)] = mechanical_d_pp(p, cs.mho_prime, mode);
    let hbar = p.consts.hbar;
    for i in 0..4 {
        for j in 0..4 {
            d[(i, j)] += hbar * (p.gamma_f * g_f[i] * g_f[j] + p.gamma_i * g_i[i] * g_i[j]);
        }
    }
    Ok(DriftDiffusion { a, d, labels: LABELS_4.to_vec(), hbar })
}

/// Initial state: mirror thermal at the bath temperature, internal
/// oscillator and field in vacuum (fluctuations about the classical drive).
pub fn initial_covariance(p: &ModelParams) -> Result<CovarianceMatrix> {
    let dp = derive(p)?;
    let hbar = p.consts.hbar;
    let mut m = DMatrix::identity(6, 6) * (hbar / 2.0);
    m[(0, 0)] = hbar * (dp.nbar + 0.5);
    m[(1, 1)] = hbar * (dp.nbar + 0.5);
    CovarianceMatrix::new(m)
}

/// 4-dim initial state for the baseline systems: mirror thermal at `freq`,
/// field vacuum.
pub fn initial_covariance_pair(p: &ModelParams, freq: f64) -> Result<CovarianceMatrix> {
    let hbar = p.consts.hbar;
    let nbar = bose_occupation(freq, p.temperature, &p.consts);
    let mut m = DMatrix::identity(4, 4) * (hbar / 2.0);
    m[(0, 0)] = hbar * (nbar + 0.5);
    m[(1, 1)] = hbar * (nbar + 0.5);
    CovarianceMatrix::new(m)
}

/// Covariance propagation method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Fixed-step classical Runge-Kutta; `step` overrides the default
    /// (2π/50)/‖A‖∞ bound on the fastest dynamical rate.
    Rk4 { step: Option<f64> },
    /// Closed-form propagation V ← E V Eᵀ + P per step through the block
    /// matrix exponential of [[−A, D], [0, Aᵀ]], sub-stepped so the
    /// exponent norm stays moderate. Stiff-safe.
    Exact,
}

/// Covariance snapshots along a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub covs: Vec<CovarianceMatrix>,
}

/// Time series of E_N and c₋ (optionally with the covariance snapshots).
#[derive(Debug, Clone)]
pub struct EntanglementTrace {
    pub times: Vec<f64>,
    pub e_n: Vec<f64>,
    pub c_minus: Vec<f64>,
    pub covariances: Option<Vec<CovarianceMatrix>>,
}

impl Trajectory {
    /// Logarithmic negativity along the trajectory; 6-dim states are reduced
    /// to the requested pair (mirror-field by default).
    pub fn entanglement_trace(
        &self,
        pair: ModePair,
        hbar: f64,
        keep_covariances: bool,
    ) -> Result<EntanglementTrace> {
        let mut e_n = Vec::with_capacity(self.covs.len());
        let mut c_minus = Vec::with_capacity(self.covs.len());
        for v in &self.covs {
            let v4 = if v.dim() == 6 { extract_pair(v, pair)? } else { v.clone() };
            let r = log_negativity(&v4, hbar)?;
            e_n.push(r.e_n);
            c_minus.push(r.c_minus);
        }
        Ok(EntanglementTrace {
            times: self.times.clone(),
            e_n,
            c_minus,
            covariances: keep_covariances.then(|| self.covs.clone()),
        })
    }
}

/// Default fixed step: a fiftieth of the period of the fastest rate in A.
pub fn default_rk4_step(sys: &DriftDiffusion) -> f64 {
    let rate = matrix_inf_norm(&sys.a).max(1e-12);
    (2.0 * std::f64::consts::PI / 50.0) / rate
}

fn matrix_inf_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn symmetrize(v: &mut DMatrix<f64>) {
    let n = v.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (v[(i, j)] + v[(j, i)]);
            v[(i, j)] = s;
            v[(j, i)] = s;
        }
    }
}

fn lyapunov_rhs(sys: &DriftDiffusion, v: &DMatrix<f64>) -> DMatrix<f64> {
    &sys.a * v + v * sys.a.transpose() + &sys.d
}

fn rk4_step(sys: &DriftDiffusion, v: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let k1 = lyapunov_rhs(sys, v);
    let k2 = lyapunov_rhs(sys, &(v + &k1 * (h / 2.0)));
    let k3 = lyapunov_rhs(sys, &(v + &k2 * (h / 2.0)));
    let k4 = lyapunov_rhs(sys, &(v + &k3 * h));
    let mut out = v + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    symmetrize(&mut out);
    out
}

/// One-step propagator pair: E = e^{Ah} and P = ∫₀ʰ e^{As} D e^{Aᵀs} ds,
/// from the upper-triangular block exponential of [[−A, D], [0, Aᵀ]].
fn van_loan_pair(sys: &DriftDiffusion, h: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = sys.dim();
    let mut block = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            block[(i, j)] = -sys.a[(i, j)] * h;
            block[(i, n + j)] = sys.d[(i, j)] * h;
            block[(n + i, n + j)] = sys.a[(j, i)] * h;
        }
    }
    let ex = block.exp();
    let f12 = ex.view((0, n), (n, n)).clone_owned();
    let f22 = ex.view((n, n), (n, n)).clone_owned();
    let e = f22.transpose();
    let mut p = &e * f12;
    symmetrize(&mut p);
    (e, p)
}

struct ExactStepper {
    cache: HashMap<u64, (DMatrix<f64>, DMatrix<f64>)>,
    /// substep bound so ‖block·h‖ stays moderate for the Padé evaluation
    max_h: f64,
}

impl ExactStepper {
    fn new(sys: &DriftDiffusion) -> Self {
        let scale = matrix_inf_norm(&sys.a).max(matrix_inf_norm(&sys.d));
        let max_h = if scale > 0.0 { 4.0 / scale } else { f64::INFINITY };
        Self { cache: HashMap::new(), max_h }
    }

    fn advance(&mut self, sys: &DriftDiffusion, v: &mut DMatrix<f64>, dt: f64) {
        if dt == 0.0 {
            return;
        }
        let n_sub = (dt / self.max_h).ceil().max(1.0) as usize;
        let h = dt / n_sub as f64;
        let (e, p) = self
            .cache
            .entry(h.to_bits())
            .or_insert_with(|| van_loan_pair(sys, h))
            .clone();
        for _ in 0..n_sub {
            *v = &e * &*v * e.transpose() + &p;
            symmetrize(v);
        }
    }
}

/// Integrate dV/dt = AV + VAᵀ + D over `times` (ascending; V0 applies at
/// `times[0]`). Physicality is monitored at every output step; a violation
/// beyond tolerance reports the offending time (step too large or a
/// non-physical system).
pub fn evolve_covariance(
    sys: &DriftDiffusion,
    v0: &CovarianceMatrix,
    times: &[f64],
    method: Method,
) -> Result<Trajectory> {
    if times.is_empty() {
        return Err(Error::Config("time grid must not be empty".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("time grid must be strictly ascending".into()));
    }
    if v0.dim() != sys.dim() {
        return Err(Error::Dimension { expected: sys.dim(), got: v0.dim() });
    }
    let scale0 = v0.as_matrix().amax().max(1.0);
    let check0 = uncertainty_check(v0, sys.hbar);
    if check0.min_eig < -1e-6 * scale0 {
        return Err(Error::NonPhysical(format!(
            "initial covariance violates the uncertainty relation: min eig {:e}",
            check0.min_eig
        )));
    }

    let mut covs = Vec::with_capacity(times.len());
    covs.push(v0.clone());
    let mut v = v0.as_matrix().clone();

    let mut exact = matches!(method, Method::Exact).then(|| ExactStepper::new(sys));
    let rk4_h = match method {
        Method::Rk4 { step } => step.unwrap_or_else(|| default_rk4_step(sys)),
        Method::Exact => 0.0,
    };
    if matches!(method, Method::Rk4 { .. }) && !(rk4_h > 0.0) {
        return Err(Error::Config(format!("rk4 step must be positive, got {rk4_h}")));
    }

    for w in times.windows(2) {
        let dt = w[1] - w[0];
        match (&method, exact.as_mut()) {
            (Method::Exact, Some(stepper)) => stepper.advance(sys, &mut v, dt),
            _ => {
                let n = (dt / rk4_h).ceil().max(1.0) as usize;
                let h = dt / n as f64;
                for _ in 0..n {
                    v = rk4_step(sys, &v, h);
                }
            }
        }
        let cov = CovarianceMatrix::new(v.clone())
            .map_err(|e| Error::Numerical(format!("at t = {}: {e}", w[1])))?;
        let scale = v.amax().max(1.0);
        let chk = uncertainty_check(&cov, sys.hbar);
        if chk.min_eig < -1e-6 * scale {
            return Err(Error::Numerical(format!(
                "covariance turned non-physical at t = {} (min eig {:e}); the step may be too large",
                w[1], chk.min_eig
            )));
        }
        covs.push(cov);
    }
    Ok(Trajectory { times: times.to_vec(), covs })
}

/// Bounded-iteration eigenvalues of a real matrix; `None` when the QR
/// iteration does not converge (which happens for spectra sitting exactly
/// on the imaginary axis).
pub fn drift_eigenvalues(a: &DMatrix<f64>) -> Option<Vec<num_complex::Complex64>> {
    let n = a.nrows();
    nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, 100 * n.max(4))
        .map(|s| s.complex_eigenvalues().iter().copied().collect())
}

/// Positive-definite Lyapunov certificate for strict stability: A is Hurwitz
/// iff A P + P Aᵀ = −I has a symmetric solution with P ≻ 0.
fn hurwitz_certificate(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let k = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = nalgebra::DVector::from_iterator(
        n * n,
        (0..n).flat_map(|j| (0..n).map(move |i| if i == j { -1.0 } else { 0.0 })),
    );
    match k.lu().solve(&rhs) {
        None => false,
        Some(x) => {
            let mut p = DMatrix::zeros(n, n);
            for j in 0..n {
                for i in 0..n {
                    p[(i, j)] = x[j * n + i];
                }
            }
            symmetrize(&mut p);
            p.symmetric_eigenvalues().iter().all(|&l| l > 0.0)
        }
    }
}

/// Steady state of AV + VAᵀ + D = 0 through vectorization,
/// (I⊗A + A⊗I) vec(V) = −vec(D). Requires a Hurwitz drift.
pub fn steady_state_covariance(sys: &DriftDiffusion) -> Result<CovarianceMatrix> {
    let n = sys.dim();
    let tol = 1e-10 * matrix_inf_norm(&sys.a).max(1.0);
    match drift_eigenvalues(&sys.a) {
        Some(eigs) => {
            for e in &eigs {
                if e.re >= -tol {
                    return Err(Error::NonHurwitz { re: e.re, im: e.im });
                }
            }
        }
        // QR did not converge: decide through the Lyapunov certificate
        None => {
            if !hurwitz_certificate(&sys.a) {
                return Err(Error::NonHurwitz { re: 0.0, im: f64::NAN });
            }
        }
    }
    let eye = DMatrix::<f64>::identity(n, n);
    let k = eye.kronecker(&sys.a) + sys.a.kronecker(&eye);
    let rhs = nalgebra::DVector::from_iterator(
        n * n,
        (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| -sys.d[(i, j)]),
    );
    let lu = k.lu();
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Lyapunov system".into()))?;
    let mut v = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            v[(i, j)] = x[j * n + i];
        }
    }
    symmetrize(&mut v);
    let residual = (&sys.a * &v + &v * sys.a.transpose() + &sys.d).amax();
    let bound = 1e-10 * sys.d.amax();
    if residual > bound.max(1e-300) {
        return Err(Error::Numerical(format!(
            "Lyapunov residual {residual:e} exceeds {bound:e}"
        )));
    }
    CovarianceMatrix::new(v)
}

/// Location of the dominant spectral peak of a uniformly sampled signal.
#[derive(Debug, Clone, Copy)]
pub struct DftPeak {
    /// Angular frequency of the strongest non-DC bin.
    pub omega: f64,
    /// Angular bin width 2π/(N·dt).
    pub bin_width: f64,
}

/// Plain DFT peak search (mean removed, bins 1..N/2).
pub fn dominant_angular_frequency(values: &[f64], dt: f64) -> DftPeak {
    let n = values.len();
    assert!(n >= 4, "need at least 4 samples");
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 1..=n / 2 {
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (j, &x) in values.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
            re += (x - mean) * phase.cos();
            im += (x - mean) * phase.sin();
        }
        let power = re * re + im * im;
        if power > best.1 {
            best = (k, power);
        }
    }
    let bin = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    DftPeak { omega: best.0 as f64 * bin, bin_width: bin }
}
